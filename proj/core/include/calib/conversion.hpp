#pragma once

#include <optional>
#include <vector>

#include "calib/calibration.hpp"
#include "calib/loss.hpp"

namespace calib {

struct RiskBoundInput {
  double surrogate_excess = 0.0;  // T^surr + approximation error
  std::optional<double> c;        // noise-condition constant, > 0
  std::optional<double> alpha;    // noise-condition exponent, in [0,1]
  std::optional<double> inf_surrogate_risk;  // dominating-loss path only
  void validate() const;
};

// True-risk bound for losses dominating the 0-1 loss:
// surrogate_excess + inf surrogate risk.
double convert_dominating(const RiskBoundInput& bound);

// Sampled verification of L(s,y) >= 1{f(s) != y}; throws std::domain_error
// with a witness on failure.
void spot_check_domination(const Loss& loss, int samples, std::uint64_t seed);

// Excess-true-risk bound via the generalized inverse of a calibration
// curve. Throws std::domain_error when the curve vanishes at positive eps.
InverseResult convert_calibrated(const CalibrationCurve& curve,
                                 const RiskBoundInput& bound);

// Fast-rate conversion under the low-noise condition: smallest eps with
// c eps^alpha delta(eps^(1-alpha) / (2c)) >= surrogate_excess. The curve
// must be convex and non-decreasing.
InverseResult convert_mtnc(const CalibrationCurve& curve,
                           const RiskBoundInput& bound);

// Optimal binary surrogate risk V(p) = inf_t p phi(-t) + (1-p) phi(t)
// tabulated on a grid, with a strong-concavity constant estimated from
// central-difference second derivatives on the grid interior.
struct ZhangConstant {
  std::vector<double> p_grid;
  std::vector<double> V;
  std::vector<double> Vpp;     // interior second differences
  double c_prime = 0.0;        // -max interior V''
  std::optional<double> c;     // sqrt(c')/2 when c' > 0
  bool boundary_caveat = false;  // |V''| blows up toward the boundary
  bool diagnostics_ok = true;    // every grid minimization converged
};

ZhangConstant zhang_constant(const Phi& phi, double grid_step = 0.01,
                             const OptimizerSettings& settings = {});

}  // namespace calib
