#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calib/loss.hpp"
#include "calib/optimize.hpp"
#include "calib/transform.hpp"

namespace calib {

enum class CurveMethod { ClosedForm, NumericBinary, NumericDeltaMax };

struct CurvePoint {
  double eps = 0.0;
  double delta = 0.0;  // extended real; +inf allowed
  double residual = 0.0;
  Vec witness_p;  // delta-max curves only
  bool failed = false;
};

struct CalibrationCurve {
  std::vector<CurvePoint> points;  // eps strictly increasing
  CurveMethod method = CurveMethod::ClosedForm;

  // delta(eps) <- sup_{eps' <= eps} delta(eps')
  void monotone_envelope();
  bool non_decreasing() const;

  std::string to_csv() const;
  static CalibrationCurve from_csv(const std::string& text);
  std::string to_json() const;
};

// Closed-form binary calibration values per transformation function.
// calibrated == false marks rows without a calibration function
// (identity, linear, kink with tau = 0).
struct ClosedForm {
  bool calibrated = true;
  double delta = 0.0;
};
ClosedForm delta_binary_closed(const Phi& phi, double eps);

// Numeric binary calibration value for the margin loss phi(-s_y) on the
// two-class sum-to-zero line. Convex phi evaluate the one-dimensional
// infimum formula; non-convex phi (zero-one, sigmoid) fall back to the
// suboptimal-set-constrained pointwise form at the worst-case binary
// distribution.
double delta_binary_numeric(const Phi& phi, double eps,
                            const OptimizerSettings& settings = {},
                            double* residual = nullptr);

// Two-infimum form inf_s R(s, p0) - inf_s R(s, p_eps) for an arbitrary
// binary loss (K must be 2).
double delta_binary_definition(const Loss& loss, double eps,
                               const OptimizerSettings& settings = {},
                               double* residual = nullptr);

struct DeltaMaxResult {
  double value = 0.0;   // clamped at 0; +inf when no class is eps-suboptimal
  double raw = 0.0;     // un-clamped difference of infima
  double residual = 0.0;
  Vec witness_p;
  int witness_j = -1;
  Vec witness_s;
};

DeltaMaxResult delta_max_pointwise(const Loss& loss, double eps, const Vec& p,
                                   const OptimizerSettings& settings = {});

// Infimum over the simplex approximated by a composition grid plus the
// embedded two-class worst-case candidates (and, for the kink LLW loss,
// the known problematic distributions). Reported value is an upper bound
// on the true infimum.
DeltaMaxResult delta_max_global(const Loss& loss, double eps, int resolution,
                                const OptimizerSettings& settings = {});

// Shared-grid sweep over several eps values; caches the per-distribution
// constrained minima across eps.
std::vector<DeltaMaxResult> delta_max_global_sweep(
    const Loss& loss, const std::vector<double>& eps_list, int resolution,
    const OptimizerSettings& settings = {});

struct InverseResult {
  double eps = 0.0;
  bool beyond_curve = false;
};
// inf { eps : delta(eps) >= x } with linear interpolation between grid
// points; beyond_curve set when no grid point qualifies.
InverseResult generalized_inverse(const CalibrationCurve& curve, double x);

CalibrationCurve calibration_curve_phi(const Phi& phi,
                                       const std::vector<double>& eps_grid,
                                       CurveMethod method,
                                       const OptimizerSettings& settings = {});

CalibrationCurve calibration_curve_loss(const Loss& loss,
                                        const std::vector<double>& eps_grid,
                                        CurveMethod method, int resolution,
                                        const OptimizerSettings& settings = {});

}  // namespace calib
