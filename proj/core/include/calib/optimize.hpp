#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "calib/score_set.hpp"

namespace calib {

struct OptimizerSettings {
  double tol = 1e-8;
  int max_iters = 10000;
  int restarts = 16;
  double box_radius = 50.0;  // clip for unbounded score sets
  std::uint64_t seed = 0;
};

struct OptResult {
  Vec minimizer;
  double value = 0.0;
  double residual = 0.0;   // estimated remaining gap
  bool converged = false;
  bool boundary_hit = false;  // minimizer pinned to the clipping box
  bool unbounded = false;     // objective fell below -1e12
};

// Golden-section search after exponential bracket expansion from 0,
// restricted to [-box_radius, box_radius]. Exact up to tol for convex
// objectives whose minimizer lies inside the box; a bracket that runs into
// the box on a still-decreasing objective reports converged = false with
// the boundary point (an unattained infimum).
OptResult minimize_1d(const std::function<double(double)>& f,
                      const OptimizerSettings& settings = {});

// Plain golden-section on [lo, hi].
std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                     double lo, double hi, double tol = 1e-11);

// Linear constraints over score coordinates: equality pairs s_i = s_j and
// argmax memberships (each j requires s_j >= s_k for all k). Multiple
// argmax indices imply their equality.
struct LinearConstraints {
  std::vector<std::pair<int, int>> equal;
  std::vector<int> argmax;
};

// Multi-start projected coordinate descent with per-direction golden-section
// line searches. Feasibility (score-set membership, box, equalities, argmax
// order) is maintained exactly along every move. Intended for K <= 6 and
// convex objectives; multi-start covers piecewise-linear kinks.
OptResult minimize_over_scores(const std::function<double(const Vec&)>& f,
                               const ScoreSet& set,
                               const LinearConstraints& cons = {},
                               const OptimizerSettings& settings = {});

// All compositions k/m on the K-simplex; C(m+K-1, K-1) points.
std::vector<Vec> simplex_grid(int K, int resolution);

// Deterministic uniform stream in [0,1), independent of libstdc++
// distribution implementations.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed);
  double next();
  double next(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace calib
