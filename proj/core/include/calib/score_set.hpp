#pragma once

#include <string>
#include <vector>

namespace calib {

using Vec = std::vector<double>;

enum class ScoreSetKind { Full, SumToZero, Simplex, BoxedSumToZero };

// Domain of score vectors: R^K, the sum-to-zero hyperplane S0, the
// probability simplex, or S0 intersected with {s >= lower_bound}.
struct ScoreSet {
  ScoreSetKind kind = ScoreSetKind::Full;
  int K = 2;
  double lower_bound = -1.0;  // BoxedSumToZero only

  bool contains(const Vec& s, double sum_tol = 1e-9,
                double bound_tol = 1e-12) const;

  // all-zero / all-zero / uniform / all-zero
  Vec center() const;

  bool sum_constrained() const;
  double coordinate_sum() const;  // 0 or 1; only valid when sum_constrained()
  // Lower bound common to all coordinates (-inf when none).
  double coordinate_lb() const;

  // Same kind at K = 2 (binary restriction of the set).
  ScoreSet binary() const;

  // In-place repair onto the set; exact for all kinds.
  void project(Vec& s) const;

  static ScoreSet full(int K);
  static ScoreSet sum_to_zero(int K);
  static ScoreSet simplex(int K);
  static ScoreSet boxed_sum_to_zero(int K, double lower_bound = -1.0);
};

ScoreSetKind score_set_kind_from_string(const std::string& name);
std::string to_string(ScoreSetKind k);

}  // namespace calib
