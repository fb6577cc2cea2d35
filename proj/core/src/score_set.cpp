#include "calib/score_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sum(const Vec& s) { return std::accumulate(s.begin(), s.end(), 0.0); }

// Euclidean projection onto {x >= 0, sum x = 1} (sort-based).
void project_simplex(Vec& s) {
  Vec u = s;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < static_cast<int>(u.size()); ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : s) x = std::max(0.0, x - theta);
}

// Projection onto {sum x = c, x >= lb}: shift, then water-fill the
// violated coordinates. Terminates in at most K rounds.
void project_shifted_box(Vec& s, double c, double lb) {
  const int K = static_cast<int>(s.size());
  double shift = (c - sum(s)) / K;
  for (auto& x : s) x += shift;
  for (int round = 0; round < K; ++round) {
    double deficit = 0.0;
    int free_count = 0;
    for (auto& x : s) {
      if (x < lb) {
        deficit += lb - x;
        x = lb;
      } else if (x > lb) {
        ++free_count;
      }
    }
    if (deficit <= 0.0 || free_count == 0) break;
    double d = deficit / free_count;
    for (auto& x : s)
      if (x > lb) x -= d;
  }
}
}  // namespace

bool ScoreSet::contains(const Vec& s, double sum_tol, double bound_tol) const {
  if (static_cast<int>(s.size()) != K) return false;
  switch (kind) {
    case ScoreSetKind::Full:
      return true;
    case ScoreSetKind::SumToZero:
      return std::fabs(sum(s)) <= sum_tol;
    case ScoreSetKind::Simplex: {
      if (std::fabs(sum(s) - 1.0) > sum_tol) return false;
      for (double x : s)
        if (x < -bound_tol) return false;
      return true;
    }
    case ScoreSetKind::BoxedSumToZero: {
      if (std::fabs(sum(s)) > sum_tol) return false;
      for (double x : s)
        if (x < lower_bound - bound_tol) return false;
      return true;
    }
  }
  return false;
}

Vec ScoreSet::center() const {
  if (kind == ScoreSetKind::Simplex) return Vec(K, 1.0 / K);
  return Vec(K, 0.0);
}

bool ScoreSet::sum_constrained() const { return kind != ScoreSetKind::Full; }

double ScoreSet::coordinate_sum() const {
  return kind == ScoreSetKind::Simplex ? 1.0 : 0.0;
}

double ScoreSet::coordinate_lb() const {
  switch (kind) {
    case ScoreSetKind::Simplex:
      return 0.0;
    case ScoreSetKind::BoxedSumToZero:
      return lower_bound;
    default:
      return -kInf;
  }
}

ScoreSet ScoreSet::binary() const {
  ScoreSet b = *this;
  b.K = 2;
  return b;
}

void ScoreSet::project(Vec& s) const {
  switch (kind) {
    case ScoreSetKind::Full:
      return;
    case ScoreSetKind::SumToZero: {
      double m = sum(s) / K;
      for (auto& x : s) x -= m;
      return;
    }
    case ScoreSetKind::Simplex:
      project_simplex(s);
      return;
    case ScoreSetKind::BoxedSumToZero:
      project_shifted_box(s, 0.0, lower_bound);
      return;
  }
}

ScoreSet ScoreSet::full(int K) { return ScoreSet{ScoreSetKind::Full, K}; }
ScoreSet ScoreSet::sum_to_zero(int K) {
  return ScoreSet{ScoreSetKind::SumToZero, K};
}
ScoreSet ScoreSet::simplex(int K) { return ScoreSet{ScoreSetKind::Simplex, K}; }
ScoreSet ScoreSet::boxed_sum_to_zero(int K, double lower_bound) {
  return ScoreSet{ScoreSetKind::BoxedSumToZero, K, lower_bound};
}

ScoreSetKind score_set_kind_from_string(const std::string& name) {
  if (name == "full") return ScoreSetKind::Full;
  if (name == "sum-to-zero") return ScoreSetKind::SumToZero;
  if (name == "simplex") return ScoreSetKind::Simplex;
  if (name == "boxed-sum-to-zero") return ScoreSetKind::BoxedSumToZero;
  throw std::invalid_argument("unknown score set kind: " + name);
}

std::string to_string(ScoreSetKind k) {
  switch (k) {
    case ScoreSetKind::Full: return "full";
    case ScoreSetKind::SumToZero: return "sum-to-zero";
    case ScoreSetKind::Simplex: return "simplex";
    case ScoreSetKind::BoxedSumToZero: return "boxed-sum-to-zero";
  }
  return "?";
}

}  // namespace calib
