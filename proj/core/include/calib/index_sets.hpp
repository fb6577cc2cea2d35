#pragma once

#include <vector>

#include "calib/score_set.hpp"

namespace calib {

inline constexpr double kTieTol = 1e-9;

// All indices attaining max_k s_k within an absolute tie tolerance.
std::vector<int> max_selector(const Vec& s, double tie_tol = kTieTol);

// Worst tie-broken selection: among the maximizing coordinates, the one
// with the smallest class probability (smallest index on p-ties).
int worst_tie_index(const Vec& s, const Vec& p, double tie_tol = kTieTol);

// s_j = max_k s_k within tolerance.
bool in_M(const Vec& s, int j, double tie_tol = kTieTol);

// Suboptimality index sets for a class distribution p at level eps.
struct IndexSets {
  std::vector<int> suboptimal;  // j with max_y p_y - p_j >= eps
  std::vector<int> J;           // argmax of p_j over suboptimal j
  int j0 = -1;                  // smallest argmax-p index
  int j_eps = -1;               // smallest element of J, -1 when empty
  bool t_empty() const { return suboptimal.empty(); }
};

IndexSets index_sets(double eps, const Vec& p);

// eps-suboptimality of a score under worst-case tie-breaking.
bool in_T(const Vec& s, double eps, const Vec& p, double tie_tol = kTieTol);

}  // namespace calib
