#include "calib/index_sets.hpp"

#include <algorithm>

namespace calib {

std::vector<int> max_selector(const Vec& s, double tie_tol) {
  double m = *std::max_element(s.begin(), s.end());
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(s.size()); ++k)
    if (s[k] >= m - tie_tol) out.push_back(k);
  return out;
}

int worst_tie_index(const Vec& s, const Vec& p, double tie_tol) {
  auto ties = max_selector(s, tie_tol);
  int worst = ties.front();
  for (int j : ties)
    if (p[j] < p[worst]) worst = j;
  return worst;
}

bool in_M(const Vec& s, int j, double tie_tol) {
  double m = *std::max_element(s.begin(), s.end());
  return s[j] >= m - tie_tol;
}

IndexSets index_sets(double eps, const Vec& p) {
  IndexSets out;
  double pmax = *std::max_element(p.begin(), p.end());
  for (int j = 0; j < static_cast<int>(p.size()); ++j) {
    if (p[j] >= pmax - kTieTol && out.j0 < 0) out.j0 = j;
    if (pmax - p[j] >= eps - 1e-12) out.suboptimal.push_back(j);
  }
  if (!out.suboptimal.empty()) {
    double best = p[out.suboptimal.front()];
    for (int j : out.suboptimal) best = std::max(best, p[j]);
    for (int j : out.suboptimal)
      if (p[j] >= best - kTieTol) out.J.push_back(j);
    out.j_eps = out.J.front();
  }
  return out;
}

bool in_T(const Vec& s, double eps, const Vec& p, double tie_tol) {
  double pmax = *std::max_element(p.begin(), p.end());
  int j = worst_tie_index(s, p, tie_tol);
  return pmax - p[j] >= eps - 1e-12;
}

}  // namespace calib
