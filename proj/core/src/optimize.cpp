#include "calib/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

double guarded(const std::function<double(double)>& f, double x) {
  double v = f(x);
  return std::isnan(v) ? kInf : v;
}
}  // namespace

UniformRng::UniformRng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
  if (state_ == 0) state_ = 0x853c49e6748fea9bULL;
}

double UniformRng::next() {
  // splitmix64 step
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double UniformRng::next(double lo, double hi) { return lo + (hi - lo) * next(); }

std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                     double lo, double hi, double tol) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = guarded(f, x1), f2 = guarded(f, x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = guarded(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = guarded(f, x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = guarded(f, xm);
  if (f1 < fm) { xm = x1; fm = f1; }
  if (f2 < fm) { xm = x2; fm = f2; }
  return {xm, fm};
}

OptResult minimize_1d(const std::function<double(double)>& f,
                      const OptimizerSettings& settings) {
  const double B = settings.box_radius;
  const double tol = std::max(settings.tol, 1e-12);
  OptResult res;

  double f0 = guarded(f, 0.0);
  if (!std::isfinite(f0) && f0 != kInf)
    throw std::domain_error("minimize_1d: objective not evaluable at 0");

  double h = 1.0;
  double fp = guarded(f, h), fm = guarded(f, -h);
  double a, b;
  if (f0 <= fp && f0 <= fm) {
    a = -h;
    b = h;
  } else {
    double dir = fp < fm ? 1.0 : -1.0;
    double x_prev = 0.0, x = dir * h;
    double fx = dir > 0 ? fp : fm;
    while (true) {
      double x_next = x * 2.0;
      if (std::fabs(x_next) > B) x_next = dir * B;
      double fn = guarded(f, x_next);
      if (fn >= fx) {
        a = std::min(x_prev, x_next);
        b = std::max(x_prev, x_next);
        break;
      }
      x_prev = x;
      x = x_next;
      fx = fn;
      if (std::fabs(x) >= B) {
        // still decreasing at the box: unattained infimum
        res.minimizer = {dir * B};
        res.value = fx;
        res.converged = false;
        res.boundary_hit = true;
        res.unbounded = fx < -1e12;
        res.residual = std::fabs(fx - guarded(f, dir * (B - 1.0)));
        return res;
      }
    }
  }
  auto [xm, fmin] = golden_min(f, a, b, tol);
  res.minimizer = {xm};
  res.value = fmin;
  res.converged = true;
  res.residual = tol;
  res.unbounded = fmin < -1e12;
  return res;
}

namespace {

struct Groups {
  std::vector<std::vector<int>> members;  // coordinate indices per group
  std::vector<int> of;                    // coordinate -> group
  int argmax_group = -1;                  // group required to hold the max
};

Groups build_groups(int K, const LinearConstraints& cons) {
  std::vector<int> parent(K);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (auto [i, j] : cons.equal) unite(i, j);
  for (size_t i = 1; i < cons.argmax.size(); ++i)
    unite(cons.argmax[0], cons.argmax[i]);

  Groups g;
  g.of.assign(K, -1);
  for (int i = 0; i < K; ++i) {
    int r = find(i);
    if (g.of[r] < 0) {
      g.of[r] = static_cast<int>(g.members.size());
      g.members.push_back({});
    }
    g.of[i] = g.of[r];
    g.members[g.of[i]].push_back(i);
  }
  if (!cons.argmax.empty()) g.argmax_group = g.of[cons.argmax[0]];
  return g;
}

Vec group_values(const Groups& g, const Vec& s) {
  Vec v(g.members.size());
  for (size_t a = 0; a < g.members.size(); ++a) {
    double acc = 0.0;
    for (int i : g.members[a]) acc += s[i];
    v[a] = acc / g.members[a].size();
  }
  return v;
}

void scatter(const Groups& g, const Vec& v, Vec& s) {
  for (size_t a = 0; a < g.members.size(); ++a)
    for (int i : g.members[a]) s[i] = v[a];
}

bool feasible_values(const Groups& g, const Vec& v, const ScoreSet& set,
                     double B, double tol = 1e-9) {
  for (double x : v)
    if (std::fabs(x) > B + tol) return false;
  double lb = set.coordinate_lb();
  if (std::isfinite(lb))
    for (double x : v)
      if (x < lb - tol) return false;
  if (set.sum_constrained()) {
    double acc = 0.0;
    for (size_t a = 0; a < g.members.size(); ++a)
      acc += v[a] * g.members[a].size();
    if (std::fabs(acc - set.coordinate_sum()) > tol) return false;
  }
  if (g.argmax_group >= 0) {
    for (size_t a = 0; a < v.size(); ++a)
      if (static_cast<int>(a) != g.argmax_group &&
          v[a] > v[g.argmax_group] + tol)
        return false;
  }
  return true;
}

// Repair an arbitrary start onto the feasible set; falls back to the
// all-tied center, which satisfies every supported constraint pattern.
bool repair(const Groups& g, const ScoreSet& set, double B, Vec& s) {
  for (int round = 0; round < 6; ++round) {
    for (auto& x : s) x = std::clamp(x, -B, B);
    set.project(s);
    Vec v = group_values(g, s);
    if (g.argmax_group >= 0) {
      double m = *std::max_element(v.begin(), v.end());
      // raise the argmax group to the top, rebalance over the others
      double delta = m - v[g.argmax_group];
      if (delta > 0.0) {
        int na = static_cast<int>(g.members[g.argmax_group].size());
        v[g.argmax_group] = m;
        if (set.sum_constrained()) {
          double spread = delta * na / std::max<int>(1, set.K - na);
          for (size_t a = 0; a < v.size(); ++a)
            if (static_cast<int>(a) != g.argmax_group) v[a] -= spread;
        }
      }
    }
    scatter(g, v, s);
    set.project(s);
    Vec vv = group_values(g, s);
    scatter(g, vv, s);
    if (feasible_values(g, group_values(g, s), set, B) &&
        set.contains(s, 1e-9, 1e-9))
      return true;
  }
  s = set.center();
  Vec v = group_values(g, s);
  scatter(g, v, s);
  return feasible_values(g, group_values(g, s), set, B);
}

// Groups in `gain` move by delta per coordinate; group b compensates to
// keep the coordinate sum fixed (-1 for axis moves on unconstrained sets).
// Coalition moves (|gain| = 2) let descent slide along faces where an
// argmax or ordering constraint binds two groups together.
struct Move {
  std::vector<int> gain;
  int b = -1;
};

// Feasible delta interval for the move; delta is the change of v[g] for
// each gaining group.
std::pair<double, double> move_interval(const Groups& g, const Vec& v,
                                        const ScoreSet& set, double B,
                                        const Move& mv) {
  double lo = -kInf, hi = kInf;
  double na = 0.0;
  for (int a : mv.gain) na += static_cast<double>(g.members[a].size());
  const double ratio =
      mv.b >= 0 ? na / static_cast<double>(g.members[mv.b].size()) : 0.0;
  auto coef_of = [&](int grp) -> double {
    for (int a : mv.gain)
      if (grp == a) return 1.0;
    if (grp == mv.b) return -ratio;
    return 0.0;
  };
  // c * delta <= r
  auto add = [&](double c, double r) {
    if (c > 1e-15) hi = std::min(hi, r / c);
    else if (c < -1e-15) lo = std::max(lo, r / c);
  };
  double lb = set.coordinate_lb();
  for (size_t grp = 0; grp < v.size(); ++grp) {
    double c = coef_of(static_cast<int>(grp));
    if (c == 0.0) continue;
    add(c, B - v[grp]);    // v + c d <= B
    add(-c, v[grp] + B);   // v + c d >= -B
    if (std::isfinite(lb)) add(-c, v[grp] - lb);
  }
  if (g.argmax_group >= 0) {
    double cm = coef_of(g.argmax_group);
    for (size_t grp = 0; grp < v.size(); ++grp) {
      if (static_cast<int>(grp) == g.argmax_group) continue;
      // v[grp] + c d <= v[g*] + cm d
      add(coef_of(static_cast<int>(grp)) - cm, v[g.argmax_group] - v[grp]);
    }
  }
  return {lo, hi};
}

}  // namespace

OptResult minimize_over_scores(const std::function<double(const Vec&)>& f,
                               const ScoreSet& set,
                               const LinearConstraints& cons,
                               const OptimizerSettings& settings) {
  const int K = set.K;
  for (int j : cons.argmax)
    if (j < 0 || j >= K)
      throw std::invalid_argument("minimize_over_scores: bad argmax index");
  for (auto [i, j] : cons.equal)
    if (i < 0 || i >= K || j < 0 || j >= K)
      throw std::invalid_argument("minimize_over_scores: bad equality index");

  const double B = settings.box_radius;
  Groups g = build_groups(K, cons);
  const int G = static_cast<int>(g.members.size());

  std::vector<Move> moves;
  for (int a = 0; a < G; ++a) {
    if (!set.sum_constrained()) moves.push_back({{a}, -1});
    for (int b = 0; b < G; ++b)
      if (b != a && G > 1) moves.push_back({{a}, b});
  }
  for (int a1 = 0; a1 < G; ++a1)
    for (int a2 = a1 + 1; a2 < G; ++a2) {
      if (!set.sum_constrained()) moves.push_back({{a1, a2}, -1});
      for (int b = 0; b < G; ++b)
        if (b != a1 && b != a2) moves.push_back({{a1, a2}, b});
    }
  // a fully merged sum-constrained problem is a single point: no moves

  // starting points: center, structured peaks/vertices, random
  std::vector<Vec> starts;
  starts.push_back(set.center());
  double lb = set.coordinate_lb();
  double base = std::isfinite(lb) ? -lb : 1.0;
  for (int grp = 0; grp < G; ++grp) {
    if (g.argmax_group >= 0 && grp != g.argmax_group) continue;
    int ng = static_cast<int>(g.members[grp].size());
    for (double c : {0.5 * base, base, base * (K - ng) / std::max(1, ng)}) {
      Vec s(K, 0.0);
      if (set.kind == ScoreSetKind::Simplex) {
        double eta = 0.02;
        std::fill(s.begin(), s.end(), eta);
        double rest = 1.0 - eta * (K - ng);
        for (int i : g.members[grp]) s[i] = rest / ng;
      } else {
        double other = set.sum_constrained()
                           ? -c * ng / std::max(1, K - ng)
                           : 0.0;
        std::fill(s.begin(), s.end(), other);
        for (int i : g.members[grp]) s[i] = c;
      }
      starts.push_back(std::move(s));
    }
  }
  UniformRng rng(settings.seed);
  for (int r = 0; r < settings.restarts; ++r) {
    Vec s(K);
    double range = (r % 4 == 3) ? B : 2.0;
    for (auto& x : s)
      x = set.kind == ScoreSetKind::Simplex ? rng.next() : rng.next(-range, range);
    starts.push_back(std::move(s));
  }

  OptResult best;
  best.value = kInf;
  long evals = 0;
  const long eval_budget =
      static_cast<long>(settings.max_iters) * 200L;

  for (auto& start : starts) {
    Vec s = start;
    if (!repair(g, set, B, s)) continue;
    Vec v = group_values(g, s);
    scatter(g, v, s);
    double fs = f(s);
    if (std::isnan(fs)) fs = kInf;

    double last_improvement = kInf;
    for (int pass = 0; pass < 200 && evals < eval_budget; ++pass) {
      double pass_improvement = 0.0;
      for (const auto& mv : moves) {
        auto [dlo, dhi] = move_interval(g, v, set, B, mv);
        dlo = std::max(dlo, -2.0 * B);
        dhi = std::min(dhi, 2.0 * B);
        if (!(dhi - dlo > 1e-13)) continue;
        double gain_size = 0.0;
        for (int a : mv.gain) gain_size += g.members[a].size();
        auto apply = [&](Vec& vv, double d) {
          for (int a : mv.gain) vv[a] += d;
          if (mv.b >= 0)
            vv[mv.b] -= d * gain_size /
                        static_cast<double>(g.members[mv.b].size());
        };
        auto line = [&](double d) {
          Vec vv = v;
          apply(vv, d);
          Vec ss(K);
          scatter(g, vv, ss);
          return f(ss);
        };
        double span = dhi - dlo;
        evals += static_cast<long>(std::log(span / 1e-11) / 0.48) + 4;
        auto [d, fd] = golden_min(line, dlo, dhi, 1e-11);
        if (fd < fs - 1e-15) {
          pass_improvement += fs - fd;
          fs = fd;
          apply(v, d);
        }
      }
      last_improvement = pass_improvement;
      if (pass_improvement <= std::max(settings.tol * 1e-2, 1e-13)) break;
    }

    if (fs < best.value) {
      Vec ss(K);
      scatter(g, v, ss);
      best.minimizer = ss;
      best.value = fs;
      best.residual = std::min(last_improvement, 1.0);
      best.converged = last_improvement <= settings.tol;
      best.boundary_hit = false;
      for (double x : ss)
        if (std::fabs(x) >= B - 1e-6) best.boundary_hit = true;
      if (best.boundary_hit) best.converged = false;
    }
  }

  if (!std::isfinite(best.value) && best.value != kInf)
    best.unbounded = true;
  best.unbounded = best.unbounded || best.value < -1e12;
  if (best.minimizer.empty())
    throw std::runtime_error("minimize_over_scores: infeasible constraints");
  return best;
}

namespace {
void compositions(int K, int m, Vec& cur, std::vector<Vec>& out) {
  int idx = static_cast<int>(cur.size());
  if (idx == K - 1) {
    cur.push_back(static_cast<double>(m));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= m; ++k) {
    cur.push_back(static_cast<double>(k));
    compositions(K, m - k, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Vec> simplex_grid(int K, int resolution) {
  if (K < 1 || resolution < 1)
    throw std::invalid_argument("simplex_grid: K and resolution must be >= 1");
  std::vector<Vec> out;
  Vec cur;
  compositions(K, resolution, cur, out);
  for (auto& p : out)
    for (auto& x : p) x /= resolution;
  return out;
}

}  // namespace calib
