#include "calib/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "calib/index_sets.hpp"

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// linear interpolation of the curve through (0, 0); nullopt past the grid
std::optional<double> interp_delta(const CalibrationCurve& curve, double eps) {
  double prev_e = 0.0, prev_d = 0.0;
  for (const auto& pt : curve.points) {
    if (pt.failed) continue;
    if (eps <= pt.eps + 1e-15) {
      double span = pt.eps - prev_e;
      if (span <= 0.0) return pt.delta;
      double t = (eps - prev_e) / span;
      return prev_d + t * (pt.delta - prev_d);
    }
    prev_e = pt.eps;
    prev_d = pt.delta;
  }
  return std::nullopt;
}

double max_eps(const CalibrationCurve& curve) {
  double m = 0.0;
  for (const auto& pt : curve.points)
    if (!pt.failed) m = pt.eps;
  return m;
}
}  // namespace

void RiskBoundInput::validate() const {
  if (surrogate_excess < 0.0)
    throw std::domain_error("risk bound: surrogate_excess must be >= 0");
  if (c && *c <= 0.0) throw std::domain_error("risk bound: c must be > 0");
  if (alpha && (*alpha < 0.0 || *alpha > 1.0))
    throw std::domain_error("risk bound: alpha must lie in [0,1]");
}

double convert_dominating(const RiskBoundInput& bound) {
  bound.validate();
  if (!bound.inf_surrogate_risk)
    throw std::domain_error(
        "convert_dominating: inf_surrogate_risk is required");
  return bound.surrogate_excess + *bound.inf_surrogate_risk;
}

void spot_check_domination(const Loss& loss, int samples, std::uint64_t seed) {
  UniformRng rng(seed);
  const ScoreSet& set = loss.score_set();
  for (int n = 0; n < samples; ++n) {
    Vec s(set.K);
    for (auto& x : s)
      x = set.kind == ScoreSetKind::Simplex ? rng.next() : rng.next(-3.0, 3.0);
    set.project(s);
    Vec uniform(set.K, 1.0 / set.K);
    for (int y = 0; y < set.K; ++y) {
      int predicted = worst_tie_index(s, uniform);
      double indicator = predicted != y ? 1.0 : 0.0;
      if (loss.eval_unchecked(s, y) < indicator - 1e-12) {
        std::ostringstream os;
        os << "domination fails at y=" << y << ", s=(";
        for (size_t k = 0; k < s.size(); ++k)
          os << (k ? "," : "") << s[k];
        os << ")";
        throw std::domain_error(os.str());
      }
    }
  }
}

InverseResult convert_calibrated(const CalibrationCurve& curve,
                                 const RiskBoundInput& bound) {
  bound.validate();
  for (const auto& pt : curve.points) {
    if (pt.failed) continue;
    if (pt.eps > 0.0 && pt.delta <= 0.0)
      throw std::domain_error("loss not calibrated on grid");
  }
  return generalized_inverse(curve, bound.surrogate_excess);
}

InverseResult convert_mtnc(const CalibrationCurve& curve,
                           const RiskBoundInput& bound) {
  bound.validate();
  if (!bound.c || !bound.alpha)
    throw std::domain_error("convert_mtnc: c and alpha are required");
  const double c = *bound.c, alpha = *bound.alpha;
  // convexity of the curve (discrete second differences)
  std::vector<const CurvePoint*> pts;
  for (const auto& pt : curve.points)
    if (!pt.failed) pts.push_back(&pt);
  if (pts.size() < 2)
    throw std::invalid_argument("convert_mtnc: curve too short");
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    double d2 = (pts[i + 1]->delta - pts[i]->delta) /
                    (pts[i + 1]->eps - pts[i]->eps) -
                (pts[i]->delta - pts[i - 1]->delta) /
                    (pts[i]->eps - pts[i - 1]->eps);
    if (d2 < -1e-9)
      throw std::domain_error("convert_mtnc: curve is not convex");
  }

  const double x = bound.surrogate_excess;
  auto threshold = [&](double eps) -> std::optional<double> {
    double arg = std::pow(eps, 1.0 - alpha) / (2.0 * c);
    auto d = interp_delta(curve, arg);
    if (!d) return std::nullopt;
    return c * std::pow(eps, alpha) * (*d);
  };

  // locate an upper bracket; the threshold is non-decreasing in eps
  double hi = 1e-6;
  while (true) {
    auto t = threshold(hi);
    if (!t) {
      // argument ran past the curve before reaching the excess
      double emax = max_eps(curve);
      double eps_cap =
          alpha < 1.0 ? std::pow(2.0 * c * emax, 1.0 / (1.0 - alpha)) : kInf;
      auto tcap = eps_cap == kInf ? std::nullopt : threshold(eps_cap * (1 - 1e-12));
      if (tcap && *tcap >= x) {
        hi = eps_cap;
        break;
      }
      return {eps_cap == kInf ? max_eps(curve) : eps_cap, true};
    }
    if (*t >= x) break;
    if (hi > 1e12) return {hi, true};
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    auto t = threshold(mid);
    if (t && *t >= x) hi = mid;
    else lo = mid;
  }
  return {hi, false};
}

ZhangConstant zhang_constant(const Phi& phi, double grid_step,
                             const OptimizerSettings& settings) {
  if (!(grid_step > 0.0 && grid_step < 0.5))
    throw std::invalid_argument("zhang_constant: bad grid step");
  if (!phi.convex() || !phi.lower_bounded())
    throw std::invalid_argument(
        "zhang_constant: phi must be convex and lower-bounded");
  for (double t : {0.25, 0.5, 1.0, 2.0})
    if (!(phi(t) > phi(-t)))
      throw std::invalid_argument(
          "zhang_constant: phi(t) > phi(-t) fails for t > 0");

  ZhangConstant out;
  for (double p = 0.0; p <= 1.0 + 1e-12; p += grid_step)
    out.p_grid.push_back(std::min(p, 1.0));
  out.V.resize(out.p_grid.size());
  for (size_t i = 0; i < out.p_grid.size(); ++i) {
    double p = out.p_grid[i];
    auto obj = [&](double t) { return p * phi(-t) + (1.0 - p) * phi(t); };
    OptResult r = minimize_1d(obj, settings);
    if (!r.converged && !r.boundary_hit) out.diagnostics_ok = false;
    out.V[i] = r.value;
  }
  const double h = grid_step;
  double max_vpp = -kInf;
  for (size_t i = 1; i + 1 < out.p_grid.size(); ++i) {
    double vpp = (out.V[i - 1] - 2.0 * out.V[i] + out.V[i + 1]) / (h * h);
    out.Vpp.push_back(vpp);
    max_vpp = std::max(max_vpp, vpp);
  }
  out.c_prime = -max_vpp;
  if (out.c_prime > 1e-9 && out.diagnostics_ok)
    out.c = std::sqrt(out.c_prime) / 2.0;
  if (!out.Vpp.empty()) {
    double edge = std::max(std::fabs(out.Vpp.front()), std::fabs(out.Vpp.back()));
    double mid = std::fabs(out.Vpp[out.Vpp.size() / 2]);
    out.boundary_caveat = edge > 5.0 * std::max(mid, 1e-12);
  }
  return out;
}

}  // namespace calib
