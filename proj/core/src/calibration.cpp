#include "calib/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "calib/index_sets.hpp"

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  return std::stod(tok);
}

// margin risk of phi(-s_y) on the two-class sum-to-zero line, s = (t, -t)
double margin_risk(const Phi& phi, double t, double q) {
  return q * phi(-t) + (1.0 - q) * phi(t);
}
}  // namespace

void CalibrationCurve::monotone_envelope() {
  double running = -kInf;
  for (auto& pt : points) {
    if (pt.failed) continue;
    running = std::max(running, pt.delta);
    pt.delta = running;
  }
}

bool CalibrationCurve::non_decreasing() const {
  double prev = -kInf;
  for (const auto& pt : points) {
    if (pt.failed) continue;
    if (pt.delta < prev - 1e-12) return false;
    prev = pt.delta;
  }
  return true;
}

std::string CalibrationCurve::to_csv() const {
  size_t wp = 0;
  for (const auto& pt : points) wp = std::max(wp, pt.witness_p.size());
  std::ostringstream os;
  os << "eps,delta,residual";
  for (size_t k = 0; k < wp; ++k) os << ",witness_p" << k;
  os << "\n";
  for (const auto& pt : points) {
    os << fmt(pt.eps) << "," << (pt.failed ? "nan" : fmt(pt.delta)) << ","
       << fmt(pt.residual);
    for (size_t k = 0; k < wp; ++k)
      os << "," << (k < pt.witness_p.size() ? fmt(pt.witness_p[k]) : "");
    os << "\n";
  }
  return os.str();
}

CalibrationCurve CalibrationCurve::from_csv(const std::string& text) {
  CalibrationCurve curve;
  curve.method = CurveMethod::NumericBinary;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("curve csv: empty input");
  if (line.rfind("eps,delta", 0) != 0)
    throw std::invalid_argument("curve csv: missing eps,delta header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    CurvePoint pt;
    if (!std::getline(ls, tok, ',')) continue;
    pt.eps = parse_double(tok);
    if (!std::getline(ls, tok, ','))
      throw std::invalid_argument("curve csv: row missing delta");
    if (tok == "nan") {
      pt.failed = true;
    } else {
      pt.delta = parse_double(tok);
    }
    if (std::getline(ls, tok, ',') && !tok.empty()) pt.residual = parse_double(tok);
    while (std::getline(ls, tok, ','))
      if (!tok.empty()) pt.witness_p.push_back(parse_double(tok));
    curve.points.push_back(std::move(pt));
  }
  for (size_t i = 1; i < curve.points.size(); ++i)
    if (!(curve.points[i].eps > curve.points[i - 1].eps))
      throw std::invalid_argument("curve csv: eps must be strictly increasing");
  return curve;
}

std::string CalibrationCurve::to_json() const {
  nlohmann::json j;
  j["method"] = method == CurveMethod::ClosedForm       ? "closed-form"
                : method == CurveMethod::NumericBinary  ? "numeric-binary"
                                                        : "numeric-deltamax";
  j["points"] = nlohmann::json::array();
  for (const auto& pt : points) {
    nlohmann::json q;
    q["eps"] = pt.eps;
    if (pt.failed) q["delta"] = nullptr;
    else if (pt.delta == kInf) q["delta"] = "inf";
    else q["delta"] = pt.delta;
    q["residual"] = pt.residual;
    if (!pt.witness_p.empty()) q["witness_p"] = pt.witness_p;
    j["points"].push_back(q);
  }
  return j.dump(2);
}

ClosedForm delta_binary_closed(const Phi& phi, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("delta_binary_closed: eps must lie in (0,1)");
  switch (phi.kind) {
    case PhiKind::ZeroOne:
      return {true, eps};
    case PhiKind::Identity:
    case PhiKind::Linear:
      return {false, 0.0};
    case PhiKind::Hinge:
    case PhiKind::Modulus:
      return {true, eps};
    case PhiKind::Squared:
    case PhiKind::TruncatedSquare:
      return {true, eps * eps};
    case PhiKind::Exponential:
      return {true, 1.0 - std::sqrt(1.0 - eps * eps)};
    case PhiKind::Logistic:
      return {true, 0.5 * ((1.0 - eps) * std::log(1.0 - eps) +
                           (1.0 + eps) * std::log(1.0 + eps))};
    case PhiKind::Sigmoid:
      // exact for phi(t) = 1/(1+e^-t); the commonly quoted value eps
      // corresponds to the 1 - tanh normalization (a factor-2 rescale)
      return {true, 0.5 * eps};
    case PhiKind::Kink: {
      if (phi.tau == 0.0) return {false, 0.0};
      if (phi.tau >= 1.0) return {true, eps};
      // piecewise-exact value for tau in (0,1): the infimum sits either at
      // the pre-kink corner or at the hinge corner
      double at_kink = eps * phi.tau;
      double at_corner = 1.0 - 0.5 * (1.0 - eps) * (3.0 - phi.tau);
      return {true, std::max(at_kink, at_corner)};
    }
    default:
      throw std::domain_error("delta_binary_closed: unsupported phi kind");
  }
}

double delta_binary_numeric(const Phi& phi, double eps,
                            const OptimizerSettings& settings,
                            double* residual) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("delta_binary_numeric: eps must lie in (0,1)");
  const double q = 0.5 * (1.0 + eps);
  if (phi.convex()) {
    if (!phi.lower_bounded())
      throw std::domain_error("delta_binary_numeric: phi not lower-bounded");
    auto obj = [&](double t) {
      return (1.0 + eps) * phi(t) + (1.0 - eps) * phi(-t);
    };
    OptResult r = minimize_1d(obj, settings);
    if (residual) *residual = r.residual;
    return phi(0.0) - 0.5 * r.value;
  }
  if (phi.kind == PhiKind::ZeroOne) {
    // piecewise-constant risk: every piece is covered by these probes
    double t_inf_T = kInf, t_inf_all = kInf;
    for (double t : {-2.0, -1.0, -0.5, 0.0}) t_inf_T = std::min(t_inf_T, margin_risk(phi, t, q));
    t_inf_all = t_inf_T;
    for (double t : {0.5, 1.0, 2.0}) t_inf_all = std::min(t_inf_all, margin_risk(phi, t, q));
    if (residual) *residual = 0.0;
    return t_inf_T - t_inf_all;
  }
  // sigmoid: risk is monotone in t; golden section over the constrained
  // and unconstrained ranges
  auto obj = [&](double t) { return margin_risk(phi, t, q); };
  auto [tc, fc] = golden_min(obj, -settings.box_radius, 0.0, 1e-11);
  auto [tu, fu] = golden_min(obj, -settings.box_radius, settings.box_radius, 1e-11);
  (void)tc;
  (void)tu;
  if (residual) *residual = 1e-9;
  return fc - fu;
}

double delta_binary_definition(const Loss& loss, double eps,
                               const OptimizerSettings& settings,
                               double* residual) {
  if (loss.K() != 2)
    throw std::invalid_argument("delta_binary_definition: loss must have K=2");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("delta_binary_definition: eps must lie in (0,1]");
  Vec p0 = {0.5, 0.5};
  Vec pe = {0.5 * (1.0 + eps), 0.5 * (1.0 - eps)};
  auto risk0 = [&](const Vec& s) { return loss.pointwise_risk(s, p0); };
  auto riske = [&](const Vec& s) { return loss.pointwise_risk(s, pe); };
  OptResult r0 = minimize_over_scores(risk0, loss.score_set(), {}, settings);
  OptResult re = minimize_over_scores(riske, loss.score_set(), {}, settings);
  if (residual) *residual = r0.residual + re.residual;
  return r0.value - re.value;
}

namespace {

struct PointwiseCache {
  OptResult uncon;
  std::map<int, OptResult> constrained;  // j -> inf over M(S,j)
};

PointwiseCache solve_pointwise(const Loss& loss, const Vec& p,
                               const std::vector<int>& js,
                               const OptimizerSettings& settings) {
  PointwiseCache out;
  auto risk = [&](const Vec& s) { return loss.pointwise_risk(s, p); };
  out.uncon = minimize_over_scores(risk, loss.score_set(), {}, settings);
  if (out.uncon.unbounded)
    throw std::domain_error(
        "delta_max: pointwise risk unbounded below (Assumption 2 violated)");
  for (int j : js) {
    LinearConstraints cons;
    cons.argmax = {j};
    out.constrained[j] =
        minimize_over_scores(risk, loss.score_set(), cons, settings);
  }
  return out;
}

DeltaMaxResult assemble(const Vec& p, double eps, const PointwiseCache& cache) {
  DeltaMaxResult res;
  res.witness_p = p;
  IndexSets idx = index_sets(eps, p);
  if (idx.t_empty()) {
    res.value = kInf;
    res.raw = kInf;
    return res;
  }
  double tinf = kInf;
  for (int j : idx.suboptimal) {
    const OptResult& r = cache.constrained.at(j);
    if (r.value < tinf) {
      tinf = r.value;
      res.witness_j = j;
      res.witness_s = r.minimizer;
      res.residual = r.residual + cache.uncon.residual;
    }
  }
  res.raw = tinf - cache.uncon.value;
  res.value = std::max(0.0, res.raw);
  return res;
}

std::vector<Vec> embedded_binary_candidates(int K, double eps) {
  std::vector<Vec> out;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      if (i == j) continue;
      Vec p(K, 0.0);
      p[i] = 0.5 * (1.0 + eps);
      p[j] = 0.5 * (1.0 - eps);
      out.push_back(std::move(p));
    }
  return out;
}

bool is_kink_llw(const Loss& loss) {
  return loss.spec() && loss.spec()->family == Family::LLW &&
         loss.spec()->phi.kind == PhiKind::Kink;
}

std::vector<Vec> kink_candidates(int K) {
  std::vector<Vec> out;
  if (K == 3) {
    out.push_back({8.0 / 20, 7.0 / 20, 5.0 / 20});
    out.push_back({6.0 / 15, 7.0 / 15, 2.0 / 15});
  }
  return out;
}

std::vector<int> all_classes(int K) {
  std::vector<int> js(K);
  for (int j = 0; j < K; ++j) js[j] = j;
  return js;
}

}  // namespace

DeltaMaxResult delta_max_pointwise(const Loss& loss, double eps, const Vec& p,
                                   const OptimizerSettings& settings) {
  check_distribution(p);
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("delta_max_pointwise: eps must lie in (0,1]");
  IndexSets idx = index_sets(eps, p);
  if (idx.t_empty()) {
    DeltaMaxResult res;
    res.value = kInf;
    res.raw = kInf;
    res.witness_p = p;
    return res;
  }
  PointwiseCache cache = solve_pointwise(loss, p, idx.suboptimal, settings);
  return assemble(p, eps, cache);
}

DeltaMaxResult delta_max_global(const Loss& loss, double eps, int resolution,
                                const OptimizerSettings& settings) {
  auto sweep = delta_max_global_sweep(loss, {eps}, resolution, settings);
  return sweep.front();
}

std::vector<DeltaMaxResult> delta_max_global_sweep(
    const Loss& loss, const std::vector<double>& eps_list, int resolution,
    const OptimizerSettings& settings) {
  const int K = loss.K();
  if (K > 4)
    throw std::invalid_argument("delta_max_global: exhaustive grid needs K <= 4");
  std::vector<DeltaMaxResult> best(eps_list.size());
  for (auto& b : best) {
    b.value = kInf;
    b.raw = kInf;
  }

  auto consider = [&](size_t ei, const DeltaMaxResult& cand) {
    if (cand.value < best[ei].value) best[ei] = cand;
  };

  // shared composition grid: constrained minima reused across eps
  for (const Vec& p : simplex_grid(K, resolution)) {
    std::vector<int> need;
    for (double eps : eps_list) {
      IndexSets idx = index_sets(eps, p);
      for (int j : idx.suboptimal)
        if (std::find(need.begin(), need.end(), j) == need.end())
          need.push_back(j);
    }
    if (need.empty()) continue;
    PointwiseCache cache = solve_pointwise(loss, p, need, settings);
    for (size_t ei = 0; ei < eps_list.size(); ++ei) {
      IndexSets idx = index_sets(eps_list[ei], p);
      if (idx.t_empty()) continue;
      consider(ei, assemble(p, eps_list[ei], cache));
    }
  }

  for (size_t ei = 0; ei < eps_list.size(); ++ei) {
    std::vector<Vec> extra = embedded_binary_candidates(K, eps_list[ei]);
    if (is_kink_llw(loss)) {
      auto kk = kink_candidates(K);
      extra.insert(extra.end(), kk.begin(), kk.end());
    }
    for (const Vec& p : extra) {
      IndexSets idx = index_sets(eps_list[ei], p);
      if (idx.t_empty()) continue;
      PointwiseCache cache = solve_pointwise(loss, p, idx.suboptimal, settings);
      consider(ei, assemble(p, eps_list[ei], cache));
    }
  }
  return best;
}

InverseResult generalized_inverse(const CalibrationCurve& curve, double x) {
  if (x < 0.0) throw std::domain_error("generalized_inverse: x must be >= 0");
  std::vector<const CurvePoint*> valid;
  for (const auto& pt : curve.points)
    if (!pt.failed) valid.push_back(&pt);
  if (valid.empty())
    throw std::invalid_argument("generalized_inverse: empty curve");
  if (x == 0.0) return {0.0, false};
  double prev_eps = 0.0, prev_delta = 0.0;
  for (const CurvePoint* pt : valid) {
    if (pt->delta >= x) {
      if (pt->delta == kInf || pt->delta <= prev_delta) return {pt->eps, false};
      double t = (x - prev_delta) / (pt->delta - prev_delta);
      return {prev_eps + t * (pt->eps - prev_eps), false};
    }
    prev_eps = pt->eps;
    prev_delta = pt->delta;
  }
  return {valid.back()->eps, true};
}

CalibrationCurve calibration_curve_phi(const Phi& phi,
                                       const std::vector<double>& eps_grid,
                                       CurveMethod method,
                                       const OptimizerSettings& settings) {
  CalibrationCurve curve;
  curve.method = method;
  for (double eps : eps_grid) {
    CurvePoint pt;
    pt.eps = eps;
    try {
      if (method == CurveMethod::ClosedForm) {
        ClosedForm cf = delta_binary_closed(phi, eps);
        if (!cf.calibrated)
          throw std::domain_error("phi has no calibration function");
        pt.delta = cf.delta;
      } else {
        pt.delta = delta_binary_numeric(phi, eps, settings, &pt.residual);
      }
    } catch (const std::domain_error&) {
      pt.failed = true;
    }
    curve.points.push_back(pt);
  }
  curve.monotone_envelope();
  return curve;
}

CalibrationCurve calibration_curve_loss(const Loss& loss,
                                        const std::vector<double>& eps_grid,
                                        CurveMethod method, int resolution,
                                        const OptimizerSettings& settings) {
  CalibrationCurve curve;
  curve.method = method;
  if (method == CurveMethod::NumericDeltaMax) {
    auto sweep = delta_max_global_sweep(loss, eps_grid, resolution, settings);
    for (size_t i = 0; i < eps_grid.size(); ++i) {
      CurvePoint pt;
      pt.eps = eps_grid[i];
      pt.delta = sweep[i].value;
      pt.residual = sweep[i].residual;
      pt.witness_p = sweep[i].witness_p;
      curve.points.push_back(std::move(pt));
    }
  } else {
    Loss b = loss.K() == 2 ? loss : loss.binary();
    for (double eps : eps_grid) {
      CurvePoint pt;
      pt.eps = eps;
      try {
        pt.delta = delta_binary_definition(b, eps, settings, &pt.residual);
      } catch (const std::domain_error&) {
        pt.failed = true;
      }
      curve.points.push_back(pt);
    }
  }
  curve.monotone_envelope();
  return curve;
}

}  // namespace calib
