#include "calib/loss.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double psi_eval(PsiKind kind, double a, double t) {
  switch (kind) {
    case PsiKind::None:
      return 0.0;
    case PsiKind::NegIdentity:
      return -t;
    case PsiKind::NegLog:
      return t > 0.0 ? -std::log(t) : kInf;
    case PsiKind::NegPower:
      return t >= 0.0 ? -std::pow(t, a) / a : kInf;
  }
  return 0.0;
}

double f_eval(FKind kind, double t) {
  switch (kind) {
    case FKind::None:
      return 0.0;
    case FKind::Identity:
      return t;
    case FKind::Log:
      if (t == kInf) return kInf;
      return t > 0.0 ? std::log(t) : -kInf;
  }
  return 0.0;
}

ScoreSetKind expected_set(Family f) {
  switch (f) {
    case Family::WW:
    case Family::CS:
    case Family::Zhang:
    case Family::RRKA:
    case Family::BSKV:
      return ScoreSetKind::Full;
    case Family::LLW:
    case Family::ZZH:
      return ScoreSetKind::SumToZero;
    case Family::Liu:
      return ScoreSetKind::BoxedSumToZero;
    case Family::LR:
      return ScoreSetKind::Simplex;
  }
  return ScoreSetKind::Full;
}
}  // namespace

void LossSpec::validate() const {
  if (K < 2) throw std::invalid_argument("LossSpec: K must be >= 2");
  if (score_set != expected_set(family))
    throw std::invalid_argument("LossSpec: score_set " +
                                calib::to_string(score_set) +
                                " does not match family " +
                                calib::to_string(family));
  if (family == Family::Zhang) {
    if (psi == PsiKind::None)
      throw std::invalid_argument("LossSpec: Zhang family requires psi_kind");
    if (F == FKind::None)
      throw std::invalid_argument("LossSpec: Zhang family requires F_kind");
    if (psi == PsiKind::NegPower && (psi_a <= 0.0 || psi_a >= 1.0))
      throw std::invalid_argument("LossSpec: NegPower exponent must be in (0,1)");
  }
  if (family == Family::BSKV && F == FKind::None)
    throw std::invalid_argument("LossSpec: BSKV requires increasing F_kind");
}

LossSpec LossSpec::ww(Phi phi, int K) {
  return LossSpec{Family::WW, phi, PsiKind::None, 0.5, FKind::None,
                  ScoreSetKind::Full, K};
}
LossSpec LossSpec::cs(Phi phi, int K) {
  return LossSpec{Family::CS, phi, PsiKind::None, 0.5, FKind::None,
                  ScoreSetKind::Full, K};
}
LossSpec LossSpec::llw(Phi phi, int K) {
  return LossSpec{Family::LLW, phi, PsiKind::None, 0.5, FKind::None,
                  ScoreSetKind::SumToZero, K};
}
LossSpec LossSpec::zhang(PsiKind psi, double psi_a, Phi phi, FKind F, int K) {
  return LossSpec{Family::Zhang, phi, psi, psi_a, F, ScoreSetKind::Full, K};
}
LossSpec LossSpec::rrka(Phi phi, int K) {
  return LossSpec{Family::RRKA, phi, PsiKind::None, 0.5, FKind::None,
                  ScoreSetKind::Full, K};
}
LossSpec LossSpec::zzh(Phi phi, int K) {
  return LossSpec{Family::ZZH, phi, PsiKind::None, 0.5, FKind::None,
                  ScoreSetKind::SumToZero, K};
}
LossSpec LossSpec::liu(int K) {
  return LossSpec{Family::Liu, Phi::of(PhiKind::Hinge), PsiKind::None, 0.5,
                  FKind::None, ScoreSetKind::BoxedSumToZero, K};
}
LossSpec LossSpec::bskv(Phi phi, FKind F, int K) {
  return LossSpec{Family::BSKV, phi, PsiKind::None, 0.5, F,
                  ScoreSetKind::Full, K};
}
LossSpec LossSpec::lr(int K) {
  return LossSpec{Family::LR, Phi::of(PhiKind::Exponential), PsiKind::None,
                  0.5, FKind::None, ScoreSetKind::Simplex, K};
}

Loss::Loss(LossSpec spec) : spec_(spec), name_(calib::to_string(spec.family)) {
  spec.validate();
  set_ = ScoreSet{spec.score_set, spec.K};
}

Loss::Loss(std::string name, ScoreSet set, EvalFn eval)
    : set_(set), custom_(std::move(eval)), name_(std::move(name)) {}

double Loss::eval_unchecked(const Vec& s, int y) const {
  if (custom_) return custom_(s, y);
  const LossSpec& sp = *spec_;
  const int K = set_.K;
  switch (sp.family) {
    case Family::WW: {
      double acc = 0.0;
      for (int k = 0; k < K; ++k)
        if (k != y) acc += sp.phi(s[k] - s[y]);
      return acc;
    }
    case Family::CS: {
      double m = -kInf;
      for (int k = 0; k < K; ++k)
        if (k != y) m = std::max(m, sp.phi(s[k] - s[y]));
      return m;
    }
    case Family::LLW: {
      double acc = 0.0;
      for (int k = 0; k < K; ++k)
        if (k != y) acc += sp.phi(s[k]);
      return acc;
    }
    case Family::Zhang: {
      double acc = 0.0;
      for (int k = 0; k < K; ++k) acc += sp.phi(s[k]);
      return psi_eval(sp.psi, sp.psi_a, s[y]) + f_eval(sp.F, acc);
    }
    case Family::RRKA: {
      double acc = sp.phi(-s[y]);
      for (int k = 0; k < K; ++k) acc += sp.phi(s[k]);
      return acc;
    }
    case Family::ZZH:
      return sp.phi(-s[y]);
    case Family::Liu: {
      double v = K - 2.0 - s[y];
      return v > 0.0 ? v : 0.0;
    }
    case Family::BSKV: {
      double acc = 0.0;
      for (int k = 0; k < K; ++k)
        if (k != y) acc += sp.phi(s[k] - s[y]);
      return f_eval(sp.F, acc);
    }
    case Family::LR:
      return s[y] > 0.0 ? -std::log(s[y]) : kInf;
  }
  return 0.0;
}

double Loss::eval(const Vec& s, int y) const {
  if (y < 0 || y >= set_.K)
    throw std::domain_error("eval: class index out of range");
  if (!set_.contains(s))
    throw std::domain_error("eval: score violates " + to_string(set_.kind) +
                            " membership");
  return eval_unchecked(s, y);
}

double Loss::pointwise_risk(const Vec& s, const Vec& p) const {
  check_distribution(p);
  if (!set_.contains(s))
    throw std::domain_error("pointwise_risk: score violates " +
                            to_string(set_.kind) + " membership");
  double acc = 0.0;
  for (int y = 0; y < set_.K; ++y)
    if (p[y] > 0.0) acc += p[y] * eval_unchecked(s, y);
  return acc;
}

double Loss::adjustment(const Vec& s, AdjustmentKind kind) const {
  if (kind == AdjustmentKind::FamilyDefault) {
    if (!spec_) kind = AdjustmentKind::Zero;
    else if (spec_->family == Family::Zhang) kind = AdjustmentKind::ZhangCoupling;
    else if (spec_->family == Family::LLW) kind = AdjustmentKind::SumPhi;
    else kind = AdjustmentKind::Zero;
  }
  switch (kind) {
    case AdjustmentKind::Zero:
      return 0.0;
    case AdjustmentKind::SumPhi: {
      double acc = 0.0;
      for (double x : s) acc += spec_->phi(x);
      return acc;
    }
    case AdjustmentKind::ZhangCoupling: {
      double acc = 0.0;
      for (double x : s) acc += spec_->phi(x);
      return f_eval(spec_->F, acc);
    }
    default:
      return 0.0;
  }
}

double Loss::pseudo_risk(const Vec& s, const Vec& w, AdjustmentKind kind) const {
  for (double x : w)
    if (x < 0.0) throw std::domain_error("pseudo_risk: negative weight");
  double l = adjustment(s, kind);
  double acc = l;
  for (int k = 0; k < static_cast<int>(w.size()); ++k)
    if (w[k] > 0.0) acc += w[k] * (eval_unchecked(s, k) - l);
  return acc;
}

Loss Loss::binary() const {
  if (!spec_) throw std::logic_error("binary(): custom loss has no spec");
  LossSpec sp = *spec_;
  sp.K = 2;
  return Loss(sp);
}

bool Loss::convex_in_scores() const {
  if (!spec_) return false;
  const LossSpec& sp = *spec_;
  if (sp.family == Family::LR) return true;
  if (sp.family == Family::Liu) return true;
  if (sp.family == Family::Zhang) {
    if (sp.F == FKind::Log) return sp.phi.kind == PhiKind::Exponential;
    return sp.phi.convex();
  }
  return sp.phi.convex();
}

bool Loss::piecewise_linear() const {
  if (!spec_) return false;
  const LossSpec& sp = *spec_;
  if (sp.family == Family::Liu) return true;
  if (sp.family == Family::LR || sp.family == Family::Zhang) return false;
  switch (sp.phi.kind) {
    case PhiKind::ZeroOne:
    case PhiKind::Identity:
    case PhiKind::Linear:
    case PhiKind::Hinge:
    case PhiKind::Modulus:
    case PhiKind::Kink:
      return true;
    default:
      return false;
  }
}

void check_distribution(const Vec& p, double tol) {
  double acc = 0.0;
  for (double x : p) {
    if (x < 0.0) throw std::domain_error("distribution: negative entry");
    acc += x;
  }
  if (std::fabs(acc - 1.0) > std::max(tol, 1e-12))
    throw std::domain_error("distribution: entries must sum to 1");
}

Family family_from_string(const std::string& name) {
  if (name == "WW") return Family::WW;
  if (name == "CS") return Family::CS;
  if (name == "LLW") return Family::LLW;
  if (name == "Zhang") return Family::Zhang;
  if (name == "RRKA") return Family::RRKA;
  if (name == "ZZH") return Family::ZZH;
  if (name == "Liu") return Family::Liu;
  if (name == "BSKV") return Family::BSKV;
  if (name == "LR") return Family::LR;
  throw std::invalid_argument("unknown family: " + name);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::WW: return "WW";
    case Family::CS: return "CS";
    case Family::LLW: return "LLW";
    case Family::Zhang: return "Zhang";
    case Family::RRKA: return "RRKA";
    case Family::ZZH: return "ZZH";
    case Family::Liu: return "Liu";
    case Family::BSKV: return "BSKV";
    case Family::LR: return "LR";
  }
  return "?";
}

PsiKind psi_kind_from_string(const std::string& name) {
  if (name == "none") return PsiKind::None;
  if (name == "neg-identity") return PsiKind::NegIdentity;
  if (name == "neg-log") return PsiKind::NegLog;
  if (name == "neg-power") return PsiKind::NegPower;
  throw std::invalid_argument("unknown psi kind: " + name);
}

std::string to_string(PsiKind k) {
  switch (k) {
    case PsiKind::None: return "none";
    case PsiKind::NegIdentity: return "neg-identity";
    case PsiKind::NegLog: return "neg-log";
    case PsiKind::NegPower: return "neg-power";
  }
  return "?";
}

FKind f_kind_from_string(const std::string& name) {
  if (name == "none") return FKind::None;
  if (name == "identity") return FKind::Identity;
  if (name == "log") return FKind::Log;
  throw std::invalid_argument("unknown F kind: " + name);
}

std::string to_string(FKind k) {
  switch (k) {
    case FKind::None: return "none";
    case FKind::Identity: return "identity";
    case FKind::Log: return "log";
  }
  return "?";
}

std::string LossSpec::to_json() const {
  nlohmann::json j;
  j["family"] = calib::to_string(family);
  j["phi.kind"] = calib::to_string(phi.kind);
  j["phi.tau"] = phi.tau;
  j["phi.a"] = phi.a;
  j["phi.b"] = phi.b;
  j["psi_kind"] = calib::to_string(psi);
  j["psi_a"] = psi_a;
  j["F_kind"] = calib::to_string(F);
  j["score_set"] = calib::to_string(score_set);
  j["K"] = K;
  return j.dump(2);
}

LossSpec LossSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("loss spec: invalid JSON: ") +
                                e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("loss spec: missing field ") +
                                  key);
    return j.at(key);
  };
  LossSpec sp;
  sp.family = family_from_string(need("family").get<std::string>());
  if (j.contains("phi.kind"))
    sp.phi.kind = phi_kind_from_string(j.at("phi.kind").get<std::string>());
  if (j.contains("phi.tau")) sp.phi.tau = j.at("phi.tau").get<double>();
  if (j.contains("phi.a")) sp.phi.a = j.at("phi.a").get<double>();
  if (j.contains("phi.b")) sp.phi.b = j.at("phi.b").get<double>();
  if (j.contains("psi_kind"))
    sp.psi = psi_kind_from_string(j.at("psi_kind").get<std::string>());
  if (j.contains("psi_a")) sp.psi_a = j.at("psi_a").get<double>();
  if (j.contains("F_kind"))
    sp.F = f_kind_from_string(j.at("F_kind").get<std::string>());
  sp.score_set = score_set_kind_from_string(need("score_set").get<std::string>());
  sp.K = need("K").get<int>();
  sp.validate();
  return sp;
}

}  // namespace calib
