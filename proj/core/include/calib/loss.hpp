#pragma once

#include <functional>
#include <optional>
#include <string>

#include "calib/score_set.hpp"
#include "calib/transform.hpp"

namespace calib {

enum class Family { WW, CS, LLW, Zhang, RRKA, ZZH, Liu, BSKV, LR };

// psi component of the background-discrimination (Zhang) family
enum class PsiKind { None, NegIdentity, NegLog, NegPower };

enum class FKind { None, Identity, Log };

enum class AdjustmentKind { FamilyDefault, ZhangCoupling, SumPhi, Zero };

struct LossSpec {
  Family family = Family::LLW;
  Phi phi;
  PsiKind psi = PsiKind::None;
  double psi_a = 0.5;  // exponent for NegPower, in (0,1)
  FKind F = FKind::None;
  ScoreSetKind score_set = ScoreSetKind::SumToZero;
  int K = 2;

  void validate() const;  // family/score-set pairing, parameter ranges

  std::string to_json() const;
  static LossSpec from_json(const std::string& text);

  static LossSpec ww(Phi phi, int K);
  static LossSpec cs(Phi phi, int K);
  static LossSpec llw(Phi phi, int K);
  static LossSpec zhang(PsiKind psi, double psi_a, Phi phi, FKind F, int K);
  static LossSpec rrka(Phi phi, int K);
  static LossSpec zzh(Phi phi, int K);
  static LossSpec liu(int K);
  static LossSpec bskv(Phi phi, FKind F, int K);
  static LossSpec lr(int K);
};

// A surrogate loss together with its score set. Values are extended reals:
// +inf marks evaluation at the boundary of the loss domain (e.g. LR at
// s_y = 0). All operations are pure.
class Loss {
 public:
  using EvalFn = std::function<double(const Vec&, int)>;

  explicit Loss(LossSpec spec);
  // Custom loss hook (tests, ad-hoc probes); adjustment defaults to zero.
  Loss(std::string name, ScoreSet set, EvalFn eval);

  // Checked evaluation: throws std::domain_error when s violates the
  // score-set membership tolerances or y is out of range.
  double eval(const Vec& s, int y) const;
  double eval_unchecked(const Vec& s, int y) const;

  // sum_y p_y L(s, y); p must be a distribution.
  double pointwise_risk(const Vec& s, const Vec& p) const;

  // adjustment l(s): Zhang -> F(sum phi), LLW -> sum phi, otherwise 0.
  double adjustment(const Vec& s,
                    AdjustmentKind kind = AdjustmentKind::FamilyDefault) const;

  // R'(s, w) = l(s) + sum_k w_k (L(s,k) - l(s)) for nonnegative weights w.
  double pseudo_risk(const Vec& s, const Vec& w,
                     AdjustmentKind kind = AdjustmentKind::FamilyDefault) const;

  const ScoreSet& score_set() const { return set_; }
  int K() const { return set_.K; }
  const std::optional<LossSpec>& spec() const { return spec_; }
  const std::string& name() const { return name_; }

  // Same family at K = 2.
  Loss binary() const;

  bool convex_in_scores() const;
  bool piecewise_linear() const;

 private:
  std::optional<LossSpec> spec_;
  ScoreSet set_;
  EvalFn custom_;
  std::string name_;
};

Family family_from_string(const std::string& name);
std::string to_string(Family f);
PsiKind psi_kind_from_string(const std::string& name);
std::string to_string(PsiKind k);
FKind f_kind_from_string(const std::string& name);
std::string to_string(FKind k);

void check_distribution(const Vec& p, double tol = 1e-12);

}  // namespace calib
