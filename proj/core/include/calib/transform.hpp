#pragma once

#include <string>

namespace calib {

// Transformation functions phi used by the margin-style surrogate losses.
// The last three kinds parametrize the extra decoupled-loss variants
// (|t|^a / a, (t)_+^a / a and (a t + b)^2); they are not margin rows.
enum class PhiKind {
  ZeroOne,
  Identity,
  Linear,
  Hinge,
  Modulus,
  Squared,
  TruncatedSquare,
  Exponential,
  Logistic,
  Sigmoid,
  Kink,
  PowerAbs,
  PowerRelu,
  AffineSquared,
};

struct Phi {
  PhiKind kind = PhiKind::Hinge;
  double tau = 0.0;  // Kink only
  double a = 2.0;    // exponent (PowerAbs/PowerRelu) or slope (AffineSquared)
  double b = 0.0;    // offset (AffineSquared)

  double operator()(double t) const;

  bool convex() const;
  bool lower_bounded() const;
  bool non_decreasing() const;

  // Largest t at which phi attains its minimum; -inf when the infimum is
  // approached only as t -> -inf. Requires convex + lower_bounded.
  double t_inf() const;

  static Phi of(PhiKind k);
  static Phi kink(double tau);
  static Phi power_abs(double exponent);
  static Phi power_relu(double exponent);
  static Phi affine_squared(double slope, double offset);
};

// sigma(t) = phi(max(t, t_inf)): phi flattened left of its minimizer.
// Leaves phi unchanged when it is already non-decreasing.
struct EffectiveTransform {
  Phi base;
  double t_low;  // -inf when no flattening applies
  double operator()(double t) const;
  bool flattened() const;
};

EffectiveTransform effective_transform(const Phi& phi);

PhiKind phi_kind_from_string(const std::string& name);
std::string to_string(PhiKind k);

}  // namespace calib
