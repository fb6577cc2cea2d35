#include "calib/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace calib {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double relu(double x) { return x > 0.0 ? x : 0.0; }

// ln(1 + e^t) without overflow for large |t|
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}
}  // namespace

double Phi::operator()(double t) const {
  switch (kind) {
    case PhiKind::ZeroOne:
      return t >= 0.0 ? 1.0 : 0.0;
    case PhiKind::Identity:
      return t;
    case PhiKind::Linear:
      return 1.0 + t;
    case PhiKind::Hinge:
      return relu(1.0 + t);
    case PhiKind::Modulus:
      return std::fabs(1.0 + t);
    case PhiKind::Squared:
      return (1.0 + t) * (1.0 + t);
    case PhiKind::TruncatedSquare: {
      double h = relu(1.0 + t);
      return h * h;
    }
    case PhiKind::Exponential:
      return std::exp(t);
    case PhiKind::Logistic:
      return softplus(t);
    case PhiKind::Sigmoid:
      return 1.0 / (1.0 + std::exp(-t));
    case PhiKind::Kink:
      return relu(1.0 + t) + relu(t - tau);
    case PhiKind::PowerAbs:
      return std::pow(std::fabs(t), a) / a;
    case PhiKind::PowerRelu:
      return std::pow(relu(t), a) / a;
    case PhiKind::AffineSquared: {
      double v = a * t + b;
      return v * v;
    }
  }
  return 0.0;
}

bool Phi::convex() const {
  switch (kind) {
    case PhiKind::ZeroOne:
    case PhiKind::Sigmoid:
      return false;
    case PhiKind::PowerAbs:
    case PhiKind::PowerRelu:
      return a >= 1.0;
    default:
      return true;
  }
}

bool Phi::lower_bounded() const {
  return kind != PhiKind::Identity && kind != PhiKind::Linear;
}

bool Phi::non_decreasing() const {
  switch (kind) {
    case PhiKind::ZeroOne:
    case PhiKind::Identity:
    case PhiKind::Linear:
    case PhiKind::Hinge:
    case PhiKind::TruncatedSquare:
    case PhiKind::Exponential:
    case PhiKind::Logistic:
    case PhiKind::Sigmoid:
    case PhiKind::Kink:
    case PhiKind::PowerRelu:
      return true;
    case PhiKind::Modulus:
    case PhiKind::Squared:
    case PhiKind::PowerAbs:
      return false;
    case PhiKind::AffineSquared:
      return a == 0.0;
  }
  return false;
}

double Phi::t_inf() const {
  if (!convex() || !lower_bounded())
    throw std::invalid_argument("t_inf: phi must be convex and lower-bounded");
  switch (kind) {
    case PhiKind::Hinge:
    case PhiKind::Modulus:
    case PhiKind::Squared:
    case PhiKind::TruncatedSquare:
    case PhiKind::Kink:
      return -1.0;
    case PhiKind::Exponential:
    case PhiKind::Logistic:
      return -kInf;
    case PhiKind::PowerAbs:
      return 0.0;
    case PhiKind::PowerRelu:
      return 0.0;
    case PhiKind::AffineSquared:
      if (a == 0.0) return -kInf;
      return -b / a;
    default:
      throw std::invalid_argument("t_inf: unsupported phi kind");
  }
}

Phi Phi::of(PhiKind k) {
  Phi p;
  p.kind = k;
  return p;
}

Phi Phi::kink(double tau) {
  if (tau < 0.0) throw std::invalid_argument("kink: tau must be >= 0");
  Phi p;
  p.kind = PhiKind::Kink;
  p.tau = tau;
  return p;
}

Phi Phi::power_abs(double exponent) {
  Phi p;
  p.kind = PhiKind::PowerAbs;
  p.a = exponent;
  return p;
}

Phi Phi::power_relu(double exponent) {
  Phi p;
  p.kind = PhiKind::PowerRelu;
  p.a = exponent;
  return p;
}

Phi Phi::affine_squared(double slope, double offset) {
  Phi p;
  p.kind = PhiKind::AffineSquared;
  p.a = slope;
  p.b = offset;
  return p;
}

double EffectiveTransform::operator()(double t) const {
  return base(t > t_low ? t : t_low);
}

bool EffectiveTransform::flattened() const {
  return t_low != -kInf;
}

EffectiveTransform effective_transform(const Phi& phi) {
  if (!phi.convex() || !phi.lower_bounded())
    throw std::invalid_argument(
        "effective_transform: phi must be convex and lower-bounded");
  if (phi.non_decreasing()) return EffectiveTransform{phi, -kInf};
  return EffectiveTransform{phi, phi.t_inf()};
}

PhiKind phi_kind_from_string(const std::string& name) {
  if (name == "zero-one") return PhiKind::ZeroOne;
  if (name == "identity") return PhiKind::Identity;
  if (name == "linear") return PhiKind::Linear;
  if (name == "hinge") return PhiKind::Hinge;
  if (name == "modulus") return PhiKind::Modulus;
  if (name == "squared") return PhiKind::Squared;
  if (name == "truncated-square") return PhiKind::TruncatedSquare;
  if (name == "exponential") return PhiKind::Exponential;
  if (name == "logistic") return PhiKind::Logistic;
  if (name == "sigmoid") return PhiKind::Sigmoid;
  if (name == "kink") return PhiKind::Kink;
  if (name == "power-abs") return PhiKind::PowerAbs;
  if (name == "power-relu") return PhiKind::PowerRelu;
  if (name == "affine-squared") return PhiKind::AffineSquared;
  throw std::invalid_argument("unknown phi kind: " + name);
}

std::string to_string(PhiKind k) {
  switch (k) {
    case PhiKind::ZeroOne: return "zero-one";
    case PhiKind::Identity: return "identity";
    case PhiKind::Linear: return "linear";
    case PhiKind::Hinge: return "hinge";
    case PhiKind::Modulus: return "modulus";
    case PhiKind::Squared: return "squared";
    case PhiKind::TruncatedSquare: return "truncated-square";
    case PhiKind::Exponential: return "exponential";
    case PhiKind::Logistic: return "logistic";
    case PhiKind::Sigmoid: return "sigmoid";
    case PhiKind::Kink: return "kink";
    case PhiKind::PowerAbs: return "power-abs";
    case PhiKind::PowerRelu: return "power-relu";
    case PhiKind::AffineSquared: return "affine-squared";
  }
  return "?";
}

}  // namespace calib
