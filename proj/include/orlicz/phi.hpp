#ifndef ORLICZ_PHI_HPP
#define ORLICZ_PHI_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/scalar_field.hpp"

namespace orlicz {

enum class Family { Power, VarExponent, DoublePhase, LogDoublePhase, LogPower, Sum, Scaled };

inline constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames{{
    {Family::Power, "power"},
    {Family::VarExponent, "var_exponent"},
    {Family::DoublePhase, "double_phase"},
    {Family::LogDoublePhase, "log_double_phase"},
    {Family::LogPower, "log_power"},
    {Family::Sum, "sum"},
    {Family::Scaled, "scaled"},
}};

inline std::string_view family_name(Family f) {
  for (auto [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "unknown";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (auto [fam, n] : kFamilyNames)
    if (n == name) return fam;
  return std::nullopt;
}

/// Declarative description of a Phi-function. Fields are expression strings
/// over x, y; empty means absent.
struct FamilyDescriptor {
  Family family = Family::Power;
  std::string p;
  std::string q;
  std::string mu;
  bool normalized = false;
  double scale = 1.0;
  std::vector<FamilyDescriptor> children;

  bool operator==(const FamilyDescriptor&) const = default;
};

class PhiFunction;
PhiFunction make_family(const FamilyDescriptor& desc, const Domain& domain = Domain::unbounded());

/// A generalized Phi-function phi(x, t), finite for finite t, with closed-form
/// first and second t-derivatives. Immutable; copies share their fields.
///
/// Families (L = log(e + t)):
///   Power, VarExponent   t^p
///   DoublePhase          t^p + mu t^q
///   LogDoublePhase       t^p + mu t^q L
///   LogPower             t^p L
///   Sum                  sum of children
///   Scaled               scale * child
/// With `normalized`, each power term is divided by its exponent
/// (t^p/p, mu t^q/q, mu t^q L/q), which reproduces the usual p-Laplacian and
/// double-phase energies.
class PhiFunction {
 public:
  Family family() const noexcept { return family_; }
  const ScalarField& p() const noexcept { return p_; }
  const std::optional<ScalarField>& q() const noexcept { return q_; }
  const std::optional<ScalarField>& mu() const noexcept { return mu_; }
  bool normalized() const noexcept { return normalized_; }
  double scale() const noexcept { return scale_; }
  std::span<const PhiFunction> children() const noexcept { return children_; }
  const Domain& domain() const noexcept { return domain_; }
  const FamilyDescriptor& descriptor() const noexcept { return descriptor_; }

  double eval(Point x, double t) const {
    check_args(x, t);
    return value(0, x, t);
  }

  /// d/dt phi(x, t); exactly 0 at t = 0.
  double d1(Point x, double t) const {
    check_args(x, t);
    if (t == 0.0) return 0.0;
    return value(1, x, t);
  }

  /// d^2/dt^2 phi(x, t). At t = 0 the limit is returned when it is finite
  /// (all exponents >= 2); otherwise DomainError, since it diverges for
  /// exponents below 2.
  double d2(Point x, double t) const {
    check_args(x, t);
    const double v = value(2, x, t);
    if (!std::isfinite(v)) throw DomainError("second derivative is singular at t = " + format_double(t));
    return v;
  }

  /// True when phi does not depend on x.
  bool x_independent() const {
    if (!p_.is_constant()) return false;
    if (q_ && !q_->is_constant()) return false;
    if (mu_ && !mu_->is_constant()) return false;
    for (const auto& c : children_)
      if (!c.x_independent()) return false;
    return true;
  }

  /// phi(t) = t^2 or t^2/2: the linear (Laplacian) case.
  bool is_quadratic() const {
    return (family_ == Family::Power || family_ == Family::VarExponent) && p_.is_constant() && p_.lo() == 2.0;
  }

  /// Copy with `normalized` set on every leaf. LogPower leaves have no
  /// normalized form and are rejected by validation.
  PhiFunction normalized_copy() const {
    FamilyDescriptor d = descriptor_;
    set_normalized(d);
    return make_family(d, domain_);
  }

 private:
  friend PhiFunction make_family(const FamilyDescriptor&, const Domain&);

  static void set_normalized(FamilyDescriptor& d) {
    if (d.family == Family::Sum || d.family == Family::Scaled) {
      for (auto& c : d.children) set_normalized(c);
    } else {
      d.normalized = true;
    }
  }

  void check_args(Point x, double t) const {
    if (!(t >= 0.0)) throw DomainError("t must be nonnegative, got " + format_double(t));
    if (!domain_.contains(x))
      throw DomainError("point (" + format_double(x.x) + ", " + format_double(x.y) + ") lies outside the domain");
  }

  // order 0: value, 1: first derivative, 2: second derivative.
  static double power_term(int order, double t, double p, bool norm) {
    const double c = norm ? 1.0 / p : 1.0;
    switch (order) {
      case 0: return c * std::pow(t, p);
      case 1: return c * p * std::pow(t, p - 1.0);
      default: return c * p * (p - 1.0) * std::pow(t, p - 2.0);
    }
  }

  static double log_power_term(int order, double t, double q, bool norm) {
    constexpr double e = std::numbers::e;
    const double c = norm ? 1.0 / q : 1.0;
    const double L = std::log(e + t);
    switch (order) {
      case 0: return c * std::pow(t, q) * L;
      case 1: return c * (q * std::pow(t, q - 1.0) * L + std::pow(t, q) / (e + t));
      default:
        return c * (q * (q - 1.0) * std::pow(t, q - 2.0) * L + 2.0 * q * std::pow(t, q - 1.0) / (e + t) -
                    std::pow(t, q) / ((e + t) * (e + t)));
    }
  }

  double value(int order, Point x, double t) const {
    switch (family_) {
      case Family::Power:
      case Family::VarExponent: return power_term(order, t, p_(x), normalized_);
      case Family::LogPower: return log_power_term(order, t, p_(x), normalized_);
      case Family::DoublePhase:
      case Family::LogDoublePhase: {
        double v = power_term(order, t, p_(x), normalized_);
        const double weight = (*mu_)(x);
        if (weight != 0.0) {
          const double qx = (*q_)(x);
          v += weight * (family_ == Family::DoublePhase ? power_term(order, t, qx, normalized_)
                                                        : log_power_term(order, t, qx, normalized_));
        }
        return v;
      }
      case Family::Sum: {
        double v = 0.0;
        for (const auto& c : children_) v += c.value(order, x, t);
        return v;
      }
      case Family::Scaled: return scale_ * children_.front().value(order, x, t);
    }
    return std::nan("");
  }

  Family family_ = Family::Power;
  ScalarField p_;
  std::optional<ScalarField> q_;
  std::optional<ScalarField> mu_;
  bool normalized_ = false;
  double scale_ = 1.0;
  std::vector<PhiFunction> children_;
  Domain domain_;
  FamilyDescriptor descriptor_;
};

namespace detail {

inline void collect_violations(const FamilyDescriptor& d, const Domain& domain, const std::string& prefix,
                               std::vector<std::string>& out) {
  const std::string fam(family_name(d.family));
  auto complain = [&](const std::string& msg) { out.push_back(prefix + fam + ": " + msg); };

  const bool leaf = d.family != Family::Sum && d.family != Family::Scaled;
  const bool wants_q = d.family == Family::DoublePhase || d.family == Family::LogDoublePhase;

  auto check_field = [&](const std::string& name, const std::string& text, bool exponent) {
    if (text.empty()) {
      complain("missing field " + name);
      return;
    }
    try {
      const ScalarField f = ScalarField::parse(text, domain);
      if (exponent && !(f.lo() > 1.0))
        complain("exponent " + name + " must exceed 1 on the domain (lo = " + format_double(f.lo()) + ")");
      if (!exponent && !(f.lo() >= 0.0))
        complain("weight " + name + " must be nonnegative on the domain (lo = " + format_double(f.lo()) + ")");
      if (d.family == Family::Power && name == "p" && !f.is_constant())
        complain("power requires a constant exponent; use var_exponent");
    } catch (const ParseError& e) {
      complain("field " + name + ": " + e.what());
    } catch (const ValidationError& e) {
      for (const auto& v : e.violations()) complain(v);
    }
  };

  if (leaf) {
    check_field("p", d.p, true);
    if (wants_q) {
      check_field("q", d.q, true);
      check_field("mu", d.mu, false);
    } else {
      if (!d.q.empty()) complain("field q is not used by this family");
      if (!d.mu.empty()) complain("field mu is not used by this family");
    }
    if (d.family == Family::LogPower && d.normalized) complain("normalized form is not defined for log_power");
    if (!d.children.empty()) complain("leaf family takes no children");
    if (d.scale != 1.0) complain("scale is only used by the scaled family");
    return;
  }

  if (!d.p.empty() || !d.q.empty() || !d.mu.empty()) complain("combinators take no p/q/mu fields");
  if (d.normalized) complain("normalized applies to leaf families only");
  if (d.family == Family::Sum) {
    if (d.children.empty()) complain("sum needs at least one child");
    if (d.scale != 1.0) complain("scale is only used by the scaled family");
  } else {
    if (d.children.size() != 1) complain("scaled needs exactly one child");
    if (!(d.scale > 0.0) || !std::isfinite(d.scale)) complain("scale must be a positive finite number");
  }
  for (std::size_t i = 0; i < d.children.size(); ++i)
    collect_violations(d.children[i], domain, prefix + "children[" + std::to_string(i) + "] ", out);
}

}  // namespace detail

/// Validates `desc` against `domain` and builds the Phi-function. Throws
/// ValidationError listing every violated invariant.
inline PhiFunction make_family(const FamilyDescriptor& desc, const Domain& domain) {
  std::vector<std::string> violations;
  detail::collect_violations(desc, domain, "", violations);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  PhiFunction phi;
  phi.family_ = desc.family;
  phi.normalized_ = desc.normalized;
  phi.scale_ = desc.scale;
  phi.domain_ = domain;
  phi.descriptor_ = desc;
  if (!desc.p.empty()) phi.p_ = ScalarField::parse(desc.p, domain);
  if (!desc.q.empty()) phi.q_ = ScalarField::parse(desc.q, domain);
  if (!desc.mu.empty()) phi.mu_ = ScalarField::parse(desc.mu, domain);
  for (const auto& c : desc.children) phi.children_.push_back(make_family(c, domain));
  return phi;
}

/// Shorthands for the common x-independent families.
inline PhiFunction power(double p, bool normalized = false, const Domain& domain = Domain::unbounded()) {
  FamilyDescriptor d;
  d.p = format_double(p);
  d.normalized = normalized;
  return make_family(d, domain);
}

inline PhiFunction double_phase(double p, double q, double mu = 1.0, bool normalized = false,
                                const Domain& domain = Domain::unbounded()) {
  FamilyDescriptor d;
  d.family = Family::DoublePhase;
  d.p = format_double(p);
  d.q = format_double(q);
  d.mu = format_double(mu);
  d.normalized = normalized;
  return make_family(d, domain);
}

inline PhiFunction log_power(double p, const Domain& domain = Domain::unbounded()) {
  FamilyDescriptor d;
  d.family = Family::LogPower;
  d.p = format_double(p);
  return make_family(d, domain);
}

/// Closed-form conjugate for the pure power families c t^p (c = 1 or 1/p):
/// the maximizer is t* = (s / (c p))^{1/(p-1)} and phi*(s) = t* s (1 - 1/p).
inline std::optional<double> conjugate_closed_form(const PhiFunction& phi, Point x, double s) {
  if (phi.family() != Family::Power && phi.family() != Family::VarExponent) return std::nullopt;
  if (!(s >= 0.0)) throw DomainError("s must be nonnegative, got " + format_double(s));
  if (!phi.domain().contains(x)) throw DomainError("point lies outside the domain");
  if (s == 0.0) return 0.0;
  const double p = phi.p()(x);
  const double c = phi.normalized() ? 1.0 / p : 1.0;
  const double t_star = std::pow(s / (c * p), 1.0 / (p - 1.0));
  return t_star * s * (1.0 - 1.0 / p);
}

/// phi*(x, s) = sup_{t >= 0} (t s - phi(x, t)) by search. The objective is
/// concave, so its slope s - phi'(x, t) changes sign once: the bracket [0, 1] is
/// grown by x10 until it does, then golden-section search (a ternary search
/// that reuses one probe per step) runs for at most 200 steps.
inline double conjugate_numeric(const PhiFunction& phi, Point x, double s) {
  if (!(s >= 0.0)) throw DomainError("s must be nonnegative, got " + format_double(s));
  if (s == 0.0) {
    phi.eval(x, 0.0);  // domain check
    return 0.0;
  }
  double lo = 0.0, hi = 1.0;
  while (s - phi.d1(x, hi) > 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e12)
      throw NonConvergenceError("conjugate bracket exceeded t = 1e12 at s = " + format_double(s));
  }
  auto objective = [&](double t) { return t * s - phi.eval(x, t); };

  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  double best = std::max({0.0, objective(a), objective(b), fc, fd});
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
      best = std::max(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

/// Closed form for the power families, numeric search otherwise.
inline double conjugate_eval(const PhiFunction& phi, Point x, double s) {
  if (auto v = conjugate_closed_form(phi, x, s)) return *v;
  return conjugate_numeric(phi, x, s);
}

}  // namespace orlicz

#endif  // ORLICZ_PHI_HPP
