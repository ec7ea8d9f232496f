#ifndef ORLICZ_SCALAR_FIELD_HPP
#define ORLICZ_SCALAR_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/expression.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

/// Omega: an interval (a,b) or a rectangle (a,b)x(c,d). The default-constructed
/// domain is unbounded and contains every point; it is what x-independent
/// Phi-functions carry.
struct Domain {
  int dim = 1;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  double c = -std::numeric_limits<double>::infinity();
  double d = std::numeric_limits<double>::infinity();

  static Domain unbounded() { return {}; }
  static Domain interval(double lo, double hi) { return {1, lo, hi, 0.0, 0.0}; }
  static Domain rectangle(double a, double b, double c, double d) { return {2, a, b, c, d}; }

  bool bounded() const {
    return std::isfinite(a) && std::isfinite(b) && (dim == 1 || (std::isfinite(c) && std::isfinite(d)));
  }

  /// Closed containment with a relative slack of 1e-12 of the extent.
  bool contains(Point p) const {
    if (!bounded()) return true;
    const double sx = 1e-12 * std::max(1.0, b - a);
    if (!(p.x >= a - sx && p.x <= b + sx)) return false;
    if (dim == 1) return true;
    const double sy = 1e-12 * std::max(1.0, d - c);
    return p.y >= c - sy && p.y <= d + sy;
  }

  bool contains(const Domain& other) const {
    if (!bounded()) return true;
    if (!other.bounded() || other.dim != dim) return false;
    if (dim == 1) return contains(Point{other.a, 0}) && contains(Point{other.b, 0});
    return contains(Point{other.a, other.c}) && contains(Point{other.b, other.d});
  }

  /// n uniform samples (1D) or a ceil(sqrt(n))^2 tensor lattice (2D), endpoints
  /// included. An unbounded domain yields the single point (0,0).
  std::vector<Point> sample_points(std::size_t n) const {
    if (!bounded()) return {Point{}};
    std::vector<Point> out;
    if (dim == 1) {
      for (double x : linspace(a, b, n)) out.push_back({x, 0.0});
      return out;
    }
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const auto ys = linspace(c, d, side);
    const auto xs = linspace(a, b, side);
    for (double y : ys)
      for (double x : xs) out.push_back({x, y});
    return out;
  }

  bool operator==(const Domain&) const = default;
};

/// An exponent or weight function on Omega: either a constant or an
/// expression in x, y. Bounds of expression fields are estimated by sampling
/// 10^4 points and are flagged non-rigorous.
class ScalarField {
 public:
  enum class Kind { Constant, Expression };

  static constexpr std::size_t kBoundSamples = 10000;

  ScalarField() = default;

  static ScalarField constant(double v) {
    ScalarField f;
    f.kind_ = Kind::Constant;
    f.value_ = v;
    f.lo_ = f.hi_ = v;
    f.text_ = format_double(v);
    return f;
  }

  /// Parses `text`; a variable-free expression collapses to a constant.
  /// Throws ParseError, or ValidationError when a variable-dependent field is
  /// declared over an unbounded domain or evaluates to a non-finite value.
  static ScalarField parse(std::string_view text, const Domain& domain) {
    auto expr = std::make_shared<const Expression>(Expression::parse(text));
    if (expr->is_constant()) {
      ScalarField f = constant((*expr)(Point{}));
      f.text_ = std::string(text);
      if (!std::isfinite(f.value_)) throw ValidationError({"field '" + f.text_ + "' is not finite"});
      return f;
    }
    if (!domain.bounded())
      throw ValidationError({"field '" + std::string(text) + "' depends on x/y but the domain is unbounded"});
    if (domain.dim == 1 && expr->uses_y())
      throw ValidationError({"field '" + std::string(text) + "' uses y on a 1D domain"});

    ScalarField f;
    f.kind_ = Kind::Expression;
    f.expr_ = expr;
    f.text_ = std::string(text);
    f.lo_ = std::numeric_limits<double>::infinity();
    f.hi_ = -std::numeric_limits<double>::infinity();
    for (Point p : domain.sample_points(kBoundSamples)) {
      const double v = (*expr)(p);
      if (!std::isfinite(v))
        throw ValidationError({"field '" + f.text_ + "' is not finite at (" + format_double(p.x) + ", " +
                               format_double(p.y) + ")"});
      f.lo_ = std::min(f.lo_, v);
      f.hi_ = std::max(f.hi_, v);
    }
    return f;
  }

  double operator()(Point p) const { return kind_ == Kind::Constant ? value_ : (*expr_)(p); }

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::Constant; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  /// Sampled bounds are evidence only; constants are exact.
  bool bounds_rigorous() const noexcept { return kind_ == Kind::Constant; }
  const std::string& text() const noexcept { return text_; }

 private:
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::string text_ = "0";
  std::shared_ptr<const Expression> expr_;
};

}  // namespace orlicz

#endif  // ORLICZ_SCALAR_FIELD_HPP
