#ifndef ORLICZ_GRID_HPP
#define ORLICZ_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/expression.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/scalar_field.hpp"

namespace orlicz {

/// Uniform tensor grid on an interval or a rectangle, n nodes per axis.
/// Nodes are numbered row-major with x fastest: k = i + n*j.
class Grid {
 public:
  static Grid line(double a, double b, std::size_t n) { return Grid(1, a, b, 0.0, 0.0, n); }
  static Grid rect(double a, double b, double c, double d, std::size_t n) { return Grid(2, a, b, c, d, n); }
  static Grid on(const Domain& dom, std::size_t n) {
    return dom.dim == 1 ? line(dom.a, dom.b, n) : rect(dom.a, dom.b, dom.c, dom.d, n);
  }

  int dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return n_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  Domain domain() const { return dim_ == 1 ? Domain::interval(a_, b_) : Domain::rectangle(a_, b_, c_, d_); }

  std::size_t node_count() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  std::size_t cell_count() const noexcept { return dim_ == 1 ? n_ - 1 : (n_ - 1) * (n_ - 1); }
  double cell_area() const noexcept { return dim_ == 1 ? hx_ : hx_ * hy_; }

  Point node(std::size_t k) const {
    if (dim_ == 1) return {a_ + static_cast<double>(k) * hx_, 0.0};
    return {a_ + static_cast<double>(k % n_) * hx_, c_ + static_cast<double>(k / n_) * hy_};
  }

  bool on_boundary(std::size_t k) const {
    if (dim_ == 1) return k == 0 || k + 1 == n_;
    const std::size_t i = k % n_, j = k / n_;
    return i == 0 || j == 0 || i + 1 == n_ || j + 1 == n_;
  }

  /// Trapezoidal (tensor-trapezoidal in 2D) quadrature weight of node k.
  double weight(std::size_t k) const {
    auto w1 = [&](std::size_t i, double h) { return (i == 0 || i + 1 == n_) ? 0.5 * h : h; };
    if (dim_ == 1) return w1(k, hx_);
    return w1(k % n_, hx_) * w1(k / n_, hy_);
  }

  /// Node indices of cell c: (left, right) in 1D, (00, 10, 01, 11) in 2D.
  std::array<std::size_t, 4> corners(std::size_t c) const {
    if (dim_ == 1) return {c, c + 1, 0, 0};
    const std::size_t m = n_ - 1;
    const std::size_t i = c % m, j = c / m;
    const std::size_t k = i + n_ * j;
    return {k, k + 1, k + n_, k + n_ + 1};
  }

  Point cell_center(std::size_t c) const {
    if (dim_ == 1) return {a_ + (static_cast<double>(c) + 0.5) * hx_, 0.0};
    const std::size_t m = n_ - 1;
    return {a_ + (static_cast<double>(c % m) + 0.5) * hx_, c_ + (static_cast<double>(c / m) + 0.5) * hy_};
  }

  /// Gradient at the midpoint of cell c: the difference quotient in 1D, the
  /// gradient of the bilinear interpolant in 2D.
  std::array<double, 2> cell_gradient(std::size_t c, std::span<const double> u) const {
    const auto k = corners(c);
    if (dim_ == 1) return {(u[k[1]] - u[k[0]]) / hx_, 0.0};
    return {0.5 * ((u[k[1]] - u[k[0]]) + (u[k[3]] - u[k[2]])) / hx_,
            0.5 * ((u[k[2]] - u[k[0]]) + (u[k[3]] - u[k[1]])) / hy_};
  }

  /// d(gradient)/d(u at corner m) for m = 0..3 (only 0..1 in 1D). Constant per grid.
  std::array<std::array<double, 2>, 4> gradient_stencil() const {
    if (dim_ == 1) return {{{-1.0 / hx_, 0.0}, {1.0 / hx_, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const double ax = 0.5 / hx_, ay = 0.5 / hy_;
    return {{{-ax, -ay}, {ax, -ay}, {-ax, ay}, {ax, ay}}};
  }
  std::size_t corners_per_cell() const noexcept { return dim_ == 1 ? 2 : 4; }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
  }

 private:
  Grid(int dim, double a, double b, double c, double d, std::size_t n) : dim_(dim), n_(n), a_(a), b_(b), c_(c), d_(d) {
    std::vector<std::string> v;
    if (n < 3) v.push_back("grid needs n >= 3 nodes per axis, got " + std::to_string(n));
    if (!(std::isfinite(a) && std::isfinite(b) && b > a)) v.push_back("grid extent needs a < b");
    if (dim == 2 && !(std::isfinite(c) && std::isfinite(d) && d > c)) v.push_back("grid extent needs c < d");
    if (!v.empty()) throw ValidationError(v);
    hx_ = (b - a) / static_cast<double>(n - 1);
    hy_ = dim == 2 ? (d - c) / static_cast<double>(n - 1) : 0.0;
  }

  int dim_;
  std::size_t n_;
  double a_, b_, c_, d_;
  double hx_ = 0.0, hy_ = 0.0;
};

/// Nodal values on a grid.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
      throw ValidationError({"grid function has " + std::to_string(values_.size()) + " values for " +
                             std::to_string(grid_.node_count()) + " nodes"});
    for (double v : values_)
      if (!std::isfinite(v)) throw ValidationError({"grid function value is not finite"});
  }

  static GridFunction zeros(const Grid& g) { return GridFunction(g, std::vector<double>(g.node_count(), 0.0)); }
  static GridFunction constant(const Grid& g, double v) {
    return GridFunction(g, std::vector<double>(g.node_count(), v));
  }
  template <class F>
  static GridFunction sample(const Grid& g, F&& f) {
    std::vector<double> v(g.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(g.node(k));
    return GridFunction(g, std::move(v));
  }
  static GridFunction sample(const Grid& g, const ScalarField& f) {
    return sample(g, [&](Point p) { return f(p); });
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  GridFunction scaled(double s) const {
    auto v = values_;
    for (double& e : v) e *= s;
    return GridFunction(grid_, std::move(v));
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// CSV with header `x,value` or `x,y,value`, one row per node in storage order.
  void write_csv(std::ostream& os) const {
    os << (grid_.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const Point p = grid_.node(k);
      os << format_double(p.x) << ',';
      if (grid_.dim() == 2) os << format_double(p.y) << ',';
      os << format_double(values_[k]) << '\n';
    }
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace orlicz

#endif  // ORLICZ_GRID_HPP
