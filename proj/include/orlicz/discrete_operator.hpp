#ifndef ORLICZ_DISCRETE_OPERATOR_HPP
#define ORLICZ_DISCRETE_OPERATOR_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>

#include "orlicz/errors.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/phi.hpp"

namespace orlicz {

/// A: gradient term only, u = 0 on the boundary.
/// B: gradient term plus phi(x, |u|), no boundary condition.
enum class Variant { A, B };

enum class MaskCheck { Enforce, Skip };

/// Exact: the second derivative of the energy. Majorized: phi'' replaced by
/// max(phi'', phi'/t) along the gradient, which bounds the energy from above
/// along the step when phi' is concave (p < 2) and equals Exact otherwise.
enum class Curvature { Exact, Majorized };

/// The discrete energy
///   E(u) = sum_cells |cell| phi(x_c, |grad u|_c) [+ sum_nodes w phi(x, |u|)] - sum_nodes w f u
/// and its exact gradient. Gradients live at cell midpoints (see Grid), the
/// load and zero-order term use the trapezoidal node weights.
class DiscreteOperator {
 public:
  static constexpr double kHessianEps = 1e-10;

  DiscreteOperator(const PhiFunction& phi, Grid grid, Variant variant = Variant::A, bool normalized = false)
      : phi_(normalized ? phi.normalized_copy() : phi), grid_(std::move(grid)), variant_(variant) {
    if (!phi_.domain().contains(grid_.domain())) throw ValidationError({"grid extends beyond the domain of phi"});
    for (std::size_t k = 0; k < grid_.node_count(); ++k)
      if (variant_ == Variant::B || !grid_.on_boundary(k)) free_.push_back(k);
  }

  const PhiFunction& phi() const noexcept { return phi_; }
  const Grid& grid() const noexcept { return grid_; }
  Variant variant() const noexcept { return variant_; }
  /// Nodes the energy is minimized over: interior nodes for A, all for B.
  const std::vector<std::size_t>& free_nodes() const noexcept { return free_; }

  double energy(const GridFunction& u, const GridFunction& f, MaskCheck mask = MaskCheck::Enforce) const {
    check(u, f, mask);
    std::vector<double> terms;
    terms.reserve(grid_.cell_count() + 2 * grid_.node_count());
    for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
      const auto g = grid_.cell_gradient(c, u.values());
      terms.push_back(grid_.cell_area() * phi_.eval(grid_.cell_center(c), std::hypot(g[0], g[1])));
    }
    for (std::size_t k = 0; k < grid_.node_count(); ++k) {
      const double w = grid_.weight(k);
      if (variant_ == Variant::B) terms.push_back(w * phi_.eval(grid_.node(k), std::abs(u[k])));
      terms.push_back(-w * f[k] * u[k]);
    }
    return pairwise_sum(terms);
  }

  /// Gradient part of the energy only (no zero-order term, no load).
  double gradient_energy(const GridFunction& u) const {
    std::vector<double> terms(grid_.cell_count());
    for (std::size_t c = 0; c < terms.size(); ++c) {
      const auto g = grid_.cell_gradient(c, u.values());
      terms[c] = grid_.cell_area() * phi_.eval(grid_.cell_center(c), std::hypot(g[0], g[1]));
    }
    return pairwise_sum(terms);
  }

  /// dE/du_k for every node; zero at boundary nodes for variant A.
  GridFunction residual(const GridFunction& u, const GridFunction& f, MaskCheck mask = MaskCheck::Enforce) const {
    check(u, f, mask);
    std::vector<double> r = operator_values(u);
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = is_free(k) ? r[k] - grid_.weight(k) * f[k] : 0.0;
    return GridFunction(grid_, std::move(r));
  }

  /// <A(u), w> = sum_k A(u)_k w_k with the load left out.
  double apply(const GridFunction& u, const GridFunction& w) const {
    const std::vector<double> a = operator_values(u);
    std::vector<double> terms(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) terms[k] = is_free(k) ? a[k] * w[k] : 0.0;
    return pairwise_sum(terms);
  }

  /// <A(u) - A(v), u - v>.
  double pairing_discrete(const GridFunction& u, const GridFunction& v) const {
    const std::vector<double> au = operator_values(u), av = operator_values(v);
    std::vector<double> terms(au.size());
    for (std::size_t k = 0; k < au.size(); ++k) terms[k] = is_free(k) ? (au[k] - av[k]) * (u[k] - v[k]) : 0.0;
    return pairwise_sum(terms);
  }

  /// A(u) without load, boundary entries zeroed for variant A.
  std::vector<double> operator_values(const GridFunction& u) const {
    if (!(u.grid() == grid_)) throw ValidationError({"grid function lives on a different grid"});
    std::vector<double> r(grid_.node_count(), 0.0);
    const auto st = grid_.gradient_stencil();
    const std::size_t m = grid_.corners_per_cell();
    for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
      const auto g = grid_.cell_gradient(c, u.values());
      const double mag = std::hypot(g[0], g[1]);
      if (mag == 0.0) continue;  // a_phi(x, 0) = 0
      const double coef = grid_.cell_area() * phi_.d1(grid_.cell_center(c), mag) / mag;
      const auto k = grid_.corners(c);
      for (std::size_t j = 0; j < m; ++j) r[k[j]] += coef * (g[0] * st[j][0] + g[1] * st[j][1]);
    }
    if (variant_ == Variant::B) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double a = std::abs(u[k]);
        if (a > 0.0) r[k] += grid_.weight(k) * phi_.d1(grid_.node(k), a) * (u[k] > 0 ? 1.0 : -1.0);
      }
    }
    if (variant_ == Variant::A)
      for (std::size_t k = 0; k < r.size(); ++k)
        if (grid_.on_boundary(k)) r[k] = 0.0;
    return r;
  }

  /// Second derivative of the energy restricted to the free nodes, with the
  /// curvature at |grad u| < eps (and |u| < eps for B) replaced by phi''(eps) I.
  /// Majorized swaps phi'' for max(phi'', phi'/t) away from zero.
  Eigen::SparseMatrix<double> hessian(const GridFunction& u, Curvature curv = Curvature::Exact) const {
    std::vector<long> slot(grid_.node_count(), -1);
    for (std::size_t i = 0; i < free_.size(); ++i) slot[free_[i]] = static_cast<long>(i);
    std::vector<Eigen::Triplet<double>> trip;
    const auto st = grid_.gradient_stencil();
    const std::size_t m = grid_.corners_per_cell();
    for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
      const Point xc = grid_.cell_center(c);
      const auto g = grid_.cell_gradient(c, u.values());
      const double mag = std::hypot(g[0], g[1]);
      double H[2][2];
      if (mag < kHessianEps) {
        const double d2 = phi_.d2(xc, kHessianEps);
        H[0][0] = H[1][1] = d2;
        H[0][1] = H[1][0] = 0.0;
      } else {
        const double ratio = phi_.d1(xc, mag) / mag;
        double d2 = phi_.d2(xc, mag);
        if (curv == Curvature::Majorized) d2 = std::max(d2, ratio);
        const double n0 = g[0] / mag, n1 = g[1] / mag;
        H[0][0] = d2 * n0 * n0 + ratio * (1 - n0 * n0);
        H[1][1] = d2 * n1 * n1 + ratio * (1 - n1 * n1);
        H[0][1] = H[1][0] = (d2 - ratio) * n0 * n1;
      }
      const auto k = grid_.corners(c);
      for (std::size_t a = 0; a < m; ++a) {
        if (slot[k[a]] < 0) continue;
        for (std::size_t b = 0; b < m; ++b) {
          if (slot[k[b]] < 0) continue;
          double v = 0.0;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) v += st[a][i] * H[i][j] * st[b][j];
          trip.emplace_back(slot[k[a]], slot[k[b]], grid_.cell_area() * v);
        }
      }
    }
    if (variant_ == Variant::B) {
      for (std::size_t k = 0; k < grid_.node_count(); ++k) {
        const double a = std::max(std::abs(u[k]), kHessianEps);
        double d2 = phi_.d2(grid_.node(k), a);
        if (curv == Curvature::Majorized) d2 = std::max(d2, phi_.d1(grid_.node(k), a) / a);
        trip.emplace_back(slot[k], slot[k], grid_.weight(k) * d2);
      }
    }
    const auto nf = static_cast<Eigen::Index>(free_.size());
    Eigen::SparseMatrix<double> h(nf, nf);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

  bool is_free(std::size_t k) const { return variant_ == Variant::B || !grid_.on_boundary(k); }

 private:
  void check(const GridFunction& u, const GridFunction& f, MaskCheck mask) const {
    if (!(u.grid() == grid_) || !(f.grid() == grid_))
      throw ValidationError({"grid function lives on a different grid"});
    if (variant_ == Variant::A && mask == MaskCheck::Enforce)
      for (std::size_t k = 0; k < u.size(); ++k)
        if (grid_.on_boundary(k) && u[k] != 0.0)
          throw MaskViolation("u is nonzero at boundary node " + std::to_string(k));
  }

  PhiFunction phi_;
  Grid grid_;
  Variant variant_;
  std::vector<std::size_t> free_;
};

}  // namespace orlicz

#endif  // ORLICZ_DISCRETE_OPERATOR_HPP
