#ifndef ORLICZ_MONO_INEQ_HPP
#define ORLICZ_MONO_INEQ_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/phi_props.hpp"
#include "orlicz/report.hpp"
#include "orlicz/rng.hpp"

namespace orlicz {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct VectorPair {
  Vec<N> xi{};
  Vec<N> eta{};
};

namespace vec {

template <std::size_t N>
double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const Vec<N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
Vec<N> sub(const Vec<N>& a, const Vec<N>& b) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t N>
Vec<N> scaled(const Vec<N>& a, double s) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = s * a[i];
  return r;
}

template <std::size_t N>
std::vector<double> concat(const VectorPair<N>& p) {
  std::vector<double> out(p.xi.begin(), p.xi.end());
  out.insert(out.end(), p.eta.begin(), p.eta.end());
  return out;
}

}  // namespace vec

/// a_phi(x, xi) = phi'(x, |xi|) xi / |xi|, with a_phi(x, 0) = 0.
template <std::size_t N>
Vec<N> a_phi(const PhiFunction& phi, Point x, const Vec<N>& xi) {
  const double r = vec::norm(xi);
  if (r == 0.0) return Vec<N>{};
  return vec::scaled(xi, phi.d1(x, r) / r);
}

/// (a_phi(x, xi) - a_phi(x, eta)) . (xi - eta)
template <std::size_t N>
double pairing(const PhiFunction& phi, Point x, const VectorPair<N>& pr) {
  return vec::dot(vec::sub(a_phi(phi, x, pr.xi), a_phi(phi, x, pr.eta)), vec::sub(pr.xi, pr.eta));
}

/// Components uniform in [-range, range]. Every 16th pair is a targeted probe
/// instead: |xi - eta| <= 1e-6, eta near or at zero, xi = eta, eta = -xi, or
/// eta a positive multiple of xi.
template <std::size_t N>
std::vector<VectorPair<N>> random_pairs(std::size_t count, std::uint64_t seed, double range = 10.0) {
  SplitMix64 rng(seed);
  auto draw = [&] {
    Vec<N> v;
    for (auto& c : v) c = rng.uniform(-range, range);
    return v;
  };
  auto unit = [&] {
    Vec<N> v = draw();
    const double r = vec::norm(v);
    return r > 0 ? vec::scaled(v, 1.0 / r) : Vec<N>{};
  };
  std::vector<VectorPair<N>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    VectorPair<N>& pr = out[i];
    pr.xi = draw();
    if (i % 16 != 15) {
      pr.eta = draw();
      continue;
    }
    switch ((i / 16) % 6) {
      case 0: {  // nearly equal
        const Vec<N> dir = unit();
        const double h = 1e-6 * rng.uniform();
        for (std::size_t k = 0; k < N; ++k) pr.eta[k] = pr.xi[k] + h * dir[k];
        break;
      }
      case 1: pr.eta = vec::scaled(unit(), 1e-9 * rng.uniform()); break;
      case 2: pr.eta = Vec<N>{}; break;
      case 3: pr.eta = pr.xi; break;
      case 4: pr.eta = vec::scaled(pr.xi, -1.0); break;
      default: pr.eta = vec::scaled(pr.xi, rng.uniform(0.0, 2.0)); break;
    }
  }
  return out;
}

/// C_r = min{2^{2-r}, 1/2} for r >= 2 and r - 1 for 1 < r < 2.
inline double powerlaw_constant(double r) {
  if (!(r > 1.0)) throw DomainError("power-law exponent must exceed 1");
  return r >= 2.0 ? std::min(std::pow(2.0, 2.0 - r), 0.5) : r - 1.0;
}

namespace detail {

template <std::size_t N>
Vec<N> power_field(const Vec<N>& v, double r) {
  const double n = vec::norm(v);
  if (n == 0.0) return Vec<N>{};
  return vec::scaled(v, std::pow(n, r - 2.0));
}

// Left side of the power-law inequality (weighted in the r < 2 branch), its
// right side, and the magnitude of the terms that enter the left side.
struct PowerlawSides {
  double lhs;
  double rhs;
  double scale;
};

template <std::size_t N>
PowerlawSides powerlaw_sides(double r, const VectorPair<N>& pr) {
  const Vec<N> diff = vec::sub(pr.xi, pr.eta);
  const double d = vec::norm(diff);
  const double nx = vec::norm(pr.xi), ne = vec::norm(pr.eta);
  const double core = vec::dot(vec::sub(power_field(pr.xi, r), power_field(pr.eta, r)), diff);
  const double term_scale = (std::pow(nx, r - 1.0) + std::pow(ne, r - 1.0)) * d;
  const double c = powerlaw_constant(r);
  if (r >= 2.0) return {core, c * std::pow(d, r), term_scale};
  const double w = std::pow(nx + ne, 2.0 - r);
  return {w * core, c * d * d, w * term_scale};
}

template <std::size_t N>
PropertyReport powerlaw_check(double r, std::span<const VectorPair<N>> pairs, const char* name) {
  PropertyReport rep;
  rep.property = name;
  rep.samples = pairs.size();
  struct Outcome {
    bool violated = false;
    double ratio = std::numeric_limits<double>::infinity();
    PowerlawSides sides{};
  };
  const auto outcomes = parallel_map<Outcome>(pairs.size(), [&](std::size_t i) {
    Outcome o;
    const auto& pr = pairs[i];
    if (vec::norm(pr.xi) == 0.0 && vec::norm(pr.eta) == 0.0) return o;  // both sides vanish
    o.sides = powerlaw_sides(r, pr);
    // lhs >= rhs is the inequality; a violation is rhs - lhs > 1e-12 * scale.
    o.violated = o.sides.rhs - o.sides.lhs > 1e-12 * (o.sides.scale + o.sides.rhs);
    if (o.sides.rhs > 0.0) o.ratio = o.sides.lhs / o.sides.rhs * powerlaw_constant(r);
    return o;
  });
  WitnessSet ws;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (o.violated)
      ws.offer({vec::concat(pairs[i]), vec::norm(pairs[i].xi), vec::norm(pairs[i].eta), o.sides.rhs, o.sides.lhs});
    best = std::min(best, o.ratio);
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  rep.constants["C_r"] = powerlaw_constant(r);
  if (std::isfinite(best)) rep.constants["sampled_constant"] = best;
  return rep;
}

}  // namespace detail

/// (|xi|^{r-2} xi - |eta|^{r-2} eta) . (xi - eta) >= C_r |xi - eta|^r for r >= 2.
/// Witnesses store lhs = C_r |xi-eta|^r and rhs = the pairing (the form lhs <= rhs).
template <std::size_t N>
PropertyReport verify_powerlaw_ge2(double r, std::span<const VectorPair<N>> pairs) {
  if (!(r >= 2.0)) throw DomainError("verify_powerlaw_ge2 needs r >= 2");
  return detail::powerlaw_check(r, pairs, "powerlaw_ge2");
}

/// (|xi| + |eta|)^{2-r} (|xi|^{r-2} xi - |eta|^{r-2} eta) . (xi - eta) >= (r-1) |xi - eta|^2
/// for 1 < r < 2; pairs with xi = eta = 0 are skipped.
template <std::size_t N>
PropertyReport verify_powerlaw_lt2(double r, std::span<const VectorPair<N>> pairs) {
  if (!(r > 1.0 && r < 2.0)) throw DomainError("verify_powerlaw_lt2 needs 1 < r < 2");
  return detail::powerlaw_check(r, pairs, "powerlaw_lt2");
}

/// Dispatches to the branch matching r.
template <std::size_t N>
PropertyReport verify_powerlaw(double r, std::span<const VectorPair<N>> pairs) {
  return r >= 2.0 ? verify_powerlaw_ge2<N>(r, pairs) : verify_powerlaw_lt2<N>(r, pairs);
}

struct BestConstantOptions {
  std::size_t grid = 1000;         // per axis of the (eta1, eta2) box
  std::size_t starts = 10;         // local refinements from the best cells
  std::size_t csv_stride = 10;     // keep every stride-th grid row/column in the table
};

struct BestConstantEstimate {
  double value = std::numeric_limits<double>::infinity();
  double eta1 = 0.0;
  double eta2 = 0.0;
  struct Row {
    double eta1, eta2, ratio;
  };
  std::vector<Row> table;  // subsampled grid for plotting
};

/// Ratio of the two sides of the power-law inequality (with C_r dropped) at
/// xi = (1, 0), eta = (eta1, eta2). Infinite at eta = xi.
inline double powerlaw_reduced_ratio(double r, double eta1, double eta2) {
  const VectorPair<2> pr{{1.0, 0.0}, {eta1, eta2}};
  const double d = std::hypot(1.0 - eta1, eta2);
  if (d < 1e-12) return std::numeric_limits<double>::infinity();
  const auto sides = detail::powerlaw_sides(r, pr);
  return sides.lhs / (sides.rhs / powerlaw_constant(r));
}

namespace detail {

// Nelder-Mead on a box, clamping trial points into it.
template <class F>
std::array<double, 3> nelder_mead_box(F&& f, double x0, double y0, double step, double xlo, double xhi, double ylo,
                                      double yhi, int max_iter = 400) {
  auto clamp = [&](std::array<double, 3>& p) {
    p[0] = std::clamp(p[0], xlo, xhi);
    p[1] = std::clamp(p[1], ylo, yhi);
    p[2] = f(p[0], p[1]);
  };
  std::array<std::array<double, 3>, 3> s{{{x0, y0, 0}, {x0 + step, y0, 0}, {x0, y0 + step, 0}}};
  for (auto& p : s) clamp(p);
  for (int it = 0; it < max_iter; ++it) {
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
    if (std::abs(s[2][2] - s[0][2]) <= 1e-15 * (std::abs(s[0][2]) + 1e-300) &&
        std::hypot(s[2][0] - s[0][0], s[2][1] - s[0][1]) < 1e-14)
      break;
    const double cx = 0.5 * (s[0][0] + s[1][0]), cy = 0.5 * (s[0][1] + s[1][1]);
    std::array<double, 3> refl{cx + (cx - s[2][0]), cy + (cy - s[2][1]), 0};
    clamp(refl);
    if (refl[2] < s[0][2]) {
      std::array<double, 3> exp{cx + 2 * (cx - s[2][0]), cy + 2 * (cy - s[2][1]), 0};
      clamp(exp);
      s[2] = exp[2] < refl[2] ? exp : refl;
    } else if (refl[2] < s[1][2]) {
      s[2] = refl;
    } else {
      std::array<double, 3> con{cx + 0.5 * (s[2][0] - cx), cy + 0.5 * (s[2][1] - cy), 0};
      clamp(con);
      if (con[2] < s[2][2]) {
        s[2] = con;
      } else {
        for (int k = 1; k < 3; ++k) {
          s[k][0] = s[0][0] + 0.5 * (s[k][0] - s[0][0]);
          s[k][1] = s[0][1] + 0.5 * (s[k][1] - s[0][1]);
          clamp(s[k]);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  return s[0];
}

}  // namespace detail

/// Estimates the best constant of the power-law inequality. Rotation
/// invariance and homogeneity reduce the search to xi = (1, 0) and
/// eta = (eta1, eta2) in [-1, 1] x [0, 1]; a grid scan is followed by
/// Nelder-Mead from the best cells. Every value is attained by a real pair, so
/// the estimate bounds the true infimum from above.
inline BestConstantEstimate estimate_best_constant_powerlaw(double r, const BestConstantOptions& opt = {}) {
  if (!(r > 1.0)) throw DomainError("power-law exponent must exceed 1");
  const std::size_t n = std::max<std::size_t>(opt.grid, 2);
  const auto e1 = linspace(-1.0, 1.0, n), e2 = linspace(0.0, 1.0, n);
  const auto rows = parallel_map<std::vector<double>>(n, [&](std::size_t j) {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = powerlaw_reduced_ratio(r, e1[i], e2[j]);
    return row;
  });

  BestConstantEstimate est;
  struct Cell {
    double v;
    std::size_t i, j;
  };
  std::vector<Cell> best;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rows[j][i];
      if (opt.csv_stride > 0 && i % opt.csv_stride == 0 && j % opt.csv_stride == 0 && std::isfinite(v))
        est.table.push_back({e1[i], e2[j], v});
      if (best.size() < opt.starts || v < best.back().v) {
        best.push_back({v, i, j});
        std::sort(best.begin(), best.end(), [](const Cell& a, const Cell& b) { return a.v < b.v; });
        if (best.size() > opt.starts) best.pop_back();
      }
    }
  for (const Cell& c : best) {
    if (c.v < est.value) {
      est.value = c.v;
      est.eta1 = e1[c.i];
      est.eta2 = e2[c.j];
    }
    const auto m = detail::nelder_mead_box([&](double a, double b) { return powerlaw_reduced_ratio(r, a, b); },
                                           e1[c.i], e2[c.j], 2.0 / static_cast<double>(n), -1.0, 1.0, 0.0, 1.0);
    if (m[2] < est.value) {
      est.value = m[2];
      est.eta1 = m[0];
      est.eta2 = m[1];
    }
  }
  return est;
}

/// Sampled constant C_x of pairing >= C_x phi''(x, |xi|+|eta|) |xi-eta|^2 at
/// one x. (Mono1) at x is checked first; if it does not hold the report is
/// inconclusive. Pairs with xi = eta are skipped. Witnesses: lhs = 0,
/// rhs = the pairing.
template <std::size_t N>
PropertyReport verify_generalized(const PhiFunction& phi, Point x, std::span<const VectorPair<N>> pairs) {
  PropertyReport rep;
  rep.property = "generalized_monotonicity";
  rep.samples = pairs.size();
  const Point one[] = {x};
  if (!mono1_constants(phi, one, default_t_grid()).holds()) return rep;

  struct Outcome {
    bool skip = true;
    double pairing = 0.0;
    double ratio = 0.0;
  };
  const auto outcomes = parallel_map<Outcome>(pairs.size(), [&](std::size_t i) {
    Outcome o;
    const auto& pr = pairs[i];
    const double d = vec::norm(vec::sub(pr.xi, pr.eta));
    if (d == 0.0) return o;
    o.skip = false;
    o.pairing = pairing(phi, x, pr);
    o.ratio = o.pairing / (phi.d2(x, vec::norm(pr.xi) + vec::norm(pr.eta)) * d * d);
    return o;
  });
  WitnessSet ws;
  double inf_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (o.skip) continue;
    if (!(o.ratio > 0.0))
      ws.offer({vec::concat(pairs[i]), vec::norm(pairs[i].xi), vec::norm(pairs[i].eta), 0.0, o.pairing});
    inf_ratio = std::min(inf_ratio, o.ratio);
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  if (!std::isfinite(inf_ratio)) return rep;
  rep.verdict = Verdict::Holds;
  rep.constants["C_x"] = inf_ratio;
  return rep;
}

}  // namespace orlicz

#endif  // ORLICZ_MONO_INEQ_HPP
