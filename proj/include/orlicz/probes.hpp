#ifndef ORLICZ_PROBES_HPP
#define ORLICZ_PROBES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "orlicz/discrete_operator.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/phi_props.hpp"
#include "orlicz/report.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

/// Piecewise linear (bilinear in 2D) interpolant of u at p.
inline double interpolate(const GridFunction& u, Point p) {
  const Grid& g = u.grid();
  const Domain d = g.domain();
  auto locate = [&](double v, double lo, double h) {
    double s = (v - lo) / h;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(g.n() - 2)));
    return std::pair{i, std::clamp(s - static_cast<double>(i), 0.0, 1.0)};
  };
  const auto [i, sx] = locate(p.x, d.a, g.hx());
  if (g.dim() == 1) return (1 - sx) * u[i] + sx * u[i + 1];
  const auto [j, sy] = locate(p.y, d.c, g.hy());
  const std::size_t k = i + g.n() * j;
  return (1 - sx) * (1 - sy) * u[k] + sx * (1 - sy) * u[k + 1] + (1 - sx) * sy * u[k + g.n()] +
         sx * sy * u[k + g.n() + 1];
}

/// Random grid function that is zero where the operator fixes values. The
/// magnitude is log-uniform in [1e-2, 1e2].
inline GridFunction random_free_function(const DiscreteOperator& op, SplitMix64& rng) {
  const double mag = std::pow(10.0, rng.uniform(-2.0, 2.0));
  std::vector<double> v(op.grid().node_count(), 0.0);
  for (std::size_t k : op.free_nodes()) v[k] = mag * rng.uniform(-1.0, 1.0);
  return GridFunction(op.grid(), std::move(v));
}

struct RefinementReport {
  std::vector<std::size_t> ns;
  std::vector<double> energies;
  std::vector<std::size_t> iterations;
  std::vector<double> differences;  // sup over level-k nodes of |u_k - I u_{k+1}|
  std::vector<double> shrink;       // differences[k] / differences[k+1]
  bool energies_monotone = true;
  Verdict verdict = Verdict::Inconclusive;
};

inline ordered_json to_json(const RefinementReport& r) {
  ordered_json j;
  j["verdict"] = std::string(verdict_name(r.verdict));
  j["n"] = r.ns;
  j["energies"] = r.energies;
  j["iterations"] = r.iterations;
  j["differences"] = r.differences;
  j["shrink_factors"] = r.shrink;
  j["energies_monotone"] = r.energies_monotone;
  return j;
}

/// Solves on each n of the sequence (same domain, phi, variant) and compares
/// successive solutions at the coarser nodes. Holds when the energies form a
/// monotone sequence and every difference is at least 1.5 times the next.
inline RefinementReport refinement_study(const PhiFunction& phi, const Domain& domain, Variant variant,
                                         bool normalized, const ScalarField& f, std::span<const std::size_t> ns,
                                         const SolveOptions& opt = {}) {
  RefinementReport rep;
  std::vector<GridFunction> sols;
  for (std::size_t n : ns) {
    const DiscreteOperator op(phi, Grid::on(domain, n), variant, normalized);
    const GridFunction load = GridFunction::sample(op.grid(), f);
    SolveResult s = solve_dirichlet(op, load, opt);
    rep.ns.push_back(n);
    rep.energies.push_back(op.energy(s.u, load));
    rep.iterations.push_back(s.iterations);
    sols.push_back(std::move(s.u));
  }
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < sols[k].size(); ++i)
      m = std::max(m, std::abs(sols[k][i] - interpolate(sols[k + 1], sols[k].grid().node(i))));
    rep.differences.push_back(m);
  }
  for (std::size_t k = 0; k + 1 < rep.differences.size(); ++k)
    rep.shrink.push_back(rep.differences[k + 1] > 0 ? rep.differences[k] / rep.differences[k + 1]
                                                    : std::numeric_limits<double>::infinity());
  int dir = 0;
  for (std::size_t k = 0; k + 1 < rep.energies.size(); ++k) {
    const double de = rep.energies[k + 1] - rep.energies[k];
    if (std::abs(de) <= 1e-12 * std::max(std::abs(rep.energies[k]), 1e-300)) continue;
    const int s = de > 0 ? 1 : -1;
    if (dir != 0 && s != dir) rep.energies_monotone = false;
    dir = s;
  }
  const bool shrinking = std::all_of(rep.shrink.begin(), rep.shrink.end(), [](double s) { return s >= 1.5; });
  rep.verdict = rep.energies_monotone && shrinking ? Verdict::Holds : Verdict::Fails;
  return rep;
}

/// <A(u) - A(v), u - v> >= -1e-12 scale over random pairs, scale being
/// sum_k |A(u)_k - A(v)_k| |u_k - v_k|. Every 10th trial uses v = u. The
/// constant `strict` is 1 when the pairing was positive for every pair with
/// |u - v|_inf > 1e-8. Witness: x = (u, v) nodal values, s = |u - v|_inf,
/// t = trial, lhs = 0, rhs = the pairing.
inline PropertyReport monotonicity_probe(const DiscreteOperator& op, std::size_t trials, std::uint64_t seed = 0) {
  PropertyReport rep;
  rep.property = "monotonicity";
  rep.samples = trials;
  struct Outcome {
    double pairing = 0, scale = 0, dist = 0;
    std::vector<double> u, v;
  };
  const auto outs = parallel_map<Outcome>(trials, [&](std::size_t t) {
    SplitMix64 rng = SplitMix64::stream(seed, t);
    const GridFunction u = random_free_function(op, rng);
    const GridFunction v = t % 10 == 9 ? u : random_free_function(op, rng);
    Outcome o;
    const auto au = op.operator_values(u), av = op.operator_values(v);
    std::vector<double> terms(au.size()), mags(au.size());
    for (std::size_t k = 0; k < au.size(); ++k) {
      terms[k] = (au[k] - av[k]) * (u[k] - v[k]);
      mags[k] = std::abs(terms[k]);
      o.dist = std::max(o.dist, std::abs(u[k] - v[k]));
    }
    o.pairing = pairwise_sum(terms);
    o.scale = pairwise_sum(mags);
    if (o.pairing < 0 || (o.pairing == 0 && o.dist > 1e-8)) {
      o.u.assign(u.values().begin(), u.values().end());
      o.v.assign(v.values().begin(), v.values().end());
    }
    return o;
  });
  WitnessSet ws;
  bool strict = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < outs.size(); ++t) {
    const Outcome& o = outs[t];
    if (o.dist > 1e-8) {
      strict = strict && o.pairing > 0.0;
      min_ratio = std::min(min_ratio, o.pairing / o.scale);
    }
    if (o.pairing < -1e-12 * o.scale) {
      std::vector<double> x = o.u;
      x.insert(x.end(), o.v.begin(), o.v.end());
      ws.offer({std::move(x), o.dist, static_cast<double>(t), 0.0, o.pairing});
    }
  }
  rep.constants["strict"] = strict ? 1.0 : 0.0;
  if (std::isfinite(min_ratio)) rep.constants["min_relative_pairing"] = min_ratio;
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

inline std::vector<double> doubling_scales(std::size_t count = 11) {
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = std::ldexp(1.0, static_cast<int>(i));
  return s;
}

namespace detail {

// Zero-boundary direction with |grad u0|_phi = 1.
inline GridFunction unit_direction(const DiscreteOperator& op, SplitMix64& rng) {
  for (;;) {
    const GridFunction u = random_free_function(op, rng);
    const double nrm = gradient_norm(op.phi(), u);
    if (nrm > 0.0) return u.scaled(1.0 / nrm);
  }
}

}  // namespace detail

/// ratio(s) = <A(s u0), s u0> / |grad(s u0)|_phi along a fixed random unit
/// direction. Holds when the log-log slope of ratio against s is at least
/// p~ - 1 - 0.1 (p~ the estimated aInc exponent) and the ratio increases over
/// the upper half of the scales (relative slack 1e-9).
inline PropertyReport coercivity_probe(const DiscreteOperator& op, std::span<const double> scales,
                                       std::uint64_t seed = 0) {
  PropertyReport rep;
  rep.property = "coercivity";
  rep.samples = scales.size();
  SplitMix64 rng(seed);
  const GridFunction u0 = detail::unit_direction(op, rng);
  std::vector<double> ratio;
  for (double s : scales) {
    const GridFunction u = u0.scaled(s);
    ratio.push_back(op.apply(u, u) / gradient_norm(op.phi(), u));
  }
  const double slope = loglog_slope(scales, ratio);
  const auto xs = default_x_samples(op.phi());
  const double p_tilde = estimate_ainc_exponent(op.phi(), xs, default_t_grid()).constants.at("exponent");
  rep.constants["slope"] = slope;
  rep.constants["p_tilde"] = p_tilde;
  WitnessSet ws;
  for (std::size_t i = scales.size() / 2; i + 1 < scales.size(); ++i)
    if (ratio[i] > ratio[i + 1] * (1 + 1e-9)) ws.offer({{}, scales[i + 1], scales[i], ratio[i + 1], ratio[i]});
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
  } else if (std::isnan(slope)) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = slope >= p_tilde - 1.0 - 0.1 ? Verdict::Holds : Verdict::Fails;
  }
  return rep;
}

/// Envelope of the dual norm of A(u) over |grad u|_phi = r, for r = radius,
/// radius/2, ..., radius/128. The dual norm is estimated from below by
/// |<A(u), v>| over unit v: the direction of A(u) itself plus four random
/// ones. Holds when every estimate is finite and the log-log slope of the
/// envelope over r >= 1 (all radii if fewer than two qualify) is at most
/// q~ + 0.1, q~ the estimated aDec exponent.
inline PropertyReport boundedness_probe(const DiscreteOperator& op, double radius, std::size_t trials,
                                        std::uint64_t seed = 0) {
  PropertyReport rep;
  rep.property = "boundedness";
  rep.samples = trials;
  if (radius == 0.0) {
    rep.verdict = Verdict::Holds;
    rep.constants["max_dual_norm"] = 0.0;
    return rep;
  }
  constexpr int kLevels = 8;
  std::vector<double> radii(kLevels), env(kLevels, 0.0);
  for (int k = 0; k < kLevels; ++k) radii[k] = radius * std::ldexp(1.0, -k);
  const PhiFunction& phi = op.phi();
  const auto per = parallel_map<double>(trials, [&](std::size_t t) {
    SplitMix64 rng = SplitMix64::stream(seed, t);
    const double r = radii[t % kLevels];
    const GridFunction u = detail::unit_direction(op, rng).scaled(r);
    const auto au = op.operator_values(u);
    double best = 0.0;
    std::vector<double> aligned(au.size(), 0.0);
    for (std::size_t k : op.free_nodes()) aligned[k] = au[k];
    const GridFunction a(op.grid(), aligned);
    const double an = gradient_norm(phi, a);
    if (an > 0.0) best = std::abs(op.apply(u, a.scaled(1.0 / an)));
    for (int i = 0; i < 4; ++i) best = std::max(best, std::abs(op.apply(u, detail::unit_direction(op, rng))));
    return best;
  });
  bool finite = true;
  for (std::size_t t = 0; t < trials; ++t) {
    finite = finite && std::isfinite(per[t]);
    env[t % kLevels] = std::max(env[t % kLevels], per[t]);
  }
  std::vector<double> fx, fy;
  for (int k = 0; k < kLevels; ++k)
    if (radii[k] >= 1.0) {
      fx.push_back(radii[k]);
      fy.push_back(env[k]);
    }
  if (fx.size() < 2) {
    fx = radii;
    fy = env;
  }
  const double slope = loglog_slope(fx, fy);
  const auto xs = default_x_samples(phi);
  const double q_tilde = estimate_adec_exponent(phi, xs, default_t_grid()).constants.at("exponent");
  rep.constants["fitted_exponent"] = slope;
  rep.constants["q_tilde"] = q_tilde;
  rep.constants["max_dual_norm"] = *std::max_element(env.begin(), env.end());
  if (!finite) {
    rep.verdict = Verdict::Fails;
  } else if (std::isnan(slope)) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = slope <= q_tilde + 0.1 ? Verdict::Holds : Verdict::Fails;
  }
  return rep;
}

/// mu(x) t^{q(x)-1} [log(e+t) + t/(q(x)(e+t))]: the mu-part of the first
/// derivative of the normalized log double phase function.
inline double hlog_integrand(double mu, double q, double t) {
  if (t == 0.0) return 0.0;
  constexpr double e = std::numbers::e;
  return mu * std::pow(t, q - 1.0) * (std::log(e + t) + t / (q * (e + t)));
}

/// Compares d1 of the normalized LogDoublePhase(p, q, mu) with
/// t^{p(x)-1} + hlog_integrand at `count` random (x, t), t log-uniform in
/// [1e-4, 1e4] (every 50th sample at t = 0), relative tolerance 1e-10.
/// Witness: lhs = |d1 - expected|, rhs = 1e-10 |expected|.
inline PropertyReport hlog_integrand_check(const std::string& p, const std::string& q, const std::string& mu,
                                           const Domain& domain, std::size_t count, std::uint64_t seed = 0) {
  FamilyDescriptor d;
  d.family = Family::LogDoublePhase;
  d.p = p;
  d.q = q;
  d.mu = mu;
  d.normalized = true;
  const PhiFunction phi = make_family(d, domain);
  PropertyReport rep;
  rep.property = "hlog_integrand";
  rep.samples = count;
  auto samples = random_samples(phi, count, seed);
  for (std::size_t i = 0; i < samples.size(); i += 50) samples[i].t = 0.0;
  WitnessSet ws;
  double worst = 0.0;
  for (const Sample& s : samples) {
    const double px = phi.p()(s.x), qx = (*phi.q())(s.x), mx = (*phi.mu())(s.x);
    const double want = (s.t == 0.0 ? 0.0 : std::pow(s.t, px - 1.0)) + hlog_integrand(mx, qx, s.t);
    const double err = std::abs(phi.d1(s.x, s.t) - want);
    if (want > 0) worst = std::max(worst, err / want);
    if (err > 1e-10 * want) ws.offer({props::as_coords(s.x, domain.dim), 0.0, s.t, err, 1e-10 * want});
  }
  rep.constants["max_relative_error"] = worst;
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

}  // namespace orlicz

#endif  // ORLICZ_PROBES_HPP
