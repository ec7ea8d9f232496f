#ifndef ORLICZ_PHI_PROPS_HPP
#define ORLICZ_PHI_PROPS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/report.hpp"
#include "orlicz/rng.hpp"

namespace orlicz {

/// 600 log-spaced points on [1e-6, 1e6].
inline std::vector<double> default_t_grid() { return log_grid(1e-6, 1e6, 600); }

/// 64 uniform points of Omega (8x8 in 2D); a single point for x-independent phi.
inline std::vector<Point> default_x_samples(const PhiFunction& phi) {
  if (!phi.domain().bounded()) return {Point{}};
  return phi.domain().sample_points(64);
}

/// One (x, s, t) sample for the two-argument inequalities.
struct Sample {
  Point x;
  double s = 0.0;
  double t = 0.0;
};

/// x uniform on Omega, s and t log-uniform on [t_lo, t_hi].
inline std::vector<Sample> random_samples(const PhiFunction& phi, std::size_t count, std::uint64_t seed,
                                          double t_lo = 1e-4, double t_hi = 1e4) {
  SplitMix64 rng(seed);
  const Domain& dom = phi.domain();
  const double la = std::log(t_lo), lb = std::log(t_hi);
  std::vector<Sample> out(count);
  for (auto& smp : out) {
    if (dom.bounded()) {
      smp.x.x = rng.uniform(dom.a, dom.b);
      smp.x.y = dom.dim == 2 ? rng.uniform(dom.c, dom.d) : 0.0;
    }
    smp.s = std::exp(rng.uniform(la, lb));
    smp.t = std::exp(rng.uniform(la, lb));
  }
  return out;
}

/// Every (x, s, t) combination of the given samples.
inline std::vector<Sample> grid_samples(std::span<const Point> xs, std::span<const double> ts) {
  std::vector<Sample> out;
  out.reserve(xs.size() * ts.size() * ts.size());
  for (Point x : xs)
    for (double s : ts)
      for (double t : ts) out.push_back({x, s, t});
  return out;
}

namespace props {

inline constexpr double kAlmostLimit = 1.01;     // constant admitted by the exponent search
inline constexpr double kExactSlack = 1e-9;      // a <= 1 + kExactSlack reports as exactly monotone
inline constexpr int kExponentLattice = 1000;    // exponents are k / 1000
inline constexpr int kMinLattice = 1000;         // p, q > 1 ... <= 50
inline constexpr int kMaxLattice = 50000;
inline constexpr double kRefineChange = 0.01;    // tolerated relative change under grid refinement
inline constexpr double kMaxAlmostConstant = 1e3;  // mono2: larger constants count as "not almost monotone"
inline constexpr double kMinTailSlope = 0.05;      // mono2: growth rate that counts as divergence

inline double report_constant(double a) { return a <= 1.0 + kExactSlack ? 1.0 : a; }

inline std::vector<double> as_coords(Point p, int dim) {
  return dim == 2 ? std::vector<double>{p.x, p.y} : std::vector<double>{p.x};
}

/// log phi(x, t) for every (x, t); -inf where phi underflows to zero.
struct LogTable {
  std::vector<double> log_t;
  std::vector<std::vector<double>> log_phi;
};

inline LogTable log_table(const PhiFunction& phi, std::span<const Point> xs, std::span<const double> ts) {
  LogTable tab;
  for (double t : ts) tab.log_t.push_back(std::log(t));
  for (Point x : xs) {
    std::vector<double> row;
    row.reserve(ts.size());
    for (double t : ts) {
      const double v = phi.eval(x, t);
      row.push_back(v > 0.0 && std::isfinite(v) ? std::log(v) : -std::numeric_limits<double>::infinity());
    }
    tab.log_phi.push_back(std::move(row));
  }
  return tab;
}

/// log of max_{i<j} g_i / g_j for the sequence exp(lg); skips -inf entries.
inline double log_inc_constant(std::span<const double> lg) {
  double run_min = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = lg.size(); k-- > 0;) {
    if (!std::isfinite(lg[k])) continue;
    run_min = std::min(run_min, lg[k]);
    worst = std::max(worst, lg[k] - run_min);
  }
  return worst;
}

/// log of max_{i<j} g_j / g_i.
inline double log_dec_constant(std::span<const double> lg) {
  double run_max = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = lg.size(); k-- > 0;) {
    if (!std::isfinite(lg[k])) continue;
    run_max = std::max(run_max, lg[k]);
    worst = std::max(worst, run_max - lg[k]);
  }
  return worst;
}

/// Worst almost-monotonicity constant of t^{-e} phi(x, t) over all x.
inline double shifted_constant(const LogTable& tab, double e, bool increasing) {
  double worst = 0.0;
  std::vector<double> seq(tab.log_t.size());
  for (const auto& row : tab.log_phi) {
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = row[i] - e * tab.log_t[i];
    worst = std::max(worst, increasing ? log_inc_constant(seq) : log_dec_constant(seq));
  }
  return std::exp(worst);
}

inline PropertyReport exponent_search(const PhiFunction& phi, std::span<const Point> xs,
                                      std::span<const double> ts, bool increasing) {
  PropertyReport rep;
  rep.property = increasing ? "ainc_exponent" : "adec_exponent";
  rep.samples = xs.size() * ts.size();
  if (ts.size() < 2) throw DomainError("t grid needs at least two points");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1])) throw DomainError("t grid must be strictly increasing");

  const LogTable tab = log_table(phi, xs, ts);
  auto feasible = [&](int k) {
    return shifted_constant(tab, static_cast<double>(k) / kExponentLattice, increasing) <= kAlmostLimit;
  };

  int found = -1;
  if (increasing) {
    // largest feasible k in (kMinLattice, kMaxLattice]; feasibility is downward closed.
    int lo = kMinLattice + 1, hi = kMaxLattice;
    if (feasible(lo)) {
      while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        if (feasible(mid))
          lo = mid;
        else
          hi = mid - 1;
      }
      found = lo;
    }
  } else {
    // smallest feasible k in [kMinLattice, kMaxLattice]; feasibility is upward closed.
    int lo = kMinLattice, hi = kMaxLattice;
    if (feasible(hi)) {
      while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (feasible(mid))
          hi = mid;
        else
          lo = mid + 1;
      }
      found = lo;
    }
  }
  if (found < 0) return rep;

  const double e = static_cast<double>(found) / kExponentLattice;
  rep.verdict = Verdict::Holds;
  rep.constants["exponent"] = e;
  rep.constants["a"] = report_constant(shifted_constant(tab, e, increasing));
  return rep;
}

}  // namespace props

/// Largest p in (1, 50] (resolution 1e-3) such that t^{-p} phi(x, t) is almost
/// increasing with constant a <= 1.01 on every sample. Reports (exponent, a).
inline PropertyReport estimate_ainc_exponent(const PhiFunction& phi, std::span<const Point> xs,
                                             std::span<const double> ts) {
  return props::exponent_search(phi, xs, ts, true);
}

/// Smallest q <= 50 such that t^{-q} phi(x, t) is almost decreasing with a <= 1.01.
inline PropertyReport estimate_adec_exponent(const PhiFunction& phi, std::span<const Point> xs,
                                             std::span<const double> ts) {
  return props::exponent_search(phi, xs, ts, false);
}

/// Doubling constant K = sup phi(x, 2t) / phi(x, t). Holds when doubling the
/// grid density moves K by at most 1%; otherwise fails with the refined-grid
/// samples that exceed the coarse K.
inline PropertyReport delta2_constant(const PhiFunction& phi, std::span<const Point> xs,
                                      std::span<const double> ts) {
  auto sup_ratio = [&](std::span<const double> grid) {
    double k = 0.0;
    for (Point x : xs)
      for (double t : grid) {
        const double den = phi.eval(x, t);
        if (den > 0.0) k = std::max(k, phi.eval(x, 2.0 * t) / den);
      }
    return k;
  };
  PropertyReport rep;
  rep.property = "delta2";
  rep.samples = xs.size() * ts.size();
  const double k = sup_ratio(ts);
  const auto fine = refine_grid(ts);
  const double k_fine = sup_ratio(fine);
  if (std::isfinite(k) && std::abs(k_fine - k) <= props::kRefineChange * k) {
    rep.verdict = Verdict::Holds;
    rep.constants["K"] = k;
    return rep;
  }
  rep.verdict = Verdict::Fails;
  WitnessSet ws;
  for (Point x : xs)
    for (double t : fine) {
      const double lhs = phi.eval(x, 2.0 * t), rhs = k * phi.eval(x, t);
      if (lhs > rhs) ws.offer({props::as_coords(x, phi.domain().dim), 2.0 * t, t, lhs, rhs});
    }
  rep.witnesses = std::move(ws).take();
  return rep;
}

/// Nabla_2 holds iff (aInc)_p holds for some p > 1; delegates to the exponent search.
inline PropertyReport nabla2_check(const PhiFunction& phi, std::span<const Point> xs, std::span<const double> ts) {
  PropertyReport rep = estimate_ainc_exponent(phi, xs, ts);
  rep.property = "nabla2";
  if (rep.holds() && !(rep.constants.at("exponent") > 1.0)) {
    rep.verdict = Verdict::Inconclusive;
    rep.constants.clear();
  }
  return rep;
}

/// inf_t and sup_t of t phi''(x, t) / phi'(x, t) at one x; `worst_t` is where
/// the ratio is smallest. Non-finite ratios count as 0.
struct Mono1Bounds {
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0.0;
  double worst_t = 0.0;
};

inline Mono1Bounds mono1_pointwise(const PhiFunction& phi, Point x, std::span<const double> ts) {
  Mono1Bounds b;
  for (double t : ts) {
    double r = t * phi.d2(x, t) / phi.d1(x, t);
    if (!std::isfinite(r)) r = 0.0;
    if (r < b.c1) {
      b.c1 = r;
      b.worst_t = t;
    }
    b.c2 = std::max(b.c2, r);
  }
  return b;
}

/// (Mono1): C1 phi' <= t phi'' <= C2 phi'. Reports inf_x C1(x) and sup_x C2(x).
/// Fails where t phi'' <= 0 (witness lhs = 0, rhs = t phi''); inconclusive when
/// the constants move by more than 1% under grid refinement.
inline PropertyReport mono1_constants(const PhiFunction& phi, std::span<const Point> xs,
                                      std::span<const double> ts) {
  PropertyReport rep;
  rep.property = "mono1";
  rep.samples = xs.size() * ts.size();
  WitnessSet ws;
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
  for (Point x : xs) {
    const Mono1Bounds b = mono1_pointwise(phi, x, ts);
    c1 = std::min(c1, b.c1);
    c2 = std::max(c2, b.c2);
    if (!(b.c1 > 0.0))
      ws.offer({props::as_coords(x, phi.domain().dim), 0.0, b.worst_t, 0.0, b.worst_t * phi.d2(x, b.worst_t)});
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  const auto fine = refine_grid(ts);
  double f1 = std::numeric_limits<double>::infinity(), f2 = 0.0;
  for (Point x : xs) {
    const Mono1Bounds b = mono1_pointwise(phi, x, fine);
    f1 = std::min(f1, b.c1);
    f2 = std::max(f2, b.c2);
  }
  const bool stable =
      std::abs(f1 - c1) <= props::kRefineChange * c1 && std::abs(f2 - c2) <= props::kRefineChange * c2;
  if (!std::isfinite(c2) || !stable) return rep;
  rep.verdict = Verdict::Holds;
  rep.constants["C1"] = c1;
  rep.constants["C2"] = c2;
  return rep;
}

/// Per-x outcome of the (Mono2) classification.
struct Mono2Point {
  bool increasing = false;
  double a = 1.0;                 // almost-monotonicity constant of the chosen branch
  double end_slope = 0.0;         // log-log slope of phi'' at the end that breaks the branch
  double min_tail_slope = 0.0;    // decreasing branch only
  bool compliant = false;
};

inline double log_space_tail_slope(const PhiFunction& phi, Point x, double c, std::span<const double> ts) {
  std::vector<double> tt, hh;
  const std::size_t start = ts.size() - ts.size() / 4;
  for (std::size_t i = start; i < ts.size(); ++i) {
    const double t = ts[i];
    if (t <= 10.0 * c) continue;
    tt.push_back(t);
    hh.push_back(phi.d2(x, c + t) * (c - t) * (c - t));
  }
  return loglog_slope(tt, hh);
}

/// Classifies phi''(x, .) at one x. The increasing branch is ruled out when
/// phi'' blows up like a power at the bottom of the grid (log-log slope below
/// -0.05 on the first eighth), the decreasing branch when it grows like a
/// power at the top; either way the sampled constant would keep growing with
/// the range. A branch also needs a sampled constant of at most 1e3. Of the
/// admissible branches the one with the smaller constant wins. On the
/// decreasing branch each probe c must show phi''(x, c+t)(c-t)^2 growing
/// along the top quarter of the grid (log-log slope above 0.05).
inline Mono2Point mono2_pointwise(const PhiFunction& phi, Point x, std::span<const double> ts,
                                  std::span<const double> c_probes) {
  std::vector<double> d2(ts.size()), lg(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    d2[i] = phi.d2(x, ts[i]);
    lg[i] = d2[i] > 0.0 && std::isfinite(d2[i]) ? std::log(d2[i]) : -std::numeric_limits<double>::infinity();
  }
  const std::size_t m = std::max<std::size_t>(ts.size() / 8, 2);
  const double bottom = loglog_slope(ts.first(m), std::span<const double>(d2).first(m));
  const double top = loglog_slope(ts.last(m), std::span<const double>(d2).last(m));
  const double a_inc = props::report_constant(std::exp(props::log_inc_constant(lg)));
  const double a_dec = props::report_constant(std::exp(props::log_dec_constant(lg)));
  const bool inc_ok = a_inc <= props::kMaxAlmostConstant && !(bottom < -props::kMinTailSlope);
  const bool dec_ok = a_dec <= props::kMaxAlmostConstant && !(top > props::kMinTailSlope);

  Mono2Point out;
  out.increasing = inc_ok == dec_ok ? a_inc <= a_dec : inc_ok;
  out.a = out.increasing ? a_inc : a_dec;
  out.end_slope = out.increasing ? -bottom : top;
  if (!(out.increasing ? inc_ok : dec_ok)) return out;
  if (out.increasing) {
    out.compliant = true;
    return out;
  }
  out.min_tail_slope = std::numeric_limits<double>::infinity();
  for (double c : c_probes) out.min_tail_slope = std::min(out.min_tail_slope, log_space_tail_slope(phi, x, c, ts));
  out.compliant = out.min_tail_slope > props::kMinTailSlope;
  return out;
}

/// (Mono2): at every sampled x, phi'' is almost increasing, or almost
/// decreasing with phi''(x, c+t)(c-t)^2 -> infinity for each probe c.
inline PropertyReport mono2_classify(const PhiFunction& phi, std::span<const Point> xs, std::span<const double> ts,
                                     std::span<const double> c_probes) {
  PropertyReport rep;
  rep.property = "mono2";
  rep.samples = xs.size() * ts.size();
  WitnessSet ws;
  double n_inc = 0, n_dec = 0, a_inc = 1.0, a_dec = 1.0;
  double min_slope = std::numeric_limits<double>::infinity();
  for (Point x : xs) {
    const Mono2Point m = mono2_pointwise(phi, x, ts, c_probes);
    if (!m.compliant) {
      // neither branch: witness is (observed <= threshold), violated.
      if (m.a > props::kMaxAlmostConstant)
        ws.offer({props::as_coords(x, phi.domain().dim), 0.0, 0.0, m.a, props::kMaxAlmostConstant});
      else if (m.end_slope > props::kMinTailSlope)
        ws.offer({props::as_coords(x, phi.domain().dim), ts.front(), ts.back(), m.end_slope, props::kMinTailSlope});
      else
        ws.offer({props::as_coords(x, phi.domain().dim), 0.0, ts.back(), props::kMinTailSlope, m.min_tail_slope});
      continue;
    }
    if (m.increasing) {
      n_inc += 1;
      a_inc = std::max(a_inc, m.a);
    } else {
      n_dec += 1;
      a_dec = std::max(a_dec, m.a);
      min_slope = std::min(min_slope, m.min_tail_slope);
    }
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  rep.constants["n_increasing"] = n_inc;
  rep.constants["n_decreasing"] = n_dec;
  if (n_inc > 0) rep.constants["a_increasing"] = a_inc;
  if (n_dec > 0) {
    rep.constants["a_decreasing"] = a_dec;
    rep.constants["min_tail_slope"] = min_slope;
  }
  return rep;
}

inline PropertyReport mono2_classify(const PhiFunction& phi, std::span<const Point> xs, std::span<const double> ts) {
  static constexpr double probes[] = {0.1, 1.0, 10.0};
  return mono2_classify(phi, xs, ts, probes);
}

/// C1 phi <= t phi' <= C2 phi: inf and sup of t phi'(x,t) / phi(x,t).
inline PropertyReport derivative_equiv_constants(const PhiFunction& phi, std::span<const Point> xs,
                                                 std::span<const double> ts) {
  PropertyReport rep;
  rep.property = "derivative_equivalence";
  rep.samples = xs.size() * ts.size();
  WitnessSet ws;
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
  for (Point x : xs)
    for (double t : ts) {
      const double f = phi.eval(x, t), tdf = t * phi.d1(x, t);
      const double r = tdf / f;
      if (!(r > 0.0) || !std::isfinite(r)) {
        ws.offer({props::as_coords(x, phi.domain().dim), 0.0, t, 0.0, tdf});
        continue;
      }
      c1 = std::min(c1, r);
      c2 = std::max(c2, r);
    }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  rep.constants["C1"] = c1;
  rep.constants["C2"] = c2;
  return rep;
}

/// Young-type inequality s phi'(x,t) <= phi(x,s) + t phi'(x,t) - phi(x,t), with
/// tolerance 1e-12 times the sum of the magnitudes of the four terms.
inline PropertyReport young_check(const PhiFunction& phi, std::span<const Sample> samples) {
  PropertyReport rep;
  rep.property = "young";
  rep.samples = samples.size();
  WitnessSet ws;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const Sample& smp : samples) {
    const double dft = phi.d1(smp.x, smp.t);
    const double fs = phi.eval(smp.x, smp.s), ft = phi.eval(smp.x, smp.t);
    const double lhs = smp.s * dft;
    const double rhs = fs + smp.t * dft - ft;
    const double scale = std::abs(lhs) + fs + smp.t * dft + ft;
    if (lhs - rhs > 1e-12 * scale)
      ws.offer({props::as_coords(smp.x, phi.domain().dim), smp.s, smp.t, lhs, rhs});
    else if (scale > 0.0)
      min_gap = std::min(min_gap, (rhs - lhs) / scale);
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  if (std::isfinite(min_gap)) rep.constants["min_relative_gap"] = min_gap;
  return rep;
}

/// phi*(x, phi'(x,t)) <= t phi'(x,t) on the (x, t) part of each sample;
/// inconclusive if the conjugate search does not converge.
inline PropertyReport conjugate_ineq_check(const PhiFunction& phi, std::span<const Sample> samples) {
  PropertyReport rep;
  rep.property = "conjugate_inequality";
  rep.samples = samples.size();
  WitnessSet ws;
  try {
    for (const Sample& smp : samples) {
      const double slope = phi.d1(smp.x, smp.t);
      const double lhs = conjugate_eval(phi, smp.x, slope);
      const double rhs = smp.t * slope;
      if (lhs - rhs > 1e-12 * (std::abs(lhs) + std::abs(rhs)))
        ws.offer({props::as_coords(smp.x, phi.domain().dim), slope, smp.t, lhs, rhs});
    }
  } catch (const NonConvergenceError&) {
    return rep;
  }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  return rep;
}

inline PropertyReport conjugate_ineq_check(const PhiFunction& phi, std::span<const Point> xs,
                                           std::span<const double> ts) {
  std::vector<Sample> samples;
  for (Point x : xs)
    for (double t : ts) samples.push_back({x, 0.0, t});
  return conjugate_ineq_check(phi, samples);
}

/// Sufficient embedding condition psi(x, t/K) <= phi(x, t) + c (h == c).
inline PropertyReport embedding_witness_check(const PhiFunction& phi, const PhiFunction& psi, double K, double c,
                                              std::span<const Point> xs, std::span<const double> ts) {
  if (!(K > 0.0)) throw DomainError("embedding constant K must be positive");
  if (!(c >= 0.0)) throw DomainError("embedding offset c must be nonnegative");
  PropertyReport rep;
  rep.property = "embedding";
  rep.samples = xs.size() * ts.size();
  WitnessSet ws;
  for (Point x : xs)
    for (double t : ts) {
      const double lhs = psi.eval(x, t / K), rhs = phi.eval(x, t) + c;
      if (lhs - rhs > 1e-12 * (std::abs(lhs) + std::abs(rhs)))
        ws.offer({props::as_coords(x, phi.domain().dim), t / K, t, lhs, rhs});
    }
  if (!ws.empty()) {
    rep.verdict = Verdict::Fails;
    rep.witnesses = std::move(ws).take();
    return rep;
  }
  rep.verdict = Verdict::Holds;
  rep.constants["K"] = K;
  rep.constants["c"] = c;
  return rep;
}

/// Everything `orlicz check` reports, in a fixed order.
inline std::vector<PropertyReport> check_suite(const PhiFunction& phi, std::span<const Point> xs,
                                               std::span<const double> ts) {
  std::vector<PropertyReport> out;
  out.push_back(estimate_ainc_exponent(phi, xs, ts));
  out.push_back(estimate_adec_exponent(phi, xs, ts));
  out.push_back(delta2_constant(phi, xs, ts));
  out.push_back(nabla2_check(phi, xs, ts));
  out.push_back(mono1_constants(phi, xs, ts));
  out.push_back(mono2_classify(phi, xs, ts));
  out.push_back(derivative_equiv_constants(phi, xs, ts));
  std::vector<double> coarse;
  for (std::size_t i = 0; i < ts.size(); i += std::max<std::size_t>(1, ts.size() / 60)) coarse.push_back(ts[i]);
  out.push_back(young_check(phi, grid_samples(xs, coarse)));
  out.push_back(conjugate_ineq_check(phi, xs, ts));
  return out;
}

}  // namespace orlicz

#endif  // ORLICZ_PHI_PROPS_HPP
