#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

using namespace orlicz;
using namespace orlicz::testing;

// Reference values printed by tests/oracles/oracles.py (brute-force scans on
// the default 600-point grid).
namespace oracle {
constexpr double kAincDoublePhase = 1.501;      // ainc_double_phase_1.5_3
constexpr double kAdecDoublePhase = 2.999;      // adec_double_phase_1.5_3
constexpr double kAincVarExponent = 1.2;        // ainc_var_exponent_1.2+0.3x
constexpr double kAdecLogPower = 2.306;         // adec_log_power_2
constexpr double kAincLogDoublePhase = 1.504;   // ainc_log_double_phase_1.5_2
constexpr double kMono1DpC1 = 0.500000003;
constexpr double kMono1DpC2 = 1.99999999925;
constexpr double kDerivDpC1 = 1.5000000015000003;
constexpr double kDerivDpC2 = 2.9999999985000003;
constexpr double kDelta2DpK = 7.9999999948284275;
constexpr double kMono1LogC1 = 1.0000005518185864;
constexpr double kMono1LogC2 = 1.325296963550864;
constexpr double kDerivLogC1 = 2.0000003678791707;
constexpr double kDerivLogC2 = 2.3178392725807755;
constexpr double kDelta2LogK = 4.981086943595637;
}  // namespace oracle

namespace {

const std::vector<Point> kOrigin{Point{}};

double constant(const PropertyReport& r, const char* key) {
  EXPECT_TRUE(r.holds()) << r.property;
  auto it = r.constants.find(key);
  return it == r.constants.end() ? std::nan("") : it->second;
}

// O(n^2) almost-increasing constant: max over s < t of g(s)/g(t).
double brute_inc(const PhiFunction& phi, Point x, double p, std::span<const double> ts) {
  double worst = 1.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      worst = std::max(worst, (phi.eval(x, ts[i]) / std::pow(ts[i], p)) / (phi.eval(x, ts[j]) / std::pow(ts[j], p)));
  return worst;
}

}  // namespace

TEST(Exponents, PowerIsExact) {
  const auto phi = power(2.5);
  const auto inc = estimate_ainc_exponent(phi, kOrigin, default_t_grid());
  const auto dec = estimate_adec_exponent(phi, kOrigin, default_t_grid());
  EXPECT_DOUBLE_EQ(constant(inc, "exponent"), 2.5);
  EXPECT_DOUBLE_EQ(constant(inc, "a"), 1.0);
  EXPECT_DOUBLE_EQ(constant(dec, "exponent"), 2.5);
}

TEST(Exponents, DoublePhase) {
  const auto phi = double_phase(1.5, 3.0);
  const auto inc = estimate_ainc_exponent(phi, kOrigin, default_t_grid());
  const auto dec = estimate_adec_exponent(phi, kOrigin, default_t_grid());
  EXPECT_DOUBLE_EQ(constant(inc, "exponent"), oracle::kAincDoublePhase);
  EXPECT_DOUBLE_EQ(constant(dec, "exponent"), oracle::kAdecDoublePhase);
  EXPECT_NEAR(constant(inc, "exponent"), 1.5, 1e-3);
  EXPECT_NEAR(constant(dec, "exponent"), 3.0, 1e-3);
}

TEST(Exponents, DoublePhaseAgainstPairScan) {
  // In-process oracle on a coarser grid: the reported exponent passes the
  // O(n^2) scan and the next lattice point does not.
  const auto phi = double_phase(1.5, 3.0);
  const auto ts = log_grid(1e-6, 1e6, 150);
  const double e = constant(estimate_ainc_exponent(phi, kOrigin, ts), "exponent");
  EXPECT_LE(brute_inc(phi, Point{}, e, ts), props::kAlmostLimit);
  EXPECT_GT(brute_inc(phi, Point{}, e + 1e-3, ts), props::kAlmostLimit);
}

TEST(Exponents, VarExponentTakesInfimum) {
  const auto phi = make_family(desc(Family::VarExponent, "1.2 + 0.3*x"), kUnit);
  const auto xs = default_x_samples(phi);
  EXPECT_EQ(xs.size(), 64u);
  EXPECT_DOUBLE_EQ(constant(estimate_ainc_exponent(phi, xs, default_t_grid()), "exponent"),
                   oracle::kAincVarExponent);
  EXPECT_DOUBLE_EQ(constant(estimate_adec_exponent(phi, xs, default_t_grid()), "exponent"), 1.5);
}

TEST(Exponents, LogPowerNeedsSlack) {
  const double q = constant(estimate_adec_exponent(log_power(2), kOrigin, default_t_grid()), "exponent");
  EXPECT_DOUBLE_EQ(q, oracle::kAdecLogPower);
  EXPECT_GT(q, 2.0);
}

TEST(Exponents, InconclusiveWhenNothingPasses) {
  // Growth faster than t^50: no q <= 50 works.
  const auto phi = power(60);
  EXPECT_EQ(estimate_adec_exponent(phi, kOrigin, log_grid(1e-2, 1e2, 100)).verdict, Verdict::Inconclusive);
  EXPECT_THROW(estimate_ainc_exponent(phi, kOrigin, std::vector<double>{1.0}), DomainError);
}

TEST(Delta2, Examples) {
  EXPECT_DOUBLE_EQ(constant(delta2_constant(power(3), kOrigin, default_t_grid()), "K"), 8.0);
  EXPECT_NEAR(constant(delta2_constant(double_phase(1.5, 3), kOrigin, default_t_grid()), "K"), oracle::kDelta2DpK,
              1e-12);
  const double k = constant(delta2_constant(log_power(2), kOrigin, default_t_grid()), "K");
  EXPECT_NEAR(k, oracle::kDelta2LogK, 1e-12);
  EXPECT_LE(k, 8.0);
}

TEST(Nabla2, Examples) {
  EXPECT_TRUE(nabla2_check(power(2), kOrigin, default_t_grid()).holds());
  EXPECT_DOUBLE_EQ(constant(nabla2_check(power(1.01), kOrigin, default_t_grid()), "exponent"), 1.01);
  const auto ldp = make_family(desc(Family::LogDoublePhase, "1.5", "2", "1"), Domain::unbounded());
  EXPECT_DOUBLE_EQ(constant(nabla2_check(ldp, kOrigin, default_t_grid()), "exponent"), oracle::kAincLogDoublePhase);
}

TEST(Mono1, Examples) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = mono1_constants(power(p), kOrigin, default_t_grid());
    EXPECT_NEAR(constant(r, "C1"), p - 1, 1e-12);
    EXPECT_NEAR(constant(r, "C2"), p - 1, 1e-12);
  }
  const auto dp = mono1_constants(double_phase(1.5, 3), kOrigin, default_t_grid());
  EXPECT_NEAR(constant(dp, "C1"), oracle::kMono1DpC1, 1e-12);
  EXPECT_NEAR(constant(dp, "C2"), oracle::kMono1DpC2, 1e-12);
  const auto lp = mono1_constants(log_power(2), kOrigin, default_t_grid());
  EXPECT_NEAR(constant(lp, "C1"), oracle::kMono1LogC1, 1e-12);
  EXPECT_NEAR(constant(lp, "C2"), oracle::kMono1LogC2, 1e-12);
  EXPECT_GE(constant(lp, "C1"), 1.0);
  EXPECT_LE(constant(lp, "C2"), 2.2);
}

TEST(Mono2, PowerBranches) {
  const auto p3 = mono2_classify(power(3), kOrigin, default_t_grid());
  EXPECT_EQ(constant(p3, "n_increasing"), 1.0);
  EXPECT_EQ(constant(p3, "a_increasing"), 1.0);
  const auto p15 = mono2_classify(power(1.5), kOrigin, default_t_grid());
  EXPECT_EQ(constant(p15, "n_decreasing"), 1.0);
  // phi''(c+t)(c-t)^2 ~ t^{1.5}
  EXPECT_NEAR(constant(p15, "min_tail_slope"), 1.5, 0.01);
}

TEST(Mono2, LogPowerWithExponentCrossingTwo) {
  const auto phi = make_family(desc(Family::LogPower, "1.5 + x"), kUnit);
  const auto r = mono2_classify(phi, default_x_samples(phi), default_t_grid());
  EXPECT_GT(constant(r, "n_increasing"), 0.0);
  EXPECT_GT(constant(r, "n_decreasing"), 0.0);
}

TEST(Mono2, DoublePhaseAcrossTwoFitsNeitherBranch) {
  // phi'' = 0.75 t^{-1/2} + 6t falls then rises.
  const auto r = mono2_classify(double_phase(1.5, 3), kOrigin, default_t_grid());
  ASSERT_TRUE(r.fails());
  ASSERT_FALSE(r.witnesses.empty());
  for (const auto& w : r.witnesses) EXPECT_GT(w.lhs, w.rhs);
}

TEST(DerivativeEquivalence, Examples) {
  const auto p2 = derivative_equiv_constants(power(2), kOrigin, default_t_grid());
  EXPECT_NEAR(constant(p2, "C1"), 2.0, 1e-12);
  EXPECT_NEAR(constant(p2, "C2"), 2.0, 1e-12);
  const auto dp = derivative_equiv_constants(double_phase(1.5, 3), kOrigin, default_t_grid());
  EXPECT_NEAR(constant(dp, "C1"), oracle::kDerivDpC1, 1e-12);
  EXPECT_NEAR(constant(dp, "C2"), oracle::kDerivDpC2, 1e-12);
  const auto lp = derivative_equiv_constants(log_power(2), kOrigin, default_t_grid());
  EXPECT_NEAR(constant(lp, "C1"), oracle::kDerivLogC1, 1e-12);
  EXPECT_NEAR(constant(lp, "C2"), oracle::kDerivLogC2, 1e-12);
  EXPECT_LE(constant(lp, "C2"), 2.6);
}

TEST(Young, Examples) {
  const std::vector<Sample> one{{Point{}, 1.0, 2.0}};
  EXPECT_TRUE(young_check(power(2), one).holds());
  // 4 <= 1 + 8 - 4
  EXPECT_DOUBLE_EQ(1.0 * power(2).d1(Point{}, 2.0), 4.0);
  std::vector<Sample> diag;
  for (double s : log_grid(1e-3, 1e3, 50)) diag.push_back({Point{}, s, s});
  const auto r = young_check(power(3), diag);
  EXPECT_TRUE(r.holds());
  EXPECT_NEAR(r.constants.at("min_relative_gap"), 0.0, 1e-15);
  const auto ldp = make_family(desc(Family::LogDoublePhase, "1.5", "2", "x"), kUnit);
  EXPECT_TRUE(young_check(ldp, random_samples(ldp, 10000, 3)).holds());
}

TEST(ConjugateInequality, Examples) {
  const std::vector<Sample> at3{{Point{}, 0.0, 3.0}};
  EXPECT_TRUE(conjugate_ineq_check(power(2), at3).holds());
  EXPECT_DOUBLE_EQ(conjugate_eval(power(2), Point{}, 6.0), 9.0);
  const std::vector<Sample> at0{{Point{}, 0.0, 0.0}};
  EXPECT_TRUE(conjugate_ineq_check(power(2), at0).holds());
  const auto dp = double_phase(1.5, 3);
  EXPECT_TRUE(conjugate_ineq_check(dp, random_samples(dp, 1000, 5)).holds());
}

TEST(Embedding, Examples) {
  const auto ts = log_grid(1e-3, 1e3, 200);
  EXPECT_TRUE(embedding_witness_check(power(3), power(2), 1.0, 1.0, kOrigin, ts).holds());
  EXPECT_TRUE(embedding_witness_check(power(2), power(2), 1.0, 0.0, kOrigin, ts).holds());
  const auto r = embedding_witness_check(power(2), power(3), 1.0, 1.0, kOrigin, ts);
  ASSERT_TRUE(r.fails());
  EXPECT_EQ(r.witnesses.front().t, 1e3);
  // Witness soundness: re-evaluating violates psi(t/K) <= phi(t) + c.
  for (const auto& w : r.witnesses) EXPECT_GT(power(3).eval(Point{}, w.s), power(2).eval(Point{}, w.t) + 1.0);
  EXPECT_TRUE(r.constants.empty());
}

// Invariants over every built-in family.
TEST(PhiPropsProperty, ConsistencyAndRefinementStability) {
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    const auto xs = phi.x_independent() ? kOrigin : kUnit.sample_points(16);
    const auto ts = default_t_grid();
    const auto fine = refine_grid(ts);
    const auto inc = estimate_ainc_exponent(phi, xs, ts);
    const auto dec = estimate_adec_exponent(phi, xs, ts);
    ASSERT_TRUE(inc.holds() && dec.holds()) << name;
    EXPECT_LE(inc.constants.at("exponent"), dec.constants.at("exponent")) << name;
    const auto m1 = mono1_constants(phi, xs, ts);
    ASSERT_TRUE(m1.holds()) << name;
    EXPECT_LE(m1.constants.at("C1"), m1.constants.at("C2")) << name;

    auto stable = [&](const PropertyReport& a, const PropertyReport& b) {
      ASSERT_EQ(a.verdict, b.verdict) << name << " " << a.property;
      for (const auto& [k, v] : a.constants)
        EXPECT_LE(std::abs(b.constants.at(k) - v), 0.01 * std::abs(v)) << name << " " << a.property << " " << k;
    };
    stable(inc, estimate_ainc_exponent(phi, xs, fine));
    stable(dec, estimate_adec_exponent(phi, xs, fine));
    stable(m1, mono1_constants(phi, xs, fine));
    stable(delta2_constant(phi, xs, ts), delta2_constant(phi, xs, fine));
    stable(derivative_equiv_constants(phi, xs, ts), derivative_equiv_constants(phi, xs, fine));
  }
}

TEST(PhiPropsProperty, Deterministic) {
  const auto phi = make_family(desc(Family::LogDoublePhase, "1.5", "2", "x"), kUnit);
  const auto xs = default_x_samples(phi);
  auto dump = [&] {
    std::string s;
    for (const auto& r : check_suite(phi, xs, default_t_grid())) s += to_json(r).dump();
    return s;
  };
  EXPECT_EQ(dump(), dump());
}

TEST(PhiPropsProperty, ConstantsPresentIffHolds) {
  std::vector<PropertyReport> all;
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    const auto xs = phi.x_independent() ? kOrigin : kUnit.sample_points(8);
    for (auto& r : check_suite(phi, xs, default_t_grid())) all.push_back(std::move(r));
  }
  all.push_back(embedding_witness_check(power(2), power(3), 1.0, 1.0, kOrigin, default_t_grid()));
  for (const auto& r : all) {
    if (r.fails()) {
      EXPECT_FALSE(r.witnesses.empty()) << r.property;
      EXPECT_TRUE(r.constants.empty()) << r.property;
    }
    if (r.holds()) {
      EXPECT_TRUE(r.witnesses.empty()) << r.property;
    }
    if (r.verdict == Verdict::Inconclusive) {
      EXPECT_TRUE(r.constants.empty()) << r.property;
    }
  }
}

TEST(Report, JsonFieldOrder) {
  PropertyReport r;
  r.property = "delta2";
  r.verdict = Verdict::Fails;
  r.witnesses.push_back({{0.5}, 2.0, 1.0, 3.0, 2.0});
  r.samples = 4;
  EXPECT_EQ(to_json(r).dump(),
            R"({"property":"delta2","verdict":"fails","constants":{},"witnesses":[{"x":[0.5],"s":2.0,"t":1.0,"lhs":3.0,"rhs":2.0}],"samples":4})");
}

TEST(Report, WitnessSetKeepsWorstDeterministically) {
  WitnessSet ws(3);
  for (int i = 0; i < 10; ++i) ws.offer({{double(i)}, 0, 0, double(i % 5), 0});
  EXPECT_EQ(ws.count(), 10u);
  const auto kept = std::move(ws).take();
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].x[0], 4.0);
  EXPECT_EQ(kept[1].x[0], 9.0);
  EXPECT_EQ(kept[2].x[0], 3.0);
}
