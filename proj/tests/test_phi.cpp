#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace orlicz;
using namespace orlicz::testing;

// Reference values printed by tests/oracles/oracles.py (mpmath, 50 digits).
namespace oracle {
constexpr double kLogPowerD1AtOne = 2.8954647964064408;  // logpower_d1_p2_t1
constexpr double kConjDoublePhaseS5 = 3.018153498205433;  // conj_dp_1.5_3_s5
}  // namespace oracle

TEST(Phi, EvalExamples) {
  const Point o{};
  EXPECT_DOUBLE_EQ(power(2).eval(o, 3.0), 9.0);
  EXPECT_DOUBLE_EQ(double_phase(1.5, 2.0).eval(o, 1.0), 2.0);
  EXPECT_EQ(log_power(2).eval(o, 0.0), 0.0);
}

TEST(Phi, FirstDerivativeExamples) {
  const Point o{};
  EXPECT_DOUBLE_EQ(power(3).d1(o, 2.0), 12.0);
  EXPECT_NEAR(log_power(2).d1(o, 1.0), oracle::kLogPowerD1AtOne, 1e-13);
  for (const auto& [name, phi] : builtin_families(kUnit)) EXPECT_EQ(phi.d1(Point{0.5, 0}, 0.0), 0.0) << name;
}

TEST(Phi, SecondDerivativeExamples) {
  const Point o{};
  EXPECT_DOUBLE_EQ(power(2).d2(o, 0.7), 2.0);
  EXPECT_DOUBLE_EQ(power(2).d2(o, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(power(3).d2(o, 2.0), 12.0);
  EXPECT_DOUBLE_EQ(double_phase(1.5, 3.0).d2(o, 1.0), 6.75);
  EXPECT_THROW(power(1.5).d2(o, 0.0), DomainError);
}

TEST(Phi, ArgumentChecks) {
  const auto phi = make_family(desc(Family::VarExponent, "1.2 + 0.3*x"), kUnit);
  EXPECT_THROW(phi.eval(Point{0.5, 0}, -1.0), DomainError);
  EXPECT_THROW(phi.eval(Point{2.0, 0}, 1.0), DomainError);
  EXPECT_THROW(phi.d1(Point{-0.5, 0}, 1.0), DomainError);
}

TEST(Phi, ConjugateExamples) {
  const Point o{};
  EXPECT_DOUBLE_EQ(conjugate_eval(power(2), o, 2.0), 1.0);
  EXPECT_NEAR(conjugate_numeric(power(2), o, 2.0), 1.0, 1e-12);
  EXPECT_EQ(conjugate_eval(power(3), o, 0.0), 0.0);
  EXPECT_EQ(conjugate_numeric(double_phase(1.5, 3), o, 0.0), 0.0);
  EXPECT_NEAR(conjugate_eval(power(3), o, 3.0), 2.0, 1e-14);
  EXPECT_NEAR(conjugate_numeric(power(3), o, 3.0), 2.0, 1e-12);
  EXPECT_LT(rel_err(conjugate_eval(double_phase(1.5, 3), o, 5.0), oracle::kConjDoublePhaseS5), 1e-10);
}

TEST(Phi, ConjugateClosedFormMatchesNumeric) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (bool norm : {false, true}) {
      const auto phi = power(p, norm);
      for (double s : log_grid(1e-2, 1e2, 41)) {
        const double closed = *conjugate_closed_form(phi, Point{}, s);
        EXPECT_LT(rel_err(conjugate_numeric(phi, Point{}, s), closed), 1e-8) << p << " " << s;
        if (!norm) {
          const double formula = (p - 1) * std::pow(p, -p / (p - 1)) * std::pow(s, p / (p - 1));
          EXPECT_LT(rel_err(closed, formula), 1e-12);
        }
      }
    }
  }
}

TEST(Phi, ConjugateBracketLimit) {
  // phi'(1e12) = 1.001 * 1e12^0.001 ~ 1.029 < s, so the bracket never closes.
  const auto phi = power(1.001);
  EXPECT_THROW(conjugate_numeric(phi, Point{}, 1.1), NonConvergenceError);
}

TEST(Phi, MakeFamilyValidation) {
  EXPECT_NO_THROW(make_family(desc(Family::Power, "2")));
  try {
    make_family(desc(Family::DoublePhase, "1.5", "0.5", "1"));
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("q"), std::string::npos);
  }
  EXPECT_NO_THROW(make_family(
      combo(Family::Sum, {desc(Family::Power, "2"), desc(Family::DoublePhase, "1.1", "1.2", "x")}), kUnit));
  EXPECT_THROW(make_family(desc(Family::Power, "0.5")), ValidationError);
  EXPECT_THROW(make_family(desc(Family::Power, "x"), kUnit), ValidationError);
  EXPECT_THROW(make_family(desc(Family::DoublePhase, "1.5", "2", "x - 1"), kUnit), ValidationError);
  EXPECT_THROW(make_family(desc(Family::DoublePhase, "1.5", "2")), ValidationError);
  EXPECT_THROW(make_family(combo(Family::Sum, {})), ValidationError);
  EXPECT_THROW(make_family(combo(Family::Scaled, {desc(Family::Power, "2")}, -1.0)), ValidationError);
  EXPECT_THROW(make_family(desc(Family::VarExponent, "1.2 + x")), ValidationError);  // unbounded domain
}

TEST(Phi, MultipleViolationsAreAllListed) {
  try {
    make_family(combo(Family::Sum, {desc(Family::Power, "0.5"), desc(Family::DoublePhase, "0.9", "0.8", "-1")}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 4u);
  }
}

TEST(Phi, CombinatorsAndNormalization) {
  const Point x{0.25, 0};
  const auto sum = make_family(
      combo(Family::Sum, {desc(Family::Power, "2"), desc(Family::DoublePhase, "1.1", "1.2", "x")}), kUnit);
  const auto a = power(2), b = make_family(desc(Family::DoublePhase, "1.1", "1.2", "x"), kUnit);
  const auto scaled = make_family(combo(Family::Scaled, {desc(Family::Power, "3")}, 2.0));
  for (double t : {0.1, 1.0, 7.0}) {
    EXPECT_DOUBLE_EQ(sum.eval(x, t), a.eval(x, t) + b.eval(x, t));
    EXPECT_DOUBLE_EQ(sum.d2(x, t), a.d2(x, t) + b.d2(x, t));
    EXPECT_DOUBLE_EQ(scaled.eval(x, t), 2.0 * t * t * t);
    EXPECT_DOUBLE_EQ(power(3, true).eval(x, t), t * t * t / 3.0);
    EXPECT_DOUBLE_EQ(double_phase(1.5, 3, 2.0, true).d1(x, t), std::pow(t, 0.5) + 2.0 * t * t);
  }
  EXPECT_TRUE(sum.normalized_copy().children()[1].normalized());
  EXPECT_THROW(log_power(2).normalized_copy(), ValidationError);
}

// Invariant: |d1 - central difference of eval| <= 1e-5 (1 + |d1|) on t in [1e-3, 1e3],
// and the same for d2 against differences of d1.
TEST(PhiProperty, DerivativesMatchFiniteDifferences) {
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    for (Point x : kUnit.sample_points(9)) {
      for (double t : log_grid(1e-3, 1e3, 61)) {
        const double h = 1e-6 * t;
        const double fd1 = (phi.eval(x, t + h) - phi.eval(x, t - h)) / (2 * h);
        const double d1 = phi.d1(x, t);
        EXPECT_LE(std::abs(d1 - fd1), 1e-5 * (1 + std::abs(d1))) << name << " t=" << t;
        const double fd2 = (phi.d1(x, t + h) - phi.d1(x, t - h)) / (2 * h);
        const double d2 = phi.d2(x, t);
        EXPECT_LE(std::abs(d2 - fd2), 1e-5 * (1 + std::abs(d2))) << name << " t=" << t;
      }
    }
  }
}

TEST(PhiProperty, MonotoneAndNormalizedAtZero) {
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    for (Point x : kUnit.sample_points(16)) {
      EXPECT_EQ(phi.eval(x, 0.0), 0.0) << name;
      double prev = 0.0;
      for (double t : default_t_grid()) {
        const double v = phi.eval(x, t);
        EXPECT_GE(v, prev) << name << " t=" << t;
        EXPECT_GE(phi.d1(x, t), 0.0) << name;
        prev = v;
      }
    }
  }
}

TEST(PhiProperty, FenchelYoung) {
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    for (const Sample& s : random_samples(phi, 2000, 11)) {
      const double lhs = s.s * s.t;
      const double rhs = phi.eval(s.x, s.t) + conjugate_eval(phi, s.x, s.s);
      EXPECT_LE(lhs, rhs * (1 + 1e-12)) << name << " s=" << s.s << " t=" << s.t;
    }
  }
}

TEST(PhiProperty, ConjugateIsNonnegativeAndIncreasing) {
  for (const auto& [name, phi] : builtin_families(kUnit)) {
    double prev = 0.0;
    for (double s : log_grid(1e-3, 1e3, 31)) {
      const double v = conjugate_eval(phi, Point{0.5, 0}, s);
      EXPECT_GE(v, prev) << name;
      prev = v;
    }
  }
}
