#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rephase/phase.hpp"

using namespace rephase;
using F = FreqSymbol;
using T = TimeSymbol;

namespace {

struct RawTerm {
    F f;
    T t;
    Rational c;
};

std::vector<RawTerm> random_terms(std::mt19937_64 &rng, int n) {
    std::uniform_int_distribution<std::size_t> fi(0, kNumFreqSymbols - 1);
    std::uniform_int_distribution<std::size_t> ti(0, kNumTimeSymbols - 1);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 6);
    std::vector<RawTerm> out;
    for (int k = 0; k < n; ++k) {
        out.push_back({kAllFreqSymbols[fi(rng)], kAllTimeSymbols[ti(rng)], Rational(num(rng), den(rng))});
    }
    return out;
}

LinearPhase build(const std::vector<RawTerm> &terms) {
    LinearPhase p;
    for (const auto &t : terms) {
        p.add_term(t.f, t.t, t.c);
    }
    return p;
}

Valuation random_valuation(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Valuation v;
    for (F f : kAllFreqSymbols) {
        v.set(f, u(rng));
    }
    for (T t : kAllTimeSymbols) {
        v.set(t, u(rng));
    }
    return v;
}

}  // namespace

TEST(Combine, IdentityAndSelfCancellation) {
    LinearPhase p = LinearPhase::term(F::omega_1, T::tau, Rational(3, 2)) + LinearPhase::pi_multiple(Rational(1, 2));
    EXPECT_EQ(combine(p, LinearPhase{}, +1), p);
    EXPECT_TRUE(combine(p, p, -1).is_zero());
    EXPECT_THROW(combine(p, p, 2), std::invalid_argument);
}

TEST(Combine, OpticalFrequencyDifferencePattern) {
    LinearPhase a = LinearPhase::term(F::omega_2, T::tau);
    LinearPhase b = LinearPhase::term(F::omega_1, T::tau);
    LinearPhase d = combine(a, b, -1);
    EXPECT_EQ(d.terms().size(), 2u);
    EXPECT_EQ(d.coefficient(F::omega_2, T::tau), Rational(1));
    EXPECT_EQ(d.coefficient(F::omega_1, T::tau), Rational(-1));
}

TEST(Substitute, TimeRuleIsLinear) {
    Substitution s;
    s.set(T::t_1, TimeExpr(T::t_0) + TimeExpr(T::epsilon));
    LinearPhase out = substitute(LinearPhase::term(F::omega_2, T::t_1), s);
    LinearPhase want = LinearPhase::term(F::omega_2, T::t_0) + LinearPhase::term(F::omega_2, T::epsilon);
    EXPECT_EQ(out, want);
}

TEST(Substitute, CorrelatedShelfRule) {
    Substitution s;
    s.set(F::delta_e_1, FreqExpr(F::delta_g_1, Rational(2)));
    EXPECT_EQ(substitute(LinearPhase::term(F::delta_e_1, T::t_1), s), LinearPhase::term(F::delta_g_1, T::t_1, 2));
}

TEST(Substitute, ChainedRulesReachFixpoint) {
    Substitution s;
    s.set(T::t_2, TimeExpr(T::T) - TimeExpr(T::t_1));
    s.set(T::t_1, TimeExpr(T::t_0) + TimeExpr(T::epsilon));
    LinearPhase p = LinearPhase::term(F::delta_g_1, T::t_2);
    LinearPhase once = substitute(p, s);
    EXPECT_EQ(substitute(once, s), once);
    EXPECT_EQ(once.coefficient(F::delta_g_1, T::T), Rational(1));
    EXPECT_EQ(once.coefficient(F::delta_g_1, T::t_0), Rational(-1));
    EXPECT_EQ(once.coefficient(F::delta_g_1, T::epsilon), Rational(-1));
}

TEST(Substitute, CycleIsAnError) {
    Substitution s;
    s.set(T::t_1, TimeExpr(T::t_2));
    s.set(T::t_2, TimeExpr(T::t_1) + TimeExpr(T::T));
    EXPECT_THROW(substitute(LinearPhase::term(F::omega_1, T::T), s), std::invalid_argument);
    Substitution self;
    self.set(F::omega_1, FreqExpr(F::omega_1) + FreqExpr(F::delta_1));
    EXPECT_THROW(self.check_acyclic(), std::invalid_argument);
}

// Relative phase of the standard single-photon scheme written out by hand:
// (w2 - w1) t0 - (Dg2 - Dg1) T, plus the known path term.
TEST(Substitute, HandExpandedStandardPhase) {
    LinearPhase phi = LinearPhase::term(F::omega_2, T::t_0) - LinearPhase::term(F::omega_1, T::t_0) -
                      LinearPhase::term(F::delta_g_2, T::T) + LinearPhase::term(F::delta_g_1, T::T);
    Substitution s;
    s.set(F::omega_1, FreqExpr(F::omega_bar_1) + FreqExpr(F::delta_1));
    s.set(F::omega_2, FreqExpr(F::omega_bar_2) + FreqExpr(F::delta_2));
    LinearPhase unknown = unknown_residual(substitute(phi, s));

    LinearPhase want;
    want.add_term(F::delta_2, T::t_0, 1);
    want.add_term(F::delta_1, T::t_0, -1);
    want.add_term(F::delta_g_2, T::T, -1);
    want.add_term(F::delta_g_1, T::T, 1);
    EXPECT_EQ(unknown, want);
}

TEST(UnknownResidual, LaserTermsAreKnown) {
    LinearPhase p = LinearPhase::term(F::laser_1, T::t_1) - LinearPhase::term(F::laser_2, T::t_0);
    EXPECT_TRUE(unknown_residual(p).is_zero());
}

TEST(UnknownResidual, PathTermReclassifiable) {
    LinearPhase p = LinearPhase::term(F::omega_0, T::delta_T, Rational(-1));
    EXPECT_TRUE(unknown_residual(p).is_zero());
    Classification cls;
    cls.set(F::omega_0, Tag::unknown);
    EXPECT_EQ(unknown_residual(p, cls), p);
}

TEST(Evaluate, Arithmetic) {
    Valuation v;
    EXPECT_EQ(evaluate(LinearPhase{}, v), 0.0);
    v.set(F::omega_1, 2.0 * std::numbers::pi * 1e6).set(T::tau, 1e-6);
    EXPECT_NEAR(evaluate(LinearPhase::term(F::omega_1, T::tau), v), 2.0 * std::numbers::pi, 1e-12);
}

TEST(Evaluate, MissingSymbolIsNamed) {
    Valuation v;
    v.set(F::omega_1, 1.0);
    try {
        (void)evaluate(LinearPhase::term(F::omega_1, T::t_2), v);
        FAIL() << "expected out_of_range";
    } catch (const std::out_of_range &e) {
        EXPECT_NE(std::string(e.what()).find("t2"), std::string::npos);
    }
    EXPECT_EQ(evaluate(LinearPhase::term(F::omega_1, T::unit, 3), v), 3.0);
}

TEST(Format, GroupsByTimeSymbol) {
    LinearPhase p = LinearPhase::term(F::delta_2, T::epsilon) - LinearPhase::term(F::delta_1, T::epsilon);
    EXPECT_EQ(to_string(p), "-(Δ₁ - Δ₂)·ε");
    EXPECT_EQ(to_string(LinearPhase{}), "0");
}

TEST(Properties, CanonicalFormIgnoresInsertionOrder) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto terms = random_terms(rng, 12);
        LinearPhase a = build(terms);
        std::shuffle(terms.begin(), terms.end(), rng);
        LinearPhase b = build(terms);
        EXPECT_EQ(a, b);
        for (const auto &[key, c] : a.terms()) {
            EXPECT_FALSE(c.is_zero());
        }
    }
}

TEST(Properties, EvaluateIsLinear) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        LinearPhase a = build(random_terms(rng, 8));
        LinearPhase b = build(random_terms(rng, 8));
        Valuation v = random_valuation(rng);
        double lhs = evaluate(combine(a, b, +1), v);
        double rhs = evaluate(a, v) + evaluate(b, v);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Properties, SubstitutionIsAHomomorphism) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        LinearPhase p = build(random_terms(rng, 10));
        Substitution s;
        s.set(T::t_1, TimeExpr(T::t_0) + TimeExpr(T::epsilon));
        s.set(T::t_2, TimeExpr(T::T) - TimeExpr(T::t_1, Rational(1, 2)));
        s.set(F::omega_1, FreqExpr(F::omega_bar_1) + FreqExpr(F::delta_1));
        s.set(F::delta_e_2, FreqExpr(F::delta_g_2, Rational(3, 7)));
        Valuation v = random_valuation(rng);
        // Consistent assignment: ruled symbols take the value of their expansion.
        v.set(T::t_1, evaluate(s.expand(T::t_1), v));
        v.set(T::t_2, evaluate(s.expand(T::t_2), v));
        v.set(F::omega_1, evaluate(s.expand(F::omega_1), v));
        v.set(F::delta_e_2, evaluate(s.expand(F::delta_e_2), v));
        double direct = evaluate(p, v);
        double substituted = evaluate(substitute(p, s), v);
        EXPECT_LE(std::abs(direct - substituted), 1e-11 * std::max(1.0, std::abs(direct)));
    }
}

TEST(Properties, ResidualPartitionIsExact) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        LinearPhase p = build(random_terms(rng, 10)) + LinearPhase::pi_multiple(Rational(1, 2));
        LinearPhase unknown = unknown_residual(p);
        LinearPhase known = known_part(p);
        EXPECT_EQ(unknown + known, p);
        for (const auto &[key, c] : known.terms()) {
            EXPECT_FALSE(Classification{}.is_unknown(key.first));
        }
    }
}
