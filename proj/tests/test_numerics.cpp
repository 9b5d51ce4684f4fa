#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conebergman/numerics.hpp"
#include "conebergman/weight.hpp"

using namespace conebergman;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (std::size_t n : {1u, 2u, 5u, 12u, 31u}) {
        const auto& g = gauss_legendre(n);
        for (std::size_t deg = 0; deg < 2 * n; ++deg) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += g.weights[i] * std::pow(g.nodes[i], static_cast<double>(deg));
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1.0);
            EXPECT_NEAR(acc, exact, 1e-13) << "n=" << n << " deg=" << deg;
        }
    }
}

TEST(GaussLegendre, RejectsZeroPoints) { EXPECT_THROW(gauss_legendre(0), argument_error); }

TEST(CompositeRule, GaussianIntegral) {
    const auto r = composite_rule(-10.0, 10.0, 20, 16);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * std::exp(-r.nodes[i] * r.nodes[i]);
    EXPECT_NEAR(acc, std::sqrt(std::numbers::pi), 1e-13);
}

TEST(PairwiseSum, MatchesNaiveOnIntegers) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    EXPECT_EQ(pairwise_sum(v), 999.0 * 1000.0 / 2.0);
}

TEST(Rng, DeterministicAndInRange) {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(ParallelFor, EachSlotWrittenOnce) {
    std::vector<int> hits(997, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(WeightVector, OrderingPredicates) {
    const WeightVector a{1.0, 2.0}, b{2.0, 3.0}, c{1.0, 3.0};
    EXPECT_TRUE(leq(a, b));
    EXPECT_TRUE(precedes(a, b));
    EXPECT_TRUE(precedes(a, a));
    EXPECT_FALSE(precedes(a, c));
    EXPECT_TRUE(leq(a, c));
    EXPECT_TRUE(strictly_succ(b, a));
    EXPECT_FALSE(strictly_succ(c, a));
    // ≺ implies ≤
    EXPECT_TRUE(!precedes(a, c) || leq(a, c));
}

TEST(WeightVector, ArithmeticAndMismatch) {
    const WeightVector a{1.0, 2.0};
    EXPECT_EQ(a + a, (WeightVector{2.0, 4.0}));
    EXPECT_EQ(-a, (WeightVector{-1.0, -2.0}));
    EXPECT_EQ(0.5 * a, (WeightVector{0.5, 1.0}));
    EXPECT_THROW(a + WeightVector{1.0}, argument_error);
    EXPECT_EQ(concat(a, WeightVector{3.0}).size(), 3u);
}
