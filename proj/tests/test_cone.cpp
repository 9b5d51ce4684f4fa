#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conebergman/cone.hpp"

using namespace conebergman;

namespace {

constexpr double pi = std::numbers::pi;

// Independent 3-D quadrature of ∫ e^{-y_0} Δ^s(y) Δ_2(y)^{-3/2} dy over the
// Lorentz cone in R^3 using cylindrical coordinates y = (t, ρ cos θ, ρ sin θ),
// ρ = t r. Endpoint behaviour in r is smoothed by r = 1 - v^2.
double lorentz3_gamma_oracle(double s1, double s2) {
    const auto qt = composite_rule(-12.0, 5.0, 60, 20);  // log t
    const auto qv = composite_rule(0.0, 1.0, 8, 20);
    const auto qth = composite_rule(0.0, 2.0 * pi, 16, 20);
    double total = 0.0;
    for (std::size_t i = 0; i < qt.size(); ++i) {
        const double t = std::exp(qt.nodes[i]);
        double inner = 0.0;
        for (std::size_t j = 0; j < qv.size(); ++j) {
            const double v = qv.nodes[j];
            const double r = 1.0 - v * v;
            const double rho = t * r;
            const double q = t * t - rho * rho;
            double ang = 0.0;
            for (std::size_t k = 0; k < qth.size(); ++k) {
                const double d1 = t + rho * std::sin(qth.nodes[k]);
                ang += qth.weights[k] * std::pow(d1, s1 - s2);
            }
            // dy = ρ dρ dθ dt, dρ = t dr, dr = 2v dv
            inner += qv.weights[j] * ang * std::pow(q, s2 - 1.5) * rho * t * 2.0 * v;
        }
        total += qt.weights[i] * t * std::exp(-t) * inner;
    }
    return total;
}

double lorentz_gamma_closed_form(double k, double s1, double s2) {
    return std::pow(2.0 * pi, (k - 2.0) / 2.0) * std::pow(2.0, s1 + s2 - k / 2.0) * std::tgamma(s1) *
           std::tgamma(s2 - (k - 2.0) / 2.0);
}

Point random_lorentz_point(Rng& rng, std::size_t dim) {
    Point y(dim);
    double r2 = 0.0;
    for (std::size_t j = 1; j < dim; ++j) {
        y[j] = rng.uniform(-1.0, 1.0);
        r2 += y[j] * y[j];
    }
    y[0] = std::sqrt(r2) + rng.log_uniform(0.05, 3.0);
    return y;
}

} // namespace

TEST(ConeDescriptor, StructureVectors) {
    const auto h = ConeDescriptor::half_line();
    EXPECT_EQ(h.rank(), 1u);
    EXPECT_EQ(h.ambient_dim(), 1u);
    EXPECT_EQ(h.d_vec(), (WeightVector{-1.0}));
    EXPECT_EQ(h.m_vec(), (WeightVector{0.0}));

    const auto l = ConeDescriptor::lorentz(5);
    EXPECT_EQ(l.rank(), 2u);
    EXPECT_EQ(l.d_vec(), (WeightVector{-2.5, -2.5}));
    EXPECT_EQ(l.m_vec(), (WeightVector{0.0, 3.0}));
    EXPECT_EQ(l.m_prime_vec(), (WeightVector{3.0, 0.0}));

    const auto p = ConeDescriptor::product({h, ConeDescriptor::lorentz(3), h});
    EXPECT_EQ(p.rank(), 4u);
    EXPECT_EQ(p.ambient_dim(), 5u);
    EXPECT_EQ(p.d_vec(), (WeightVector{-1.0, -1.5, -1.5, -1.0}));
    EXPECT_THROW(ConeDescriptor::lorentz(2), argument_error);
}

TEST(ConeDescriptor, DIdentityFromMultiplicities) {
    for (const auto& c : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::lorentz(6),
                          ConeDescriptor::product({ConeDescriptor::lorentz(4), ConeDescriptor::half_line()})}) {
        EXPECT_EQ(c.d_from_multiplicities(), c.d_vec()) << c.describe();
    }
}

TEST(Contains, Examples) {
    EXPECT_TRUE(contains(ConeDescriptor::half_line(), {3.0}));
    EXPECT_FALSE(contains(ConeDescriptor::half_line(), {0.0}));
    const auto l = ConeDescriptor::lorentz(3);
    EXPECT_TRUE(contains(l, {1.0, 0.5, 0.5}));
    EXPECT_FALSE(contains(l, {1.0, 1.0, 0.0}));
    EXPECT_FALSE(contains(l, {-1.0, 0.0, 0.0}));
    EXPECT_THROW(contains(l, {1.0, 0.0}), argument_error);
}

TEST(PowerFunction, Examples) {
    EXPECT_NEAR(power_function(ConeDescriptor::half_line(), WeightVector{2.0}, Point{3.0}), 9.0, 1e-14);
    const auto l = ConeDescriptor::lorentz(3);
    EXPECT_NEAR(power_function(l, WeightVector{1.0, 1.0}, Point{2.0, 0.0, 0.0}), 4.0, 1e-14);
    EXPECT_NEAR(power_function(l, WeightVector{1.0, 0.0}, Point{2.0, 0.0, 0.0}), 2.0, 1e-14);
    EXPECT_THROW(power_function(l, WeightVector{1.0, 0.0}, Point{1.0, 1.0, 0.0}), domain_error);
    EXPECT_THROW(power_function(l, WeightVector{1.0}, Point{1.0, 0.0, 0.0}), argument_error);
}

TEST(PowerFunction, EqualsOneAtBasePoint) {
    Rng rng(7);
    for (const auto& c : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::lorentz(5)}) {
        for (int i = 0; i < 20; ++i) {
            WeightVector s(c.rank());
            for (std::size_t j = 0; j < s.size(); ++j) s[j] = rng.uniform(-5.0, 5.0);
            EXPECT_NEAR(power_function(c, s, c.e_omega()), 1.0, 1e-14);
            EXPECT_NEAR(dual_power_function(c, s, c.e_omega_prime()), 1.0, 1e-14);
        }
    }
}

TEST(PowerFunction, LorentzBasisElementsArePolynomial) {
    // Δ^{(1,0)} is linear and Δ^{(1,1)} is the quadratic form: compare against
    // the explicit polynomials at complex points.
    const auto l = ConeDescriptor::lorentz(4);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Point x = random_lorentz_point(rng, 4);
        CPoint w(4);
        for (std::size_t j = 0; j < 4; ++j) w[j] = cplx(x[j], rng.uniform(-3.0, 3.0));
        const cplx lin = w[0] + w[3];
        const cplx quad = w[0] * w[0] - w[1] * w[1] - w[2] * w[2] - w[3] * w[3];
        EXPECT_LT(std::abs(power_function(l, WeightVector{1.0, 0.0}, w) - lin), 1e-12 * std::abs(lin) + 1e-13);
        EXPECT_LT(std::abs(power_function(l, WeightVector{1.0, 1.0}, w) - quad), 1e-12 * std::abs(quad) + 1e-13);
    }
}

TEST(PowerFunction, HomogeneityAndMultiplicativity) {
    Rng rng(11);
    const auto c = ConeDescriptor::product({ConeDescriptor::lorentz(3), ConeDescriptor::half_line()});
    for (int i = 0; i < 200; ++i) {
        WeightVector s(3), t(3);
        for (std::size_t j = 0; j < 3; ++j) {
            s[j] = rng.uniform(-3.0, 3.0);
            t[j] = rng.uniform(-3.0, 3.0);
        }
        Point x = random_lorentz_point(rng, 3);
        x.push_back(rng.log_uniform(0.1, 10.0));
        CPoint w(4);
        for (std::size_t j = 0; j < 4; ++j) w[j] = cplx(x[j], rng.uniform(-2.0, 2.0));
        const double r = rng.log_uniform(0.1, 10.0);
        CPoint rw(w);
        for (auto& z : rw) z *= r;
        const cplx lhs = power_function(c, s, rw);
        const cplx rhs = std::pow(r, s.sum()) * power_function(c, s, w);
        EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
        const cplx prod = power_function(c, s, w) * power_function(c, t, w);
        EXPECT_LT(std::abs(power_function(c, s + t, w) - prod), 1e-12 * std::abs(prod));
    }
}

TEST(DualPowerFunction, Examples) {
    EXPECT_NEAR(dual_power_function(ConeDescriptor::half_line(), WeightVector{1.0}, Point{2.0}), 2.0, 1e-14);
    EXPECT_NEAR(dual_power_function(ConeDescriptor::lorentz(3), WeightVector{1.0, 1.0}, Point{2.0, 0.0, 0.0}), 4.0,
                1e-14);
    const auto pp = ConeDescriptor::product({ConeDescriptor::half_line(), ConeDescriptor::half_line()});
    EXPECT_NEAR(dual_power_function(pp, WeightVector{1.0, 2.0}, Point{2.0, 3.0}), 18.0, 1e-13);
}

TEST(Chart, RoundTripAndTPlusAction) {
    Rng rng(5);
    const auto c = ConeDescriptor::lorentz(4);
    for (int i = 0; i < 100; ++i) {
        const Point h = random_lorentz_point(rng, 4);
        const Point back = chart_to_point(c, point_to_chart(c, h));
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(back[j], h[j], 1e-12 * (1.0 + std::abs(h[j])));
        // t·e_Ω = h
        const Point te = tplus_apply(c, h, c.e_omega());
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(te[j], h[j], 1e-12 * (1.0 + std::abs(h[j])));
        // Δ^s(t·x) = Δ^s(h) Δ^s(x) characterises the triangular action.
        const Point x = random_lorentz_point(rng, 4);
        const WeightVector s{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double lhs = power_function(c, s, tplus_apply(c, h, x));
        const double rhs = power_function(c, s, h) * power_function(c, s, x);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
    }
}

TEST(InvariantDistance, Examples) {
    const auto h = ConeDescriptor::half_line();
    EXPECT_NEAR(invariant_distance(h, {1.0}, {std::exp(2.0)}), 2.0, 1e-14);
    const auto l = ConeDescriptor::lorentz(3);
    EXPECT_NEAR(invariant_distance(l, {1.0, 0.2, 0.1}, {1.0, 0.2, 0.1}), 0.0, 1e-7);
    EXPECT_NEAR(invariant_distance(l, {1.0, 0.0, 0.0}, {4.0, 0.0, 0.0}), std::sqrt(2.0) * std::log(4.0), 1e-12);
    EXPECT_THROW(invariant_distance(l, {1.0, 1.0, 0.0}, {1.0, 0.0, 0.0}), domain_error);
}

TEST(InvariantDistance, MetricPropertiesAndInvariance) {
    Rng rng(17);
    const auto c = ConeDescriptor::product({ConeDescriptor::lorentz(3), ConeDescriptor::half_line()});
    auto draw = [&] {
        Point p = random_lorentz_point(rng, 3);
        p.push_back(rng.log_uniform(0.1, 10.0));
        return p;
    };
    for (int i = 0; i < 200; ++i) {
        const Point x = draw(), y = draw(), z = draw();
        const double dxy = invariant_distance(c, x, y);
        EXPECT_NEAR(dxy, invariant_distance(c, y, x), 1e-10);
        EXPECT_LE(dxy, invariant_distance(c, x, z) + invariant_distance(c, z, y) + 1e-10);
        const double r = rng.log_uniform(0.01, 100.0);
        Point rx(x), ry(y);
        for (auto& v : rx) v *= r;
        for (auto& v : ry) v *= r;
        EXPECT_NEAR(invariant_distance(c, rx, ry), dxy, 1e-10);
        const Point g = draw();
        EXPECT_NEAR(invariant_distance(c, tplus_apply(c, g, x), tplus_apply(c, g, y)), dxy, 1e-8);
    }
}

TEST(AbsWeight, Examples) {
    EXPECT_NEAR(abs_weight(ConeDescriptor::half_line(), WeightVector{-2.5}), 2.5, 1e-14);
    const auto l = ConeDescriptor::lorentz(3);
    EXPECT_NEAR(abs_weight(l, WeightVector{1.0, 1.0}), 2.0, 1e-14);
    EXPECT_NEAR(abs_weight(l, WeightVector{1.0, 0.0}), 1.0, 1e-14);
    EXPECT_NEAR(abs_weight(l, WeightVector{0.0, 1.0}), 3.0, 1e-14);
}

TEST(GammaCone, HalfLineMatchesClassicalGamma) {
    const auto h = ConeDescriptor::half_line();
    EXPECT_NEAR(gamma_cone(h, WeightVector{2.0}), 1.0, 1e-10);
    EXPECT_NEAR(gamma_cone(h, WeightVector{0.5}) / std::sqrt(pi), 1.0, 1e-8);
    for (double s : {0.2, 0.7, 1.3, 3.5, 7.25}) EXPECT_NEAR(gamma_cone(h, WeightVector{s}) / std::tgamma(s), 1.0, 1e-8);
    EXPECT_THROW(gamma_cone(h, WeightVector{-0.5}), domain_error);
}

TEST(GammaCone, Lorentz3MatchesBruteForceOracle) {
    const auto l = ConeDescriptor::lorentz(3);
    const double oracle = lorentz3_gamma_oracle(3.0, 3.0);
    EXPECT_NEAR(oracle / (48.0 * pi), 1.0, 1e-6);
    EXPECT_NEAR(gamma_cone(l, WeightVector{3.0, 3.0}) / oracle, 1.0, 1e-4);
    const double o2 = lorentz3_gamma_oracle(4.0, 2.5);
    EXPECT_NEAR(gamma_cone(l, WeightVector{4.0, 2.5}) / o2, 1.0, 1e-4);
}

TEST(GammaCone, LorentzClosedFormAcrossDimensions) {
    for (std::size_t k : {3u, 4u, 5u}) {
        const auto l = ConeDescriptor::lorentz(k);
        const double kd = static_cast<double>(k);
        for (auto [s1, s2] : {std::pair{1.0, kd / 2.0}, std::pair{2.5, kd}, std::pair{0.6, (kd - 2.0) / 2.0 + 0.3}}) {
            const double exact = lorentz_gamma_closed_form(kd, s1, s2);
            EXPECT_NEAR(gamma_cone(l, WeightVector{s1, s2}) / exact, 1.0, 1e-5) << k << " " << s1 << " " << s2;
        }
    }
}

TEST(GammaCone, ConvergenceRegionIsHalfM) {
    const auto l = ConeDescriptor::lorentz(3);
    EXPECT_TRUE(gamma_converges(l, WeightVector{3.0, 0.6}));
    EXPECT_FALSE(gamma_converges(l, WeightVector{3.0, 0.5}));
    EXPECT_THROW(gamma_cone(l, WeightVector{3.0, 0.4}), domain_error);
    // Truncation growth: below the boundary the window integral keeps growing.
    auto growth = [&](double s2) {
        const double a = laplace_integral_window(l, WeightVector{3.0, s2}, l.e_omega(), 16.0, 6.0);
        const double b = laplace_integral_window(l, WeightVector{3.0, s2}, l.e_omega(), 32.0, 6.0);
        return b / a;
    };
    EXPECT_GT(growth(0.4), 1.5);
    EXPECT_GT(growth(0.5), 1.2);
    // Above it the missing tail is e^{-(2 s2 - 1) 16}.
    EXPECT_LT(growth(0.9), 1.0 + 2.0 * std::exp(-0.8 * 16.0));
    EXPECT_LT(growth(1.5), 1.0 + 1e-12);
}

TEST(LaplaceTransform, Examples) {
    const auto h = ConeDescriptor::half_line();
    EXPECT_NEAR(laplace_transform_check(h, WeightVector{2.0}, {5.0}), 1.0, 1e-10);
    EXPECT_NEAR(laplace_transform_check(h, WeightVector{3.0}, {2.0}), 2.0, 1e-10);
    const auto l = ConeDescriptor::lorentz(3);
    const double g = gamma_cone(l, WeightVector{3.0, 3.0});
    EXPECT_NEAR(laplace_transform_check(l, WeightVector{3.0, 3.0}, {2.0, 0.3, -0.1}) / g, 1.0, 1e-3);
}

TEST(LaplaceTransform, ConstantInLambda) {
    Rng rng(23);
    for (std::size_t k : {3u, 4u}) {
        const auto l = ConeDescriptor::lorentz(k);
        const WeightVector s{2.0, 1.7};
        const double g = gamma_cone(l, s);
        for (int i = 0; i < 10; ++i) {
            const Point lam = random_lorentz_point(rng, k);
            EXPECT_NEAR(laplace_transform_check(l, s, lam) / g, 1.0, 1e-6);
        }
    }
}
