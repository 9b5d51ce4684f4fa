#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conebergman/kernel.hpp"

using namespace conebergman;

namespace {

DomainPoint hp_point(cplx z) { return {{}, {z}}; }

DomainPoint random_siegel_point(const SiegelDomain& dom, Rng& rng) {
    DomainPoint w;
    w.zeta.resize(dom.n());
    for (auto& c : w.zeta) c = cplx(rng.normal(), rng.normal());
    const Point ph = dom.phi(w.zeta);
    w.z = {cplx(rng.normal(), ph[0] + rng.log_uniform(0.05, 20.0))};
    return w;
}

// Re w ∈ Ω, Im w arbitrary
CPoint random_log_point(const ConeDescriptor& cone, Rng& rng) {
    const Point x = detail::random_cone_point(cone, rng, 2.0, 2.0);
    CPoint w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = cplx(x[i], rng.uniform(-5.0, 5.0));
    return w;
}

// Im w ∈ Ω, Re w arbitrary
CPoint random_tube_point(const ConeDescriptor& cone, Rng& rng) {
    const Point y = detail::random_cone_point(cone, rng, 2.0, 2.0);
    CPoint w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) w[i] = cplx(rng.uniform(-5.0, 5.0), y[i]);
    return w;
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    return sxy / sxx;
}

} // namespace

TEST(BergmanKernel, HalfPlaneMatchesClosedForm) {
    const auto hp = SiegelDomain::upper_half_plane();
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const cplx z(rng.normal(), rng.log_uniform(1e-2, 1e2)), w(rng.normal(), rng.log_uniform(1e-2, 1e2));
        const double sp = rng.uniform(-6.0, 2.0);
        const cplx expect = std::pow((z - std::conj(w)) / cplx(0.0, 2.0), sp);
        EXPECT_NEAR(std::abs(bergman_kernel(hp, WeightVector{sp}, hp_point(z), hp_point(w)) - expect), 0.0,
                    1e-12 * std::abs(expect));
    }
    // B_{i}(i) = 1 for every exponent
    EXPECT_NEAR(std::abs(bergman_kernel(hp, WeightVector{-3.7}, hp_point({0, 1}), hp_point({0, 1})) - 1.0), 0.0, 1e-15);
}

TEST(BergmanKernel, SiegelHalfSpaceHermitian) {
    const auto dom = SiegelDomain::siegel_half_space(2);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_siegel_point(dom, rng), b = random_siegel_point(dom, rng);
        const WeightVector sp{-2.5};
        const cplx kab = bergman_kernel(dom, sp, a, b), kba = bergman_kernel(dom, sp, b, a);
        EXPECT_NEAR(std::abs(kab - std::conj(kba)), 0.0, 1e-11 * std::abs(kab));
        // direct formula with Φ(ζ, ζ') = Σ ζ_j conj ζ'_j
        cplx arg = (a.z[0] - std::conj(b.z[0])) / cplx(0.0, 2.0);
        for (std::size_t j = 0; j < 2; ++j) arg -= a.zeta[j] * std::conj(b.zeta[j]);
        EXPECT_NEAR(std::abs(kab - std::pow(arg, -2.5)), 0.0, 1e-11 * std::abs(kab));
        // on the diagonal the argument is ρ
        EXPECT_NEAR(std::abs(bergman_kernel(dom, sp, a, a) - std::pow(rho(dom, a)[0], -2.5)), 0.0,
                    1e-10 * std::abs(kab) + 1e-12);
    }
}

TEST(LogBranch, AgreesWithPowerFunction) {
    Rng rng(7);
    for (const auto& cone : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::lorentz(5),
                             ConeDescriptor::product({ConeDescriptor::lorentz(3), ConeDescriptor::half_line()})}) {
        for (int i = 0; i < 40; ++i) {
            WeightVector s(cone.rank());
            for (std::size_t j = 0; j < cone.rank(); ++j) s[j] = rng.uniform(-6.0, 6.0);
            const CPoint w = random_log_point(cone, rng);
            const cplx lb = log_branch(cone, s, w);
            EXPECT_NEAR(std::abs(std::exp(lb) - power_function(cone, s, w)), 0.0,
                        1e-10 * std::abs(power_function(cone, s, w)));
            EXPECT_NEAR(std::abs(lb - log_power_function(cone, s, w)), 0.0, 1e-9);
        }
        WeightVector one(cone.rank());
        for (std::size_t j = 0; j < cone.rank(); ++j) one[j] = 1.0;
        EXPECT_NEAR(std::abs(log_branch(cone, one, complexify(cone.e_omega()))), 0.0, 1e-15);
    }
    // approaching i along the half-line: log z → iπ/2
    const cplx l = log_branch(ConeDescriptor::half_line(), WeightVector{1.0}, {cplx(1e-12, 1.0)});
    EXPECT_NEAR(l.real(), 0.0, 1e-12);
    EXPECT_NEAR(l.imag(), std::numbers::pi / 2.0, 1e-11);
    EXPECT_THROW(log_branch(ConeDescriptor::half_line(), WeightVector{1.0}, {cplx(-1.0, 1.0)}), domain_error);
}

TEST(LogBranch, ContinuationErrorWhenRefinementExhausted) {
    LogBranchOptions opt;
    opt.initial_steps = 1;
    opt.max_halvings = 0;
    // a single step from e to (1e-3 + 10i, 0, 0) turns Δ_2 by nearly π
    const CPoint w{cplx(1e-3, 10.0), 0.0, 0.0};
    EXPECT_THROW(log_branch(ConeDescriptor::lorentz(3), WeightVector{1.0, 1.0}, w, opt), continuation_error);
    EXPECT_NO_THROW(log_branch(ConeDescriptor::lorentz(3), WeightVector{1.0, 1.0}, w));
}

TEST(Oscillation, WithinAbsWeightTimesPi) {
    for (const auto& [cone, s] : std::vector<std::pair<ConeDescriptor, WeightVector>>{
             {ConeDescriptor::half_line(), WeightVector{1.0}},
             {ConeDescriptor::half_line(), WeightVector{-2.5}},
             {ConeDescriptor::lorentz(3), WeightVector{1.0, 2.0}},
             {ConeDescriptor::lorentz(4), WeightVector{-1.5, 0.5}},
             {ConeDescriptor::product({ConeDescriptor::lorentz(3), ConeDescriptor::half_line()}),
              WeightVector{2.0, -1.0, 0.5}}}) {
        const auto r = oscillation_check(cone, s, 2000, 11);
        EXPECT_TRUE(r.within_bound()) << cone.describe() << " spread " << r.spread << " bound " << r.bound;
        EXPECT_NEAR(r.bound, abs_weight(cone, s) * std::numbers::pi, 1e-12);
    }
    // the half-line bound is sharp: arg z ranges over (−π/2, π/2)
    const auto r = oscillation_check(ConeDescriptor::half_line(), WeightVector{1.0}, 4000, 2);
    EXPECT_GT(r.spread, 0.95 * std::numbers::pi);
    EXPECT_THROW(oscillation_check(ConeDescriptor::half_line(), WeightVector{1.0}, 1, 2), argument_error);
}

TEST(RatioBound, SweepHasNoViolations) {
    for (const auto& cone : {ConeDescriptor::half_line(), ConeDescriptor::lorentz(3), ConeDescriptor::lorentz(6),
                             ConeDescriptor::product({ConeDescriptor::half_line(), ConeDescriptor::lorentz(4)})}) {
        const auto r = ratio_sweep(cone, 3000, 17);
        EXPECT_EQ(r.violations, 0u) << cone.describe();
        EXPECT_GE(r.min_margin, -1e-9);
    }
    // half-line, s = 1: |x + iy| / (x + y) at x = y equals 2^{−1/2}
    EXPECT_NEAR(ratio_bound_check(ConeDescriptor::half_line(), WeightVector{1.0}, {2.0}, {2.0}), std::sqrt(0.5), 1e-15);
    EXPECT_THROW(ratio_bound_check(ConeDescriptor::half_line(), WeightVector{1.0}, {-2.0}, {2.0}), domain_error);
}

TEST(PolynomialRatio, BoundsAndSharpness) {
    const auto r = polynomial_sweep(20000, 6, 23);
    EXPECT_EQ(r.violations, 0u);
    // zeros at −x attain 2^{−k/2}; zeros at 0 attain 1
    for (std::size_t k = 1; k <= 5; ++k) {
        const auto [a, b] = polynomial_ratio(std::vector<double>(k, -3.0), 3.0);
        EXPECT_NEAR(a, std::pow(2.0, -0.5 * k), 1e-14);
        EXPECT_NEAR(b, a, 1e-15);
        EXPECT_NEAR(polynomial_ratio(std::vector<double>(k, 0.0), 3.0).first, 1.0, 1e-14);
    }
    EXPECT_THROW(polynomial_ratio({1.0}, 2.0), argument_error);
}

TEST(ReproducingConstant, HalfPlane) {
    // ∫ |((z + i)/(2i))^{−3}|² y³ dx dy / y² = 64 ∫ y · 3π / (8 (y+1)^5) dy = 2π
    EXPECT_NEAR(halfplane_reproducing_constant(-3.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    const cplx c = halfplane_formula_constant(0.5);
    EXPECT_NEAR(c.real(), -2.0 / std::numbers::pi, 1e-14);
    EXPECT_NEAR(c.imag(), 0.0, 1e-14);
    for (double sigma : {0.5, 1.0, 2.25}) {
        const cplx rel = halfplane_formula_constant(sigma) * std::pow(cplx(0.0, 2.0), -1.0 - 2.0 * sigma) / 2.0;
        EXPECT_NEAR(std::abs(rel - halfplane_reproducing_constant(-1.0 - 2.0 * sigma)), 0.0, 1e-14);
    }
    EXPECT_THROW(halfplane_reproducing_constant(-0.5), argument_error);

    GridSpec spec;
    spec.resolution = 64;
    spec.scale_offset = 1.0;
    const auto [layers, meas] = half_line_layers(1e-6, 1e5, 40, 16);
    const auto g = make_grid(SiegelDomain::upper_half_plane(), layers, meas, spec);
    const double cal = calibrate_reproducing_constant(SiegelDomain::upper_half_plane(), WeightVector{-3.0}, g);
    EXPECT_NEAR(cal * 2.0 * std::numbers::pi, 1.0, 1e-6);
    EXPECT_NEAR(make_kernel_spec(SiegelDomain::upper_half_plane(), WeightVector{-3.0}).c_s_prime,
                1.0 / (2.0 * std::numbers::pi), 1e-15);
}

TEST(ProjectorDefined, Range) {
    const auto hp = SiegelDomain::upper_half_plane();
    EXPECT_TRUE(projector_defined(hp, WeightVector{-1.5}));
    EXPECT_FALSE(projector_defined(hp, WeightVector{-1.0}));
    const auto lt = SiegelDomain::tube(ConeDescriptor::lorentz(3));
    // b + d − m/2 = (−1.5, −2)
    EXPECT_TRUE(projector_defined(lt, WeightVector{-2.0, -2.5}));
    EXPECT_FALSE(projector_defined(lt, WeightVector{-2.0, -2.0}));
}

TEST(LogIntegral, PredicateMatchesTruncationGrowth) {
    const auto hl = ConeDescriptor::half_line();
    struct Case {
        double s1, s3, alpha;
    };
    for (const auto& c : {Case{-1.0, 0.5, 0.0}, Case{-0.5, 0.5, -2.0}, Case{-0.5, 0.5, -0.5}, Case{-0.5, 0.5, -1.0},
                          Case{-1.0, -0.2, 0.0}, Case{-1.0, 0.0, -3.0}, Case{0.3, 0.5, 0.0}, Case{-3.0, 1.0, 1.0}}) {
        const bool finite = log_integral_finite(hl, WeightVector{c.s1}, WeightVector{1.0}, WeightVector{c.s3}, c.alpha);
        // increments over successive doublings of the truncation: a tail
        // like L^{1+α} (α < −1) halves at least, log or power growth does not
        const double i1 = log_integral_halfline(c.s1, 1.0, c.s3, c.alpha, 40.0);
        const double i2 = log_integral_halfline(c.s1, 1.0, c.s3, c.alpha, 80.0);
        const double i3 = log_integral_halfline(c.s1, 1.0, c.s3, c.alpha, 160.0);
        if (finite) EXPECT_LT(i3 - i2, 0.6 * (i2 - i1) + 1e-12 * i3) << c.s1 << ' ' << c.s3 << ' ' << c.alpha;
        else EXPECT_GT(i3 - i2, 0.9 * (i2 - i1)) << c.s1 << ' ' << c.s3 << ' ' << c.alpha;
    }
    const auto lt = ConeDescriptor::lorentz(4);
    // m/2 = (0, 1), −m'/2 = (−1, 0)
    EXPECT_TRUE(log_integral_finite(lt, WeightVector{-3.0, -2.0}, WeightVector{1.0, 1.0}, WeightVector{1.5, 1.5}, 0.0));
    EXPECT_FALSE(log_integral_finite(lt, WeightVector{-3.0, -2.0}, WeightVector{1.0, 1.0}, WeightVector{1.5, 0.9}, 0.0));
    EXPECT_FALSE(log_integral_finite(lt, WeightVector{-2.5, -1.5}, WeightVector{1.0, 1.0}, WeightVector{1.5, 1.5}, 0.0));
    EXPECT_TRUE(log_integral_finite(lt, WeightVector{-2.5, -1.5}, WeightVector{1.0, 1.0}, WeightVector{1.5, 1.5}, -1.5));
    EXPECT_THROW(log_integral_finite(lt, WeightVector{-1, -1}, WeightVector{0.0, 1.0}, WeightVector{1, 1}, 0.0),
                 argument_error);
}

TEST(Witness, HalfPlaneDecayAndClosedForm) {
    const auto hp = SiegelDomain::upper_half_plane();
    for (double y : {0.1, 1.0, 7.0, 300.0}) {
        const cplx g = witness_function(hp, WeightVector{-1.0}, -1.0, hp_point({0.0, y}));
        const double u = (1.0 + y) / 2.0;
        EXPECT_NEAR(g.real(), 1.0 / u / (1.0 + std::log(u)), 1e-13);
        EXPECT_NEAR(g.imag(), 0.0, 1e-13);
    }
    std::vector<double> xs, ys;
    for (double ly = 10.0; ly <= 12.0; ly += 0.25) {
        xs.push_back(ly * std::log(10.0));
        ys.push_back(std::log(std::abs(witness_function(hp, WeightVector{-1.0}, -1.0, hp_point({0.0, std::pow(10.0, ly)})))));
    }
    EXPECT_NEAR(slope(xs, ys), -1.0, 0.05);
    EXPECT_THROW(witness_function(hp, WeightVector{0.5}, -1.0, hp_point({0.0, 1.0})), argument_error);
    EXPECT_THROW(witness_function(hp, WeightVector{-1.0}, 0.5, hp_point({0.0, 1.0})), argument_error);
}

TEST(Witness, KernelModulusOnHalfLineDomains) {
    // ((z + i)/(2i)) has real part (1 + Im z)/2: the modulus of B^{s'} with
    // s' ≥ 0 is at least 1 once Im z ≥ 1, and can drop to 2^{−s'} near the
    // boundary.
    Rng rng(29);
    const auto hp = SiegelDomain::upper_half_plane();
    const auto sh = SiegelDomain::siegel_half_space(2);
    for (int i = 0; i < 500; ++i) {
        const double sp = rng.uniform(0.0, 3.0);
        const DomainPoint w = hp_point({rng.normal() * 10.0, rng.log_uniform(1.0, 1e3)});
        EXPECT_GE(std::abs(bergman_kernel(hp, WeightVector{sp}, w, base_point(hp))), 1.0 - 1e-12);
        auto v = random_siegel_point(sh, rng);
        v.z[0] += cplx(0.0, 1.0);
        EXPECT_GE(std::abs(bergman_kernel(sh, WeightVector{sp}, v, base_point(sh))), 1.0 - 1e-12);
    }
    const double near = std::abs(bergman_kernel(hp, WeightVector{2.0}, hp_point({0.0, 1e-9}), base_point(hp)));
    EXPECT_NEAR(near, 0.25, 1e-8);
}

TEST(Witness, TrivialCasesAndContinuation) {
    Rng rng(31);
    const auto lt = SiegelDomain::tube(ConeDescriptor::lorentz(3));
    const auto sh = SiegelDomain::siegel_half_space(1);
    const WeightVector s1{-1.0, -0.5};
    EXPECT_NEAR(std::abs(witness_function(lt, s1, -1.0, base_point(lt)) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(witness_function(sh, WeightVector{-1.2}, -0.7, base_point(sh)) - 1.0), 0.0, 1e-14);
    for (int i = 0; i < 200; ++i) {
        const DomainPoint w{{}, random_tube_point(lt.cone(), rng)};
        const cplx b = bergman_kernel(lt, s1, w, base_point(lt));
        EXPECT_NEAR(std::abs(witness_function(lt, s1, 0.0, w) - b), 0.0, 1e-12 * std::abs(b));
        // the outer branch agrees with the principal one wherever 1 + log B stays in the right half-plane
        const cplx inner = 1.0 - log_power_function(lt.cone(), s1, kernel_argument(lt, w, base_point(lt)));
        if (inner.real() > 0.0) {
            const cplx g = witness_function(lt, s1, -1.5, w);
            const cplx expect = b * std::pow(inner, -1.5);
            EXPECT_NEAR(std::abs(g - expect), 0.0, 1e-10 * std::abs(expect));
        }
    }
}

TEST(LogBranch, LinearInTheExponent) {
    Rng rng(37);
    const auto cone = ConeDescriptor::lorentz(4);
    for (int i = 0; i < 100; ++i) {
        const WeightVector s{rng.uniform(-3, 3), rng.uniform(-3, 3)}, t{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        const CPoint w = random_log_point(cone, rng);
        const cplx lhs = log_branch(cone, a * s + b * t, w);
        const cplx rhs = a * log_branch(cone, s, w) + b * log_branch(cone, t, w);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * (1.0 + std::abs(lhs)));
    }
}

TEST(Oscillation, LorentzUnitWeightLargeSample) {
    const auto r = oscillation_check(ConeDescriptor::lorentz(3), WeightVector{1.0, 1.0}, 10000, 41);
    EXPECT_NEAR(r.bound, 2.0 * std::numbers::pi, 1e-12);
    EXPECT_LE(r.spread, r.bound + 1e-9);
    EXPECT_EQ(oscillation_check(ConeDescriptor::lorentz(3), WeightVector{0.0, 0.0}, 50, 1).spread, 0.0);
}

TEST(RatioBound, VanishingImaginaryPart) {
    const auto cone = ConeDescriptor::lorentz(3);
    const Point x{2.0, 0.5, -0.7};
    Point y = cone.e_omega();
    for (auto& v : y) v *= 1e-6;
    EXPECT_NEAR(ratio_bound_check(cone, WeightVector{1.5, -2.0}, x, y), 1.0, 1e-4);
}
