#pragma once

// Weighted Bergman kernels
//     B^{s'}_{(ζ',z')}(ζ, z) = Δ^{s'}((z − conj z')/(2i) − Φ(ζ, ζ')),
// the holomorphic logarithm of Δ^s on Ω + iF, the oscillation and ratio
// bounds for it, and the witness family g^{s1,s2}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "conebergman/cone.hpp"
#include "conebergman/domain.hpp"
#include "conebergman/errors.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

// ---------------------------------------------------------------------------
// Logarithms

struct LogBranchOptions {
    int max_halvings = 40;
    std::size_t initial_steps = 8;
};

namespace detail {

struct ContinuedLogs {
    std::vector<cplx> values;
    std::vector<double> args;  // continuous arguments, 0 at t = 0 up to arg of the start values
};

/// Follows the arguments of the components of path(t), t ∈ [0, 1], refining
/// the step until every component turns by less than π/2.
template <typename Path>
ContinuedLogs continue_args(Path&& path, const LogBranchOptions& opt) {
    ContinuedLogs out;
    out.values = path(0.0);
    out.args.resize(out.values.size());
    for (std::size_t j = 0; j < out.values.size(); ++j) out.args[j] = std::arg(out.values[j]);
    double t = 0.0;
    double step = 1.0 / static_cast<double>(opt.initial_steps);
    int halvings = 0;
    std::vector<double> inc(out.values.size());
    while (t < 1.0) {
        const double t1 = std::min(1.0, t + step);
        const auto next = path(t1);
        bool ok = true;
        for (std::size_t j = 0; j < next.size(); ++j) {
            if (next[j] == 0.0) throw continuation_error("continuation passes through a zero");
            inc[j] = std::arg(next[j] / out.values[j]);
            if (std::abs(inc[j]) >= std::numbers::pi / 2.0) ok = false;
        }
        if (!ok) {
            step *= 0.5;
            if (++halvings > opt.max_halvings) throw continuation_error("step refinement exhausted");
            continue;
        }
        for (std::size_t j = 0; j < next.size(); ++j) out.args[j] += inc[j];
        out.values = next;
        t = t1;
    }
    return out;
}

} // namespace detail

/// log Δ^s(w) normalised by log Δ^s(e_Ω) = 0, continued along the segment
/// from e_Ω to w. Each minor is followed separately.
inline cplx log_branch(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w,
                       const LogBranchOptions& opt = {}) {
    if (!contains(cone, real_part(w))) throw domain_error("log_branch: Re(w) is not in the cone");
    const CPoint e = complexify(cone.e_omega());
    const auto exps = power_minors(cone, s, e).exponents;
    const auto c = detail::continue_args(
        [&](double t) {
            CPoint p(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) p[i] = (1.0 - t) * e[i] + t * w[i];
            return power_minors(cone, s, p).values;
        },
        opt);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < exps.size(); ++j) acc += exps[j] * cplx(std::log(std::abs(c.values[j])), c.args[j]);
    return acc;
}

// ---------------------------------------------------------------------------
// Kernels

struct KernelSpec {
    SiegelDomain domain;
    WeightVector s_prime;
    double c_s_prime = 1.0;
};

/// The argument (z − conj z')/(2i) − Φ(ζ, ζ') of the kernel.
inline CPoint kernel_argument(const SiegelDomain& dom, const DomainPoint& w, const DomainPoint& wp) {
    const std::size_t m = dom.m();
    CPoint a(m);
    const CPoint ph = dom.phi(w.zeta, wp.zeta);
    const cplx two_i(0.0, 2.0);
    for (std::size_t k = 0; k < m; ++k) a[k] = (w.z[k] - std::conj(wp.z[k])) / two_i - ph[k];
    return a;
}

/// B^{s'}_{(ζ',z')}(ζ, z).
inline cplx bergman_kernel(const SiegelDomain& dom, const WeightVector& s_prime, const DomainPoint& w,
                           const DomainPoint& wp) {
    return power_function(dom.cone(), s_prime, kernel_argument(dom, w, wp));
}

inline cplx bergman_kernel(const KernelSpec& spec, const DomainPoint& w, const DomainPoint& wp) {
    return bergman_kernel(spec.domain, spec.s_prime, w, wp);
}

/// log B^{s'}_{(ζ',z')}(ζ, z) on the continued branch.
inline cplx log_bergman_kernel(const SiegelDomain& dom, const WeightVector& s_prime, const DomainPoint& w,
                               const DomainPoint& wp) {
    return log_power_function(dom.cone(), s_prime, kernel_argument(dom, w, wp));
}

/// The base point (0, i e_Ω) of D.
inline DomainPoint base_point(const SiegelDomain& dom) {
    DomainPoint p;
    p.zeta.assign(dom.n(), 0.0);
    p.z.resize(dom.m());
    for (std::size_t k = 0; k < dom.m(); ++k) p.z[k] = cplx(0.0, dom.cone().e_omega()[k]);
    return p;
}

/// s′ ≺ b + d − m/2, the range where the projector P_{s′} is defined.
inline bool projector_defined(const SiegelDomain& dom, const WeightVector& s_prime) {
    return strictly_succ(dom.b_vec() + dom.cone().d_vec() - 0.5 * dom.cone().m_vec(), s_prime);
}

/// The constant in front of K_s on the upper half-plane, s (2i)^{2s+1} / π.
inline cplx halfplane_formula_constant(double s) {
    return s * std::pow(cplx(0.0, 2.0), 2.0 * s + 1.0) / std::numbers::pi;
}

/// Reproducing constant of B^{s'} on the upper half-plane with respect to
/// Δ^{−s'}(ρ) dν_D: c_{s'} = σ / (2π) with σ = (−1 − s')/2.
/// In terms of K_σ = c_σ (z − conj w)^{−1−2σ}, this equals
/// c_σ (2i)^{−1−2σ} / 2.
inline double halfplane_reproducing_constant(double s_prime) {
    const double sigma = (-1.0 - s_prime) / 2.0;
    if (!(sigma > 0.0)) throw argument_error("halfplane_reproducing_constant: need s' < −1");
    return sigma / (2.0 * std::numbers::pi);
}

/// Calibrated constant 1 / ∫ |B^{s'}_{(0,ie)}|² Δ^{−s'}∘ρ dν_D on a grid,
/// i.e. the value making P_{s'} reproduce B^{s'}_{(0,ie)} at the base point.
inline double calibrate_reproducing_constant(const SiegelDomain& dom, const WeightVector& s_prime,
                                             const GridFunction& grid) {
    const auto e = base_point(dom);
    std::vector<double> terms(grid.node_count());
    const WeightVector wexp = dom.b_vec() + dom.cone().d_vec() - s_prime;
    parallel_for(grid.node_count(), [&](std::size_t i) {
        const std::size_t k = grid.layer_of(i);
        const double b = std::abs(bergman_kernel(dom, s_prime, grid.point(i), e));
        terms[i] = b * b * grid.weight[i] * grid.layer_measure[k] * power_function(dom.cone(), wexp, grid.layers[k]);
    });
    return 1.0 / pairwise_sum(terms);
}

/// Kernel spec with the reproducing constant (closed form on the upper
/// half-plane, supplied otherwise).
inline KernelSpec make_kernel_spec(const SiegelDomain& dom, const WeightVector& s_prime, double c = 0.0) {
    KernelSpec k{dom, s_prime, c};
    if (c == 0.0) {
        if (dom.is_tube() && dom.cone().kind() == ConeKind::HalfLine) k.c_s_prime = halfplane_reproducing_constant(s_prime[0]);
        else k.c_s_prime = 1.0;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Oscillation and ratio bounds

namespace detail {

inline Point random_cone_point(const ConeDescriptor& cone, Rng& rng, double log_range, double gamma_range) {
    Point chart(cone.chart_dim());
    for (const auto& l : cone.leaves()) {
        chart[l.offset] = rng.uniform(-log_range, log_range);
        if (l.kind == ConeKind::Lorentz) {
            chart[l.offset + 1] = rng.uniform(-log_range, log_range);
            for (std::size_t j = 2; j < l.dim; ++j) chart[l.offset + j] = rng.uniform(-gamma_range, gamma_range);
        }
    }
    return chart_to_point(cone, chart);
}

inline Point random_vector(std::size_t m, Rng& rng, double lo, double hi) {
    Point v(m);
    double n2 = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        n2 += x * x;
    }
    const double r = rng.log_uniform(lo, hi) / std::sqrt(n2);
    for (auto& x : v) x *= r;
    return v;
}

} // namespace detail

struct OscillationResult {
    double min_imag, max_imag, spread, bound;
    std::size_t samples;
    bool within_bound() const { return spread <= bound + 1e-9; }
};

/// Samples w over a wide region of Ω + iF and records the spread of
/// Im log Δ^s(w); the bound is |s| π.
inline OscillationResult oscillation_check(const ConeDescriptor& cone, const WeightVector& s, std::size_t sample_count,
                                           std::uint64_t seed) {
    if (sample_count < 2) throw argument_error("oscillation_check: need at least 2 samples");
    Rng rng(seed);
    std::vector<CPoint> pts(sample_count);
    for (auto& w : pts) {
        const Point x = detail::random_cone_point(cone, rng, 4.0, 3.0);
        const Point y = detail::random_vector(cone.ambient_dim(), rng, 1e-3, 1e4);
        w.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) w[i] = cplx(x[i], y[i]);
    }
    std::vector<double> im(sample_count);
    parallel_for(sample_count, [&](std::size_t i) { im[i] = log_branch(cone, s, pts[i]).imag(); });
    const auto [lo, hi] = std::minmax_element(im.begin(), im.end());
    return {*lo, *hi, *hi - *lo, abs_weight(cone, s) * std::numbers::pi, sample_count};
}

/// |Δ^s(x + iy)| / Δ^s(x + y).
inline double ratio_bound_check(const ConeDescriptor& cone, const WeightVector& s, const Point& x, const Point& y) {
    if (!contains(cone, x) || !contains(cone, y)) throw domain_error("ratio_bound_check: point outside the cone");
    CPoint w(x.size());
    Point sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = cplx(x[i], y[i]);
        sum[i] = x[i] + y[i];
    }
    return std::exp(log_power_function(cone, s, w).real() - std::log(power_function(cone, s, sum)));
}

struct RatioSweep {
    std::size_t samples = 0, violations = 0;
    double min_margin = INFINITY;  // min over samples of the distance to the nearer bound, in log2 units
};

/// Random (s, x, y) with the ratio compared against 2^{±|s|/2}, for both
/// signs of the imaginary part.
inline RatioSweep ratio_sweep(const ConeDescriptor& cone, std::size_t samples, std::uint64_t seed, double s_range = 3.0) {
    Rng rng(seed);
    struct Case {
        WeightVector s;
        Point x, y;
    };
    std::vector<Case> cases(samples);
    for (auto& c : cases) {
        c.s = WeightVector(cone.rank());
        for (std::size_t j = 0; j < cone.rank(); ++j) c.s[j] = rng.uniform(-s_range, s_range);
        c.x = detail::random_cone_point(cone, rng, 3.0, 2.0);
        c.y = detail::random_cone_point(cone, rng, 3.0, 2.0);
    }
    std::vector<double> margin(samples);
    parallel_for(samples, [&](std::size_t i) {
        const auto& c = cases[i];
        const double half = abs_weight(cone, c.s) / 2.0;
        double mg = INFINITY;
        for (int sign : {1, -1}) {
            Point yy(c.y);
            for (auto& v : yy) v *= sign;
            CPoint w(c.x.size());
            Point sum(c.x.size());
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] = cplx(c.x[k], yy[k]);
                sum[k] = c.x[k] + c.y[k];
            }
            const double l2 = (log_power_function(cone, c.s, w).real() - std::log(power_function(cone, c.s, sum))) /
                              std::log(2.0);
            mg = std::min(mg, std::min(l2 + half, half - l2));
        }
        margin[i] = mg;
    });
    RatioSweep r;
    r.samples = samples;
    for (double m : margin) {
        r.violations += m < -1e-9;
        r.min_margin = std::min(r.min_margin, m);
    }
    return r;
}

/// |P(±ix)| / P(x) for P(z) = Π (z − x_j), x > 0, with every x_j ≤ 0.
inline std::pair<double, double> polynomial_ratio(const std::vector<double>& zeros, double x) {
    cplx pp = 1.0, pm = 1.0;
    double px = 1.0;
    for (double z : zeros) {
        if (z > 0.0) throw argument_error("polynomial_ratio: zeros must lie in (−∞, 0]");
        pp *= cplx(-z, x);
        pm *= cplx(-z, -x);
        px *= x - z;
    }
    return {std::abs(pp) / px, std::abs(pm) / px};
}

struct PolynomialSweep {
    std::size_t samples = 0, violations = 0;
};

/// Random polynomials of degree ≤ max_degree with zeros in R_− against
/// 2^{−k/2} ≤ |P(±ix)|/P(x) ≤ 1.
inline PolynomialSweep polynomial_sweep(std::size_t samples, std::size_t max_degree, std::uint64_t seed) {
    Rng rng(seed);
    PolynomialSweep r;
    r.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.next() % max_degree);
        std::vector<double> zeros(k);
        for (auto& z : zeros) z = rng.uniform() < 0.1 ? 0.0 : -rng.log_uniform(1e-3, 1e3);
        const double x = rng.log_uniform(1e-3, 1e3);
        const auto [a, b] = polynomial_ratio(zeros, x);
        const double lo = std::pow(2.0, -static_cast<double>(k) / 2.0);
        for (double v : {a, b})
            if (v < lo * (1.0 - 1e-12) || v > 1.0 + 1e-12) ++r.violations;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Integrability of Δ^{s1}(h+h')(1+|log Δ^{s2}(h+h')|)^α Δ^{s3}(h') dν(h')

/// Exact criterion: s3 ≻ m/2 and either s1+s3 ≤ −m'/2 with α < −1, or s1+s3 ≺ −m'/2.
inline bool log_integral_finite(const ConeDescriptor& cone, const WeightVector& s1, const WeightVector& s2,
                                const WeightVector& s3, double alpha) {
    if (!strictly_succ(s2, WeightVector(cone.rank()))) throw argument_error("log_integral_finite: need s2 ≻ 0");
    if (!strictly_succ(s3, 0.5 * cone.m_vec())) return false;
    const WeightVector t = s1 + s3;
    const WeightVector bound = -0.5 * cone.m_prime_vec();
    if (strictly_succ(bound, t)) return true;
    return leq(t, bound) && alpha < -1.0;
}

/// Truncated value of the integral on the half-line, h = 1, with h' = e^u,
/// u ∈ [−L, L].
inline double log_integral_halfline(double s1, double s2, double s3, double alpha, double L) {
    const auto r = composite_rule(-L, L, static_cast<std::size_t>(std::ceil(2.0 * L)) + 1, 16);
    std::vector<double> t(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double hp = std::exp(r.nodes[i]);
        const double a = 1.0 + hp;
        t[i] = r.weights[i] * std::pow(a, s1) * std::pow(1.0 + std::abs(s2 * std::log(a)), alpha) * std::pow(hp, s3);
    }
    return pairwise_sum(t);
}

// ---------------------------------------------------------------------------
// Witness family

/// g^{s1,s2} = B^{s1}_{(0,ie)} (1 + log B^{−s1}_{(0,ie)})^{s2}, s1 ≤ 0, s2 ≤ 0.
/// The outer logarithm of 1 + log B^{−s1} is continued along the segment
/// from (0, i e_Ω), where it vanishes.
inline cplx witness_function(const SiegelDomain& dom, const WeightVector& s1, double s2, const DomainPoint& w,
                             const LogBranchOptions& opt = {}) {
    if (!leq(s1, WeightVector(s1.size()))) throw argument_error("witness_function: need s1 ≤ 0");
    if (s2 > 0.0) throw argument_error("witness_function: need s2 ≤ 0");
    const auto e = base_point(dom);
    const WeightVector neg = -s1;
    auto inner_at = [&](const DomainPoint& p) {
        return 1.0 + log_power_function(dom.cone(), neg, kernel_argument(dom, p, e));
    };
    const cplx lg = inner_at(w) - 1.0;
    if (s2 == 0.0) return std::exp(-lg);
    const auto c = detail::continue_args(
        [&](double t) {
            DomainPoint p;
            p.zeta.resize(w.zeta.size());
            p.z.resize(w.z.size());
            for (std::size_t j = 0; j < p.zeta.size(); ++j) p.zeta[j] = t * w.zeta[j];
            for (std::size_t j = 0; j < p.z.size(); ++j) p.z[j] = (1.0 - t) * e.z[j] + t * w.z[j];
            return std::vector<cplx>{inner_at(p)};
        },
        opt);
    const cplx outer(std::log(std::abs(c.values[0])), c.args[0]);
    return std::exp(-lg + s2 * outer);
}

} // namespace conebergman
