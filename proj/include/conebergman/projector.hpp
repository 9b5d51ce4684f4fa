#pragma once

// Bergman projectors P_{s'} and P_{s',+} on grids, the cone operator T,
// operator-norm estimation for nonnegative matrices, the boundedness
// predicate for P_{s',+}, and the lifting f ↦ f∘π from a tube to a Siegel
// domain.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "conebergman/cone.hpp"
#include "conebergman/domain.hpp"
#include "conebergman/errors.hpp"
#include "conebergman/kernel.hpp"
#include "conebergman/lattice.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

/// max(1, p)' with the usual conventions 1' = ∞ and ∞' = 1.
inline double conjugate_exponent(double p) {
    if (!(p > 0.0)) throw argument_error("conjugate_exponent: p must be positive");
    p = std::max(1.0, p);
    if (p == 1.0) return INFINITY;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

struct ProjectorParams {
    SiegelDomain domain = SiegelDomain::upper_half_plane();
    double p = 2.0, q = 2.0;
    WeightVector s{1.0};
    WeightVector s_prime{-3.0};
    double c = 0.0;  // 0: closed form on the upper half-plane, 1 elsewhere

    double p_conj() const { return conjugate_exponent(p); }
    double q_conj() const { return conjugate_exponent(q); }
    double constant() const {
        if (c != 0.0) return c;
        return make_kernel_spec(domain, s_prime).c_s_prime;
    }
};

/// s' = b + d − 2s̃ on a rank-one domain with s̃ given, i.e. s' = −1 − 2s̃ on C_+.
inline WeightVector s_prime_from_tilde(const SiegelDomain& dom, const WeightVector& s_tilde) {
    return dom.b_vec() + dom.cone().d_vec() - 2.0 * s_tilde;
}

// ---------------------------------------------------------------------------
// Projectors on grids

namespace detail {

struct Quadrature {
    std::vector<DomainPoint> points;
    std::vector<double> weights;  // includes Δ^{b+d−s'}(h), i.e. Δ^{−s'}∘ρ dν_D
};

inline Quadrature projector_quadrature(const ProjectorParams& par, const GridFunction& f) {
    Quadrature qd;
    qd.points.resize(f.node_count());
    qd.weights.resize(f.node_count());
    const auto& dom = f.domain;
    const WeightVector wexp = dom.b_vec() + dom.cone().d_vec() - par.s_prime;
    std::vector<double> lw(f.layer_count());
    for (std::size_t k = 0; k < f.layer_count(); ++k)
        lw[k] = f.layer_measure[k] * power_function(dom.cone(), wexp, f.layers[k]);
    parallel_for(f.node_count(), [&](std::size_t i) {
        qd.points[i] = f.point(i);
        qd.weights[i] = f.weight[i] * lw[f.layer_of(i)];
    });
    return qd;
}

inline cplx int_power(cplx z, int k) {
    if (k < 0) return 1.0 / int_power(z, -k);
    cplx r = 1.0;
    while (k) {
        if (k & 1) r *= z;
        z *= z;
        k >>= 1;
    }
    return r;
}

template <bool Positive>
GridFunction apply_projector_impl(const ProjectorParams& par, const GridFunction& f, const GridFunction& out) {
    if (!projector_defined(f.domain, par.s_prime)) throw argument_error("projector: s' is outside the admissible range");
    if (f.domain.m() != out.domain.m() || f.domain.n() != out.domain.n())
        throw argument_error("projector: input and output grids live on different domains");
    const auto qd = projector_quadrature(par, f);
    const double c = par.constant();
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < f.node_count(); ++j)
        if (f.values[j] != 0.0) active.push_back(j);
    const bool upper_half_plane = f.domain.is_tube() && f.domain.cone().kind() == ConeKind::HalfLine;
    const double sp = par.s_prime[0];
    const bool integer_exponent = sp == std::round(sp) && std::abs(sp) < 64.0;
    std::vector<cplx> res(out.node_count());
    parallel_for(out.node_count(), [&](std::size_t i) {
        const DomainPoint w = out.point(i);
        std::vector<cplx> terms(active.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
            const std::size_t j = active[a];
            // conj B_{w}(w_j) = B_{w_j}(w)
            cplx b;
            if (upper_half_plane) {
                const cplx arg = (w.z[0] - std::conj(qd.points[j].z[0])) * cplx(0.0, -0.5);
                b = integer_exponent ? detail::int_power(arg, static_cast<int>(sp)) : std::exp(sp * std::log(arg));
            } else {
                b = bergman_kernel(f.domain, par.s_prime, w, qd.points[j]);
            }
            terms[a] = f.values[j] * (Positive ? cplx(std::abs(b)) : b) * qd.weights[j];
        }
        res[i] = c * pairwise_sum(terms);
    });
    return out.with_values(std::move(res));
}

} // namespace detail

/// P_{s'} f at the nodes of `out`, by quadrature against the nodes of f.
inline GridFunction apply_projector(const ProjectorParams& par, const GridFunction& f, const GridFunction& out) {
    return detail::apply_projector_impl<false>(par, f, out);
}

inline GridFunction apply_projector(const ProjectorParams& par, const GridFunction& f) {
    return apply_projector(par, f, f);
}

/// P_{s',+} f: the kernel replaced by its modulus.
inline GridFunction apply_positive_projector(const ProjectorParams& par, const GridFunction& f, const GridFunction& out) {
    return detail::apply_projector_impl<true>(par, f, out);
}

inline GridFunction apply_positive_projector(const ProjectorParams& par, const GridFunction& f) {
    return apply_positive_projector(par, f, f);
}

// ---------------------------------------------------------------------------
// Norms of nonnegative matrices between weighted ℓ^q spaces

/// Dense nonnegative matrix A (rows × cols) acting from ℓ^q(μ; a) to
/// ℓ^q(ν; b), where ‖g‖ = (Σ μ_j (a_j |g_j|)^q)^{1/q}.
struct PositiveOperator {
    std::size_t rows = 0, cols = 0;
    std::vector<double> entries;  // row-major
    std::vector<double> in_measure, in_scale;
    std::vector<double> out_measure, out_scale;

    double& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    static PositiveOperator square(std::size_t n) {
        PositiveOperator op;
        op.rows = op.cols = n;
        op.entries.assign(n * n, 0.0);
        op.in_measure.assign(n, 1.0);
        op.in_scale.assign(n, 1.0);
        op.out_measure.assign(n, 1.0);
        op.out_scale.assign(n, 1.0);
        return op;
    }

    std::vector<double> apply(const std::vector<double>& g) const {
        if (g.size() != cols) throw argument_error("PositiveOperator: size mismatch");
        std::vector<double> out(rows);
        parallel_for(rows, [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cols; ++j) acc += at(i, j) * g[j];
            out[i] = acc;
        });
        return out;
    }
};

inline double weighted_lq_norm(const std::vector<double>& g, const std::vector<double>& measure,
                               const std::vector<double>& scale, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, scale[i] * std::abs(g[i]));
        return m;
    }
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = measure[i] * std::pow(scale[i] * std::abs(g[i]), q);
    return std::pow(pairwise_sum(t), 1.0 / q);
}

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct PowerIterationOptions {
    int max_iterations = 200;
    double tolerance = 1e-8;
};

namespace detail {

// Largest eigenvalue of the symmetric tridiagonal matrix (alpha, beta) by
// Sturm-sequence bisection.
inline double tridiagonal_max_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const std::size_t k = alpha.size();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < k ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - r);
        hi = std::max(hi, alpha[i] + r);
    }
    auto count_below = [&](double x) {
        std::size_t c = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
            d = alpha[i] - x - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++c;
        }
        return c;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) == k) hi = mid;
        else lo = mid;
    }
    return hi;
}

// sqrt of the largest eigenvalue of AᵀA by Lanczos with full
// reorthogonalisation, started from the normalised all-ones vector.
inline NormEstimate lanczos_norm(const std::vector<double>& a, std::size_t m, std::size_t n,
                                 const PowerIterationOptions& opt) {
    auto apply_ata = [&](const std::vector<double>& x) {
        std::vector<double> y(m), z(n, 0.0);
        parallel_for(m, [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
            y[i] = acc;
        });
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) z[j] += a[i * n + j] * y[i];
        return z;
    };
    std::vector<std::vector<double>> V;
    std::vector<double> alpha, beta;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double prev = 0.0;
    NormEstimate out;
    out.converged = false;
    const std::size_t kmax = std::min<std::size_t>(static_cast<std::size_t>(opt.max_iterations), n);
    for (std::size_t k = 0; k < kmax; ++k) {
        V.push_back(v);
        std::vector<double> w = apply_ata(v);
        double al = 0.0;
        for (std::size_t j = 0; j < n; ++j) al += w[j] * v[j];
        alpha.push_back(al);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : V) {
                double d = 0.0;
                for (std::size_t j = 0; j < n; ++j) d += w[j] * u[j];
                for (std::size_t j = 0; j < n; ++j) w[j] -= d * u[j];
            }
        double b = 0.0;
        for (double t : w) b += t * t;
        b = std::sqrt(b);
        const double lam = tridiagonal_max_eigenvalue(alpha, beta);
        out.iterations = static_cast<int>(k + 1);
        out.value = std::sqrt(std::max(lam, 0.0));
        if (k > 0 && std::abs(lam - prev) <= opt.tolerance * lam) {
            out.converged = true;
            return out;
        }
        prev = lam;
        if (b <= 1e-14 * std::max(1.0, std::abs(al))) {
            out.converged = true;  // invariant subspace: the Ritz value is exact
            return out;
        }
        beta.push_back(b);
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / b;
    }
    if (kmax == n) out.converged = true;
    return out;
}

} // namespace detail

/// ‖A‖ from ℓ^q(μ; a) to ℓ^q(ν; b). For q = 1 the maximum over unit masses
/// and for q = ∞ the value at the constant vector are exact; for q = 2 the
/// Lanczos iteration on ÃᵀÃ is used, and for other 1 < q < ∞ the nonlinear
/// power iteration x ← ψ_{q'}(Ãᵀ ψ_q(Ã x)) is run from the
/// all-ones vector, where Ã is A in the normalised coordinates and
/// ψ_r(t) = t^{r−1}.
inline NormEstimate operator_norm(const PositiveOperator& op, double q, const PowerIterationOptions& opt = {}) {
    if (!(q >= 1.0)) throw argument_error("operator_norm: q must be at least 1");
    const std::size_t n = op.cols, m = op.rows;
    if (n == 0 || m == 0) throw argument_error("operator_norm: empty operator");
    for (double v : op.entries)
        if (v < 0.0 || std::isnan(v)) throw argument_error("operator_norm: entries must be nonnegative");
    auto in_factor = [&](std::size_t j) {
        return op.in_scale[j] * (std::isinf(q) ? 1.0 : std::pow(op.in_measure[j], 1.0 / q));
    };
    auto out_factor = [&](std::size_t i) {
        return op.out_scale[i] * (std::isinf(q) ? 1.0 : std::pow(op.out_measure[i], 1.0 / q));
    };
    std::vector<double> fin(n), fout(m);
    for (std::size_t j = 0; j < n; ++j) fin[j] = in_factor(j);
    for (std::size_t i = 0; i < m; ++i) fout[i] = out_factor(i);
    std::vector<double> a(m * n);
    parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = fout[i] * op.at(i, j) / fin[j];
    });
    for (double v : a)
        if (std::isinf(v)) return {INFINITY, 0, true};
    auto at = [&](std::size_t i, std::size_t j) { return a[i * n + j]; };

    if (q == 1.0) {
        std::vector<double> col(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) col[j] += at(i, j);
        return {*std::max_element(col.begin(), col.end()), 0, true};
    }
    if (std::isinf(q)) {
        std::vector<double> row(m);
        parallel_for(m, [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += at(i, j);
            row[i] = acc;
        });
        return {*std::max_element(row.begin(), row.end()), 0, true};
    }
    if (q == 2.0) return detail::lanczos_norm(a, m, n, opt);
    const double qc = q / (q - 1.0);
    auto lq = [&](const std::vector<double>& v) {
        std::vector<double> t(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) t[i] = std::pow(std::abs(v[i]), q);
        return std::pow(pairwise_sum(t), 1.0 / q);
    };
    std::vector<double> x(n, 1.0), y(m), z(n);
    double nx = lq(x);
    for (auto& v : x) v /= nx;
    double est = 0.0;
    NormEstimate out;
    out.converged = false;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        parallel_for(m, [&](std::size_t i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += at(i, j) * x[j];
            y[i] = acc;
        });
        const double val = lq(y);
        for (auto& v : y) v = std::pow(v, q - 1.0);
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) z[j] += at(i, j) * y[i];
        for (auto& v : z) v = std::pow(v, qc - 1.0);
        nx = lq(z);
        if (!(nx > 0.0)) {
            out = {val, it, true};
            return out;
        }
        for (std::size_t j = 0; j < n; ++j) x[j] = z[j] / nx;
        out.iterations = it;
        if (it > 1 && std::abs(val - est) <= opt.tolerance * val) {
            est = val;
            out.converged = true;
            break;
        }
        est = val;
    }
    out.value = est;
    return out;
}

// ---------------------------------------------------------------------------
// Verdicts over truncations

enum class Verdict { Bounded, Unbounded, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Unbounded: return "Unbounded";
    default: return "Inconclusive";
    }
}

struct VerdictRule {
    double bounded_ratio = 1.1;    // last/first below this: Bounded
    double unbounded_step = 1.25;  // every consecutive ratio at least this: Unbounded
};

struct OperatorReport {
    std::vector<double> truncation_levels;
    std::vector<double> norm_estimates;
    std::vector<bool> converged;
    Verdict verdict = Verdict::Inconclusive;
    double growth_ratio = 0.0;
};

inline Verdict classify(const std::vector<double>& est, const std::vector<bool>& converged, const VerdictRule& rule = {}) {
    if (est.size() < 3) throw argument_error("classify: need at least 3 truncation levels");
    bool unbounded = true;
    for (std::size_t i = 1; i < est.size(); ++i)
        if (!(est[i] >= rule.unbounded_step * est[i - 1]) && !std::isinf(est[i])) unbounded = false;
    if (unbounded) return Verdict::Unbounded;
    for (bool c : converged)
        if (!c) return Verdict::Inconclusive;
    if (est.back() / est.front() < rule.bounded_ratio) return Verdict::Bounded;
    return Verdict::Inconclusive;
}

inline OperatorReport make_report(std::vector<double> levels, std::vector<NormEstimate> est, const VerdictRule& rule = {}) {
    OperatorReport r;
    r.truncation_levels = std::move(levels);
    for (const auto& e : est) {
        r.norm_estimates.push_back(e.value);
        r.converged.push_back(e.converged);
    }
    r.growth_ratio = r.norm_estimates.back() / r.norm_estimates.front();
    r.verdict = classify(r.norm_estimates, r.converged, rule);
    return r;
}

// ---------------------------------------------------------------------------
// The cone operator
//     T f = Δ^s ∫_Ω f(h) Δ^{s'−(b+d)}(· + h) Δ^{b+d−s−s'}(h) dν_Ω(h)

inline double cone_kernel(const ConeDescriptor& cone, const WeightVector& s, const WeightVector& s_prime,
                          const WeightVector& bd, const Point& h, const Point& hp) {
    Point sum(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) sum[i] = h[i] + hp[i];
    return std::exp(std::log(power_function(cone, s, h)) + std::log(power_function(cone, s_prime - bd, sum)) +
                    std::log(power_function(cone, bd - s - s_prime, hp)));
}

/// T as a matrix on the points of a cone lattice, with cell measures.
inline PositiveOperator cone_operator_matrix(const ProjectorParams& par, const Lattice& L) {
    const auto& cone = par.domain.cone();
    const WeightVector bd = par.domain.b_vec() + cone.d_vec();
    auto op = PositiveOperator::square(L.size());
    parallel_for(L.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < L.size(); ++j)
            op.at(i, j) = cone_kernel(cone, par.s, par.s_prime, bd, L.points[i], L.points[j]) * L.cell_measures[j];
    });
    op.in_measure = L.cell_measures;
    op.out_measure = L.cell_measures;
    return op;
}

/// T g on the lattice.
inline std::vector<double> cone_operator_T(const ProjectorParams& par, const Lattice& L, const std::vector<double>& g) {
    return cone_operator_matrix(par, L).apply(g);
}

// ---------------------------------------------------------------------------
// P_{s',+} on horizontally flat functions
//
// For f(x, y) = g(y) on a tube, ∫_F |B_{(x,y)}(x', y')| dx' = 2^m J Δ^{s'−d}((y+y')/2)
// with J = ∫_F |Δ^{s'}(e − iu)| du, so P_{s',+} acts on g through
//     g ↦ c 2^m J ∫ g(y') Δ^{s'−d}((y+y')/2) Δ^{d−s'}(y') dν_Ω(y').
// Its norm on L^q(Δ^{sq} dν_Ω) is the norm of P_{s',+} on L^{p,q}_s for
// every p, since the horizontal factors of input and output cancel.

namespace detail {

// ∫_R (1 + u²)^{t/2} du
inline double power_line_integral(double t) {
    if (!(t < -1.0)) return INFINITY;
    return std::sqrt(std::numbers::pi) * std::exp(std::lgamma((-t - 1.0) / 2.0) - std::lgamma(-t / 2.0));
}

} // namespace detail

/// J = ∫_F |Δ^{s'}(e_Ω − iu)| du (+∞ when divergent). Closed form per leaf:
/// the half-line gives ∫(1+u²)^{s'/2} du; a Lorentz(k) leaf, after
/// integrating out u_0 − u_{k−1} and the middle coordinates, gives
/// ½ K(s'_2) π^{(k−2)/2} Γ(−s'_2 − k/2)/Γ(−s'_2 − 1) K(s'_1 + k − 2) with
/// K(t) = ∫(1+u²)^{t/2} du.
inline double horizontal_kernel_integral(const ConeDescriptor& cone, const WeightVector& s_prime) {
    double J = 1.0;
    for (const auto& l : cone.leaves()) {
        if (l.kind == ConeKind::HalfLine) {
            J *= detail::power_line_integral(s_prime[l.rank_offset]);
            continue;
        }
        const double s1 = s_prime[l.rank_offset], s2 = s_prime[l.rank_offset + 1];
        const double k = static_cast<double>(l.dim);
        if (!(s2 < -1.0) || !(s2 < -k / 2.0) || !(s1 < 1.0 - k)) return INFINITY;
        J *= 0.5 * detail::power_line_integral(s2) * std::pow(std::numbers::pi, (k - 2.0) / 2.0) *
             std::exp(std::lgamma(-s2 - k / 2.0) - std::lgamma(-s2 - 1.0)) * detail::power_line_integral(s1 + k - 2.0);
    }
    return J;
}

struct LayerQuadrature {
    std::vector<Point> points;
    std::vector<double> measures;  // ν_Ω
};

/// Tensor Gauss–Legendre quadrature over a chart box (ν_Ω weights).
inline LayerQuadrature chart_quadrature(const ConeDescriptor& cone, const ChartBox& box, double panel_width,
                                        std::size_t order) {
    const std::size_t D = cone.chart_dim();
    if (box.lo.size() != D) throw argument_error("chart_quadrature: chart box has wrong dimension");
    std::vector<QuadratureRule> axes;
    for (std::size_t a = 0; a < D; ++a) {
        const double len = box.hi[a] - box.lo[a];
        const std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / panel_width - 1e-9)));
        axes.push_back(composite_rule(box.lo[a], box.hi[a], panels, order));
    }
    std::size_t total = 1;
    for (const auto& r : axes) total *= r.size();
    LayerQuadrature out;
    out.points.resize(total);
    out.measures.resize(total);
    const double dens = chart_measure_density(cone);
    parallel_for(total, [&](std::size_t flat) {
        std::size_t rem = flat;
        Point c(D);
        double w = dens;
        for (std::size_t a = 0; a < D; ++a) {
            const std::size_t i = rem % axes[a].size();
            rem /= axes[a].size();
            c[a] = axes[a].nodes[i];
            w *= axes[a].weights[i];
        }
        out.points[flat] = chart_to_point(cone, c);
        out.measures[flat] = w;
    });
    return out;
}

/// The horizontally flat reduction of P_{s',+} on a tube as a matrix on a
/// layer quadrature, acting on L^q(Δ^{sq} dν_Ω).
inline PositiveOperator positive_projector_matrix(const ProjectorParams& par, const LayerQuadrature& lq) {
    if (!par.domain.is_tube()) throw unsupported_error("positive_projector_matrix: only tube domains are supported");
    const auto& cone = par.domain.cone();
    const double J = horizontal_kernel_integral(cone, par.s_prime);
    const double pre = par.constant() * std::pow(2.0, static_cast<double>(cone.ambient_dim())) * J;
    const std::size_t n = lq.points.size();
    auto op = PositiveOperator::square(n);
    const WeightVector a = par.s_prime - cone.d_vec();
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) col[j] = std::log(power_function(cone, -a, lq.points[j])) + std::log(lq.measures[j]);
    parallel_for(n, [&](std::size_t i) {
        Point mid(lq.points[i].size());
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t t = 0; t < mid.size(); ++t) mid[t] = 0.5 * (lq.points[i][t] + lq.points[j][t]);
            op.at(i, j) = std::isinf(pre) ? INFINITY : pre * std::exp(std::log(power_function(cone, a, mid)) + col[j]);
        }
    });
    op.in_measure = op.out_measure = lq.measures;
    for (std::size_t i = 0; i < n; ++i) op.in_scale[i] = op.out_scale[i] = power_function(cone, par.s, lq.points[i]);
    return op;
}

struct TruncationPlan {
    std::vector<double> half_widths{32.0, 64.0, 128.0, 256.0};  // chart box half-widths
    double delta = 0.125;                                        // lattice δ for T
    double panel_width = 1.0;                                    // chart panels for P_{s',+}
    std::size_t order = 8;
    PowerIterationOptions power{};
    VerdictRule rule{};
};

inline ChartBox truncation_box(const ConeDescriptor& cone, double half_width) {
    return ChartBox::cube(cone, half_width);
}

/// Norm estimates of T on L^q(ν_Ω) over growing chart boxes.
inline OperatorReport estimate_cone_operator_norm(const ProjectorParams& par, const TruncationPlan& plan) {
    std::vector<NormEstimate> est;
    for (double w : plan.half_widths) {
        const auto L = cone_lattice(par.domain.cone(), plan.delta, truncation_box(par.domain.cone(), w));
        est.push_back(operator_norm(cone_operator_matrix(par, L), par.q, plan.power));
    }
    return make_report(plan.half_widths, est, plan.rule);
}

/// Norm estimates of P_{s',+} on L^{p,q}_s over growing chart boxes.
inline OperatorReport estimate_positive_projector_norm(const ProjectorParams& par, const TruncationPlan& plan) {
    if (!(par.p >= 1.0)) throw argument_error("estimate_positive_projector_norm: p must be at least 1");
    std::vector<NormEstimate> est;
    const double J = horizontal_kernel_integral(par.domain.cone(), par.s_prime);
    for (double w : plan.half_widths) {
        if (std::isinf(J)) {
            est.push_back({INFINITY, 0, true});
            continue;
        }
        const auto lq = chart_quadrature(par.domain.cone(), truncation_box(par.domain.cone(), w), plan.panel_width, plan.order);
        est.push_back(operator_norm(positive_projector_matrix(par, lq), par.q, plan.power));
    }
    return make_report(plan.half_widths, est, plan.rule);
}

// ---------------------------------------------------------------------------
// Predicate

struct BoundednessPredicate {
    bool necessary_hold = false;
    std::optional<bool> sufficient_known;
};

/// s ≻ m/(2q), m'/(2q') and b + d − (s + s') ≻ m/(2q'), m'/(2q); the
/// conditions are also sufficient when the rank is at most 2.
inline BoundednessPredicate positive_boundedness_predicate(const ProjectorParams& par) {
    const auto& cone = par.domain.cone();
    const double iq = std::isinf(par.q) ? 0.0 : 1.0 / par.q;
    const double iqc = 1.0 - iq;
    const WeightVector m = cone.m_vec(), mp = cone.m_prime_vec();
    const WeightVector t = par.domain.b_vec() + cone.d_vec() - (par.s + par.s_prime);
    BoundednessPredicate r;
    r.necessary_hold = strictly_succ(par.s, 0.5 * iq * m) && strictly_succ(par.s, 0.5 * iqc * mp) &&
                       strictly_succ(t, 0.5 * iqc * m) && strictly_succ(t, 0.5 * iq * mp);
    if (cone.rank() <= 2) r.sufficient_known = r.necessary_hold;
    return r;
}

// ---------------------------------------------------------------------------
// Lifting from the tube F + iΩ to D

/// ι(f)(ζ, z) = f(z).
template <typename F>
auto lift(F&& f) {
    return [f = std::forward<F>(f)](const DomainPoint& w) { return f(w.z); };
}

/// The tube domain underlying D.
inline SiegelDomain underlying_tube(const SiegelDomain& dom) { return SiegelDomain::tube(dom.cone()); }

struct TransferenceResult {
    std::vector<double> ratios;    // ‖ι f‖_{A^{p,p}_s(D)} / ‖f‖_{A^{p,p}_{s−b/p}}, NaN where skipped
    std::vector<bool> skipped;
    double spread = 0.0;           // (max − min)/mean over non-skipped ratios
};

/// Ratios ‖ι f‖ / ‖f‖ for a family of tube functions, on a D-grid and a
/// tube grid that share layers.
template <typename Fn>
TransferenceResult transference_norm_check(const GridFunction& d_grid, const GridFunction& tube_grid,
                                           const std::vector<Fn>& family, double p, double q, const WeightVector& s) {
    if (p != q) throw argument_error("transference_norm_check: needs p = q");
    if (d_grid.domain.n() == 0) throw argument_error("transference_norm_check: D must have n > 0");
    const WeightVector st = s - d_grid.domain.b_vec() / p;
    TransferenceResult r;
    std::vector<double> good;
    for (const auto& f : family) {
        const auto gd = d_grid.sampled(lift(f));
        const auto gt = tube_grid.sampled([&](const DomainPoint& w) { return f(w.z); });
        const double den = mixed_norm(gt, p, p, st);
        if (den == 0.0) {
            r.ratios.push_back(NAN);
            r.skipped.push_back(true);
            continue;
        }
        const double v = mixed_norm(gd, p, p, s) / den;
        r.ratios.push_back(v);
        r.skipped.push_back(false);
        good.push_back(v);
    }
    if (!good.empty()) {
        const auto [lo, hi] = std::minmax_element(good.begin(), good.end());
        double mean = 0.0;
        for (double v : good) mean += v / static_cast<double>(good.size());
        r.spread = (*hi - *lo) / mean;
    }
    return r;
}

/// The constant C' with ‖ι f‖_{A^{2,2}_s(D)} = C' ‖f‖_{A^{2,2}_{s−b/2}} on the
/// Siegel half-space of dimension n over the half-line:
/// C'² = π^n Γ(2s) / Γ(2s + n).
inline double transference_constant_halfline(std::size_t n, double s) {
    const double nn = static_cast<double>(n);
    return std::exp(0.5 * (nn * std::log(std::numbers::pi) + std::lgamma(2.0 * s) - std::lgamma(2.0 * s + nn)));
}

} // namespace conebergman
