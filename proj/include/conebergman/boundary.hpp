#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/cone.hpp"
#include "conebergman/domain.hpp"
#include "conebergman/errors.hpp"
#include "conebergman/lattice.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/projector.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

// Boundary values are described by spectral densities on Ω' (realised on F,
// so ⟨λ, z⟩ is the Euclidean pairing). A density u stands for the boundary
// distribution whose extension is
//     (Eu)(ζ, z) = c ∫_{Ω'} u(λ) e^{i⟨λ, z⟩} Δ'^{−b}(λ) dλ,
// which on N (Im z = Φ(ζ)) reads c ∫ u(λ) e^{⟨λ, ix − Φ(ζ)⟩} Δ'^{−b}(λ) dλ.

/// A density sampled on quadrature nodes of a truncation of Ω'.
struct SpectralDensity {
    ConeDescriptor cone = ConeDescriptor::half_line();
    std::vector<Point> nodes;
    std::vector<double> weights;  // Lebesgue dλ
    std::vector<cplx> values;

    std::size_t size() const noexcept { return nodes.size(); }

    SpectralDensity with_values(std::vector<cplx> v) const {
        if (v.size() != size()) throw argument_error("SpectralDensity: value count mismatch");
        SpectralDensity d = *this;
        d.values = std::move(v);
        return d;
    }

    /// Pointwise product with a multiplier m(λ).
    template <typename F>
    SpectralDensity multiplied(F&& m) const {
        std::vector<cplx> v(size());
        for (std::size_t i = 0; i < size(); ++i) v[i] = values[i] * m(nodes[i]);
        return with_values(std::move(v));
    }
};

/// Composite Gauss–Legendre nodes on [a, b] ⊂ (0, ∞) for the half-line.
template <typename F>
SpectralDensity density_on_interval(double a, double b, std::size_t panels, std::size_t order, F&& u) {
    if (!(a > 0.0) || !(b > a)) throw argument_error("density_on_interval: need 0 < a < b");
    const auto r = composite_rule(a, b, panels, order);
    SpectralDensity d;
    for (std::size_t i = 0; i < r.size(); ++i) {
        d.nodes.push_back({r.nodes[i]});
        d.weights.push_back(r.weights[i]);
        d.values.push_back(u(Point{r.nodes[i]}));
    }
    return d;
}

/// Tensor nodes over a chart box of the (self-dual) cone; dλ = Δ^{−d}(λ) dν.
template <typename F>
SpectralDensity density_on_chart(const ConeDescriptor& cone, const ChartBox& box, double panel_width, std::size_t order,
                                 F&& u) {
    const auto lq = chart_quadrature(cone, box, panel_width, order);
    SpectralDensity d;
    d.cone = cone;
    d.nodes = lq.points;
    for (std::size_t i = 0; i < lq.points.size(); ++i) {
        d.weights.push_back(lq.measures[i] * power_function(cone, -1.0 * cone.d_vec(), lq.points[i]));
        d.values.push_back(u(lq.points[i]));
    }
    return d;
}

/// True when the support comes within relative distance tol of ∂Ω': on a
/// half-line factor when min λ / max λ < tol over the support, on a Lorentz
/// factor when Δ2(λ)/|λ|² < tol at some node. Extensions then decay slowly.
inline bool touches_boundary(const SpectralDensity& u, double tol = 1e-3) {
    for (const auto& leaf : u.cone.leaves()) {
        const std::size_t o = leaf.offset;
        double lo = INFINITY, hi = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.values[i] == 0.0) continue;
            const Point& l = u.nodes[i];
            if (leaf.kind == ConeKind::HalfLine) {
                lo = std::min(lo, l[o]);
                hi = std::max(hi, l[o]);
                continue;
            }
            double q = l[o] * l[o], nrm = l[o] * l[o];
            for (std::size_t j = 1; j < leaf.dim; ++j) {
                q -= l[o + j] * l[o + j];
                nrm += l[o + j] * l[o + j];
            }
            if (q / nrm < tol) return true;
        }
        if (leaf.kind == ConeKind::HalfLine && hi > 0.0 && lo / hi < tol) return true;
    }
    return false;
}

/// Largest |x| at which the node rule of a half-line density still
/// integrates e^{iλx} accurately: one over the widest node gap.
inline double resolved_extent(const SpectralDensity& u) {
    if (u.cone.kind() != ConeKind::HalfLine) throw unsupported_error("resolved_extent: half-line densities only");
    std::vector<double> l;
    for (const auto& p : u.nodes) l.push_back(p[0]);
    std::sort(l.begin(), l.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < l.size(); ++i) gap = std::max(gap, l[i] - l[i - 1]);
    return gap > 0.0 ? 1.0 / gap : INFINITY;
}

namespace detail {

inline void check_density_domain(const SpectralDensity& u, const SiegelDomain& dom) {
    if (u.cone.ambient_dim() != dom.m() || u.cone.rank() != dom.cone().rank())
        throw argument_error("spectral density and domain live over different cones");
    if (dom.n() > 0 && dom.cone().kind() != ConeKind::HalfLine)
        throw unsupported_error("extension: ζ variables are supported over the half-line only");
}

inline double real_pairing(const Point& l, const Point& y) {
    double acc = 0.0;
    for (std::size_t a = 0; a < l.size(); ++a) acc += l[a] * y[a];
    return acc;
}

} // namespace detail

/// (Eu)(ζ, z) at a single point.
inline cplx extend_at(const SpectralDensity& u, const SiegelDomain& dom, const DomainPoint& w, double c = 1.0) {
    detail::check_density_domain(u, dom);
    std::vector<cplx> terms(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        cplx phase = 0.0;
        for (std::size_t a = 0; a < dom.m(); ++a) phase += u.nodes[i][a] * w.z[a];
        terms[i] = u.values[i] * u.weights[i] * dual_power_function(u.cone, -1.0 * dom.b_vec(), u.nodes[i]) *
                   std::exp(cplx(0.0, 1.0) * phase);
    }
    return c * pairwise_sum(terms);
}

/// Eu sampled on a grid.
inline GridFunction extend(const SpectralDensity& u, const GridFunction& grid, double c = 1.0) {
    detail::check_density_domain(u, grid.domain);
    std::vector<cplx> coef(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        coef[i] = c * u.values[i] * u.weights[i] * dual_power_function(u.cone, -1.0 * grid.domain.b_vec(), u.nodes[i]);
    std::vector<cplx> out(grid.node_count());
    parallel_for(grid.node_count(), [&](std::size_t n) {
        const DomainPoint w = grid.point(n);
        std::vector<cplx> terms(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            cplx phase = 0.0;
            for (std::size_t a = 0; a < w.z.size(); ++a) phase += u.nodes[i][a] * w.z[a];
            terms[i] = coef[i] * std::exp(cplx(0.0, 1.0) * phase);
        }
        out[n] = pairwise_sum(terms);
    });
    return grid.with_values(std::move(out));
}

// ---------------------------------------------------------------------------
// Littlewood–Paley partitions on Ω'

/// Bumps φ_k(λ) = β(d(λ, λ_k)/r)/β(1/2) with β(t) = exp(1 − 1/(1 − t²)) on
/// [0, 1), centred on a lattice of Ω' whose covering radius is r/2. Every
/// point of the covered region is within r/2 of some centre, so Σ_k φ_k ≥ 1
/// there, and each point meets the supports of a bounded number of bumps.
struct BesovPartition {
    ConeDescriptor cone = ConeDescriptor::half_line();
    std::vector<Point> centers;
    double radius = 1.0;
    double delta = 0.5;
    ChartBox box;

    static double profile(double t) { return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

    double bump(std::size_t k, const Point& lambda) const {
        const double t = invariant_distance(cone, centers[k], lambda) / radius;
        return profile(t) / profile(0.5);
    }

    double sum_at(const Point& lambda) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < centers.size(); ++k) acc += bump(k, lambda);
        return acc;
    }

    /// Chart box with a collar of one bump radius removed.
    ChartBox interior() const {
        ChartBox b = box;
        const double collar = radius;
        for (std::size_t a = 0; a < b.lo.size(); ++a) {
            b.lo[a] += collar;
            b.hi[a] -= collar;
            if (b.lo[a] >= b.hi[a]) throw argument_error("BesovPartition: truncation too small for the collar");
        }
        return b;
    }
};

/// Partition over a chart box. On the half-line the centres are the
/// geometric ray e^{2δk} (chart α = log λ), so dilations by e^{2δ} permute
/// the bumps; other cones use the greedy lattice. The bump radius is
/// `overlap` times the covering radius (δ on the half-line, 2δ otherwise).
inline BesovPartition make_partition(const ConeDescriptor& cone, double delta, const ChartBox& box, double overlap = 2.0) {
    if (!(delta > 0.0)) throw argument_error("make_partition: δ must be positive");
    if (!(overlap >= 2.0)) throw argument_error("make_partition: overlap below 2 leaves gaps in the partition");
    BesovPartition P;
    P.cone = cone;
    P.delta = delta;
    P.box = box;
    if (cone.kind() == ConeKind::HalfLine) {
        const long k_lo = static_cast<long>(std::floor(box.lo[0] / (2.0 * delta)));
        const long k_hi = static_cast<long>(std::ceil(box.hi[0] / (2.0 * delta)));
        for (long k = k_lo; k <= k_hi; ++k) P.centers.push_back({std::exp(2.0 * delta * static_cast<double>(k))});
        P.radius = overlap * delta;
    } else {
        P.centers = cone_lattice(cone, delta, box).points;
        P.radius = 2.0 * overlap * delta;
    }
    return P;
}

/// min over probes of Σ_k φ_k.
inline double partition_lower_bound(const BesovPartition& P, const std::vector<Point>& probes) {
    double m = INFINITY;
    for (const auto& l : probes) m = std::min(m, P.sum_at(l));
    return m;
}

struct BesovOptions {
    double c = 1.0;            // extension constant
    std::size_t x_order = 16;  // L^p quadrature for p ≠ 2 on [−X, X], X = resolved_extent
    std::size_t t_nodes = 24;  // sup over Φ(ζ) for p = ∞ on Siegel domains
};

namespace detail {

/// ‖u*ψ_k‖_{L^p(N)} for the localised density v = u φ_k on the domain over
/// which u is realised.
inline double localised_lp_norm(const SpectralDensity& v, const SiegelDomain& dom, double p, double scale,
                                const BesovOptions& opt) {
    const double n = static_cast<double>(dom.n());
    const auto& cone = v.cone;
    if (p == 2.0) {
        if (dom.n() > 0 && cone.kind() != ConeKind::HalfLine)
            throw unsupported_error("besov_norm: ζ variables are supported over the half-line only");
        std::vector<double> t(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            t[i] = std::norm(v.values[i]) * v.weights[i] * dual_power_function(cone, -1.0 * dom.b_vec(), v.nodes[i]);
        const double pref = opt.c * opt.c * std::pow(2.0 * std::numbers::pi, static_cast<double>(dom.m())) *
                            std::pow(std::numbers::pi / 2.0, n);
        return std::sqrt(pref * pairwise_sum(t));
    }
    const bool halfline = cone.kind() == ConeKind::HalfLine;
    if (!halfline || (dom.n() > 0 && !std::isinf(p)))
        throw unsupported_error("besov_norm: p ≠ 2 is supported on the half-line (and p = ∞ with ζ variables)");
    // g(ζ, x) = c ∫ v(λ) λ^{n} e^{iλx − λ|ζ|²} dλ with t = |ζ|², integrated over the
    // x-window the node rule resolves; beyond it the discrete sum no longer decays
    std::vector<cplx> coef(v.size());
    double lmax = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        coef[i] = opt.c * v.values[i] * v.weights[i] * std::pow(v.nodes[i][0], n);
        lmax = std::max(lmax, v.nodes[i][0]);
    }
    const double X = resolved_extent(v);
    const auto panels = static_cast<std::size_t>(std::ceil(2.0 * X * lmax / std::numbers::pi)) + 8;
    const auto r = composite_rule(-X, X, panels, opt.x_order);
    auto g = [&](double x, double t) {
        std::vector<cplx> terms(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double l = v.nodes[i][0];
            terms[i] = coef[i] * std::exp(cplx(-l * t, l * x));
        }
        return std::abs(pairwise_sum(terms));
    };
    if (std::isinf(p)) {
        double m = 0.0;
        const std::size_t nt = dom.n() > 0 ? opt.t_nodes : 1;
        for (std::size_t j = 0; j < nt; ++j) {
            const double t = nt == 1 ? 0.0 : 8.0 / scale * static_cast<double>(j) / static_cast<double>(nt - 1);
            m = std::max(m, g(0.0, t));
            for (std::size_t i = 0; i < r.size(); ++i) m = std::max(m, g(r.nodes[i], t));
        }
        return m;
    }
    std::vector<double> terms(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) terms[i] = r.weights[i] * std::pow(g(r.nodes[i], 0.0), p);
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

} // namespace detail

/// Per-layer terms Δ'^s(λ_k) ‖u*ψ_k‖_{L^p(N)}.
inline std::vector<double> besov_terms(const SpectralDensity& u, const SiegelDomain& dom, const BesovPartition& P, double p,
                                       const WeightVector& s, const BesovOptions& opt = {}) {
    detail::check_density_domain(u, dom);
    if (!(p > 0.0)) throw argument_error("besov_norm: p must be positive");
    std::vector<double> out(P.centers.size(), 0.0);
    parallel_for(P.centers.size(), [&](std::size_t k) {
        std::vector<cplx> v(u.size());
        bool any = false;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.values[i] == 0.0) continue;
            const double b = P.bump(k, u.nodes[i]);
            v[i] = u.values[i] * b;
            any = any || b != 0.0;
        }
        if (!any) return;
        const double scale = layer_scale(P.cone, P.centers[k]);
        out[k] = dual_power_function(P.cone, s, P.centers[k]) * detail::localised_lp_norm(u.with_values(v), dom, p, scale, opt);
    });
    return out;
}

/// ‖(Δ'^s(λ_k) ‖u*ψ_k‖_{L^p})_k‖_{ℓ^q}.
inline double besov_norm(const SpectralDensity& u, const SiegelDomain& dom, const BesovPartition& P, double p, double q,
                         const WeightVector& s, const BesovOptions& opt = {}) {
    if (!(q > 0.0)) throw argument_error("besov_norm: q must be positive");
    auto t = besov_terms(u, dom, P, p, s, opt);
    if (std::isinf(q)) return t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
    for (auto& v : t) v = std::pow(v, q);
    return std::pow(pairwise_sum(t), 1.0 / q);
}

/// Besov-type distances between (Eu)_{y e_Ω} and u, whose boundary density
/// is u(λ) e^{−y⟨λ, e_Ω⟩}, for each y.
inline std::vector<double> boundary_limit_check(const SpectralDensity& u, const SiegelDomain& dom, const BesovPartition& P,
                                                double p, double q, const WeightVector& s, const std::vector<double>& ys,
                                                const BesovOptions& opt = {}) {
    std::vector<double> out;
    const Point e = u.cone.e_omega();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] < 0.0) throw argument_error("boundary_limit_check: y must be nonnegative");
        if (i > 0 && !(ys[i] < ys[i - 1])) throw argument_error("boundary_limit_check: y-sequence must decrease");
        const double y = ys[i];
        const auto diff = u.multiplied([&](const Point& l) { return std::expm1(-y * detail::real_pairing(l, e)); });
        out.push_back(y == 0.0 ? 0.0 : besov_norm(diff, dom, P, p, q, s, opt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Duality

/// ∫_D f conj(g) Δ^{s''−b−d}∘ρ dν_D on a common grid.
inline cplx duality_pairing(const GridFunction& f, const GridFunction& g, const WeightVector& s2) {
    if (f.node_count() != g.node_count() || f.layers != g.layers || f.x != g.x || f.zeta != g.zeta)
        throw argument_error("duality_pairing: functions live on different grids");
    std::vector<double> lw(f.layer_count());
    for (std::size_t k = 0; k < f.layer_count(); ++k)
        lw[k] = f.layer_measure[k] * power_function(f.domain.cone(), s2, f.layers[k]);
    std::vector<cplx> t(f.node_count());
    for (std::size_t i = 0; i < f.node_count(); ++i) t[i] = f.values[i] * std::conj(g.values[i]) * f.weight[i] * lw[f.layer_of(i)];
    return pairwise_sum(t);
}

/// The Riesz potential I^{−s''}_Ω realised spectrally: multiplication by Δ'^{s''}(λ).
inline SpectralDensity riesz_multiplier(const SpectralDensity& u, const WeightVector& s2) {
    return u.multiplied([&](const Point& l) { return dual_power_function(u.cone, s2, l); });
}

/// ⟨u | u'⟩ = ∫ u conj(u') Δ'^{−b}(λ) dλ on common nodes.
inline cplx density_pairing(const SpectralDensity& u, const SpectralDensity& v, const WeightVector& b) {
    if (u.nodes != v.nodes) throw argument_error("density_pairing: densities live on different nodes");
    std::vector<cplx> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        t[i] = u.values[i] * std::conj(v.values[i]) * u.weights[i] * dual_power_function(u.cone, -1.0 * b, u.nodes[i]);
    return pairwise_sum(t);
}

/// ⟨Eu | E(u' Δ'^{s''})⟩ = c ⟨u | u'⟩ on C_+ with c = 2π Γ(s'') 2^{−s''} (extension constant 1).
inline double duality_constant_halfplane(double s2) {
    if (!(s2 > 0.0)) throw argument_error("duality_constant_halfplane: s'' must be positive");
    return 2.0 * std::numbers::pi * std::tgamma(s2) * std::pow(2.0, -s2);
}

/// CSV with columns lambda0.., weight, re, im.
inline void write_csv(const SpectralDensity& u, std::ostream& os) {
    char buf[64];
    const std::size_t dim = u.cone.ambient_dim();
    for (std::size_t a = 0; a < dim; ++a) os << "lambda" << a << ',';
    os << "weight,re,im\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (double v : u.nodes[i]) {
            std::snprintf(buf, sizeof buf, "%.17g,", v);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,", u.weights[i]);
        os << buf;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.values[i].real(), u.values[i].imag());
        os << buf;
    }
}

inline SpectralDensity read_csv_density(std::istream& is, const ConeDescriptor& cone) {
    SpectralDensity u;
    u.cone = cone;
    const std::size_t dim = cone.ambient_dim();
    std::string line;
    if (!std::getline(is, line)) throw config_error("density CSV: missing header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> cols;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                cols.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw config_error("density CSV: malformed value '" + cell + "'");
            }
        }
        if (cols.size() != dim + 3) throw config_error("density CSV: expected " + std::to_string(dim + 3) + " columns");
        Point l(cols.begin(), cols.begin() + static_cast<long>(dim));
        if (!dual_contains(cone, l)) throw config_error("density CSV: node outside the dual cone");
        u.nodes.push_back(l);
        u.weights.push_back(cols[dim]);
        u.values.emplace_back(cols[dim + 1], cols[dim + 2]);
    }
    return u;
}

} // namespace conebergman
