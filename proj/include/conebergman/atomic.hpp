#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/domain.hpp"
#include "conebergman/kernel.hpp"
#include "conebergman/lattice.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/projector.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

/// Coefficients λ_{j,k} attached to the slots of a lattice on D.
struct CoefficientArray {
    std::vector<cplx> values;
    std::vector<long> layer;  // k
    std::vector<long> slot;   // j

    std::size_t size() const noexcept { return values.size(); }
};

inline CoefficientArray zero_coefficients(const Lattice& L) {
    return {std::vector<cplx>(L.size(), 0.0), L.layer, L.slot};
}

inline void check_matches(const CoefficientArray& lambda, const Lattice& L) {
    if (lambda.size() != L.size() || lambda.layer != L.layer) throw argument_error("coefficient array does not match the lattice");
    if (!L.on_domain()) throw argument_error("atomic operators need a lattice on D");
}

/// ‖(‖(λ_{j,k})_j‖_{ℓ^p})_k‖_{ℓ^q}.
inline double sequence_norm(const CoefficientArray& lambda, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw argument_error("sequence_norm: exponents must be positive");
    std::map<long, std::vector<double>> layers;
    for (std::size_t i = 0; i < lambda.size(); ++i) layers[lambda.layer[i]].push_back(std::abs(lambda.values[i]));
    std::vector<double> inner;
    inner.reserve(layers.size());
    for (auto& [k, v] : layers) {
        if (std::isinf(p)) {
            inner.push_back(*std::max_element(v.begin(), v.end()));
        } else {
            for (auto& a : v) a = std::pow(a, p);
            inner.push_back(std::pow(pairwise_sum(v), 1.0 / p));
        }
    }
    if (inner.empty()) return 0.0;
    if (std::isinf(q)) return *std::max_element(inner.begin(), inner.end());
    for (auto& a : inner) a = std::pow(a, q);
    return std::pow(pairwise_sum(inner), 1.0 / q);
}

struct AtomicParams {
    SiegelDomain domain = SiegelDomain::upper_half_plane();
    double p = 2.0, q = 2.0;
    WeightVector s{1.0};
    WeightVector s_prime{-3.5};
    double c = 0.0;  // reproducing constant, 0 for the closed form / 1 convention of the kernel module

    double constant() const {
        if (c != 0.0) return c;
        return make_kernel_spec(domain, s_prime).c_s_prime;
    }
};

/// Δ^{(b+d)/p − s − s'}(h), the normalisation of the atom sitting over h.
inline double atom_weight(const AtomicParams& par, const Point& h) {
    const auto& cone = par.domain.cone();
    return power_function(cone, (1.0 / par.p) * (par.domain.b_vec() + cone.d_vec()) - par.s - par.s_prime, h);
}

namespace detail {

inline cplx atom_kernel(const SiegelDomain& dom, const WeightVector& s_prime, const DomainPoint& w, const DomainPoint& wp) {
    if (dom.is_tube() && dom.cone().kind() == ConeKind::HalfLine) {
        const cplx arg = (w.z[0] - std::conj(wp.z[0])) * cplx(0.0, -0.5);
        const double sp = s_prime[0];
        if (sp == std::round(sp) && std::abs(sp) < 64.0) return int_power(arg, static_cast<int>(sp));
        return std::exp(sp * std::log(arg));
    }
    return bergman_kernel(dom, s_prime, w, wp);
}

} // namespace detail

/// Ψλ = Σ λ_{j,k} Δ^{(b+d)/p − s − s'}(h_k) B^{s'}_{w_{j,k}} evaluated on the grid.
inline GridFunction synthesize(const AtomicParams& par, const Lattice& L, const CoefficientArray& lambda,
                               const GridFunction& grid) {
    check_matches(lambda, L);
    std::vector<std::size_t> active;
    std::vector<cplx> coef;
    for (std::size_t i = 0; i < L.size(); ++i)
        if (lambda.values[i] != 0.0) {
            active.push_back(i);
            coef.push_back(lambda.values[i] * atom_weight(par, L.points[i]));
        }
    std::vector<cplx> out(grid.node_count());
    parallel_for(grid.node_count(), [&](std::size_t n) {
        const DomainPoint w = grid.point(n);
        std::vector<cplx> terms(active.size());
        for (std::size_t a = 0; a < active.size(); ++a)
            terms[a] = coef[a] * detail::atom_kernel(par.domain, par.s_prime, w, L.domain_points[active[a]]);
        out[n] = pairwise_sum(terms);
    });
    return grid.with_values(std::move(out));
}

/// S f = (Δ^{(b+d)/p − s − s'}(h_k) f(w_{j,k})) for a callable f on D.
template <typename F>
CoefficientArray sample(const AtomicParams& par, const Lattice& L, F&& f) {
    if (!L.on_domain()) throw argument_error("sample: lattice must live on D");
    auto lambda = zero_coefficients(L);
    for (std::size_t i = 0; i < L.size(); ++i) lambda.values[i] = atom_weight(par, L.points[i]) * f(L.domain_points[i]);
    return lambda;
}

/// Value of a grid function on the upper half-plane at z, by linear
/// interpolation in x within layers and in log y across layers.
inline cplx interpolate_halfplane(const GridFunction& g, cplx z) {
    if (!(g.domain.is_tube() && g.domain.cone().kind() == ConeKind::HalfLine))
        throw unsupported_error("interpolate_halfplane: grid must live on the upper half-plane");
    const double ly = std::log(z.imag());
    const double lo = std::log(g.layers.front()[0]), hi = std::log(g.layers.back()[0]);
    if (!(ly >= lo && ly <= hi)) throw domain_error("interpolation point lies outside the grid hull (extrapolation)");
    auto in_layer = [&](std::size_t k) {
        const std::size_t a = g.offsets[k], b = g.offsets[k + 1];
        const double x = z.real();
        if (!(x >= g.x[a][0] && x <= g.x[b - 1][0]))
            throw domain_error("interpolation point lies outside the grid hull (extrapolation)");
        std::size_t i = a;
        while (i + 2 < b && g.x[i + 1][0] < x) ++i;
        const double x0 = g.x[i][0], x1 = g.x[i + 1][0];
        const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        return (1.0 - t) * g.values[i] + t * g.values[i + 1];
    };
    std::size_t k = 0;
    while (k + 2 < g.layer_count() && std::log(g.layers[k + 1][0]) < ly) ++k;
    if (g.layer_count() == 1) return in_layer(0);
    const double l0 = std::log(g.layers[k][0]), l1 = std::log(g.layers[k + 1][0]);
    const double t = (ly - l0) / (l1 - l0);
    return (1.0 - t) * in_layer(k) + t * in_layer(k + 1);
}

/// S f for f given on a grid of the upper half-plane.
inline CoefficientArray sample(const AtomicParams& par, const Lattice& L, const GridFunction& f) {
    return sample(par, L, [&](const DomainPoint& w) { return interpolate_halfplane(f, w.z[0]); });
}

struct Reconstruction {
    GridFunction approximation;
    CoefficientArray coefficients;
    double relative_error = 0.0;
};

/// Riemann sum of the reproducing formula over the lattice cells,
///     c Σ f(w_{j,k}) B^{s'}_{w_{j,k}} Δ^{−s'}(h_k) |Q_{j,k}|,
/// written as an atomic sum and compared with f in L^{p,q}_s on the grid.
template <typename F>
Reconstruction reconstruct(const AtomicParams& par, const Lattice& L, F&& f, const GridFunction& grid) {
    if (!L.on_domain()) throw argument_error("reconstruct: lattice must live on D");
    const double c = par.constant();
    auto lambda = zero_coefficients(L);
    for (std::size_t i = 0; i < L.size(); ++i) {
        const double w = power_function(par.domain.cone(), -1.0 * par.s_prime, L.points[i]) * L.cell_measures[i];
        lambda.values[i] = c * f(L.domain_points[i]) * w / atom_weight(par, L.points[i]);
    }
    Reconstruction r{synthesize(par, L, lambda, grid), std::move(lambda), 0.0};
    const auto exact = grid.sampled(f);
    const double nf = mixed_norm(exact, par.p, par.q, par.s);
    r.relative_error = nf == 0.0 ? mixed_norm(r.approximation, par.p, par.q, par.s)
                                 : relative_error(r.approximation, exact, par.p, par.q, par.s);
    return r;
}

/// Range condition for the atomic decomposition. On C_+ this is the sharp
/// condition 2s̃ > s + (1/p − 1)_+ with s' = −1 − 2s̃, together with s' < −1.
/// On other domains it returns the necessary conditions
/// s' ≺ b + d − m/2 and s ≻ (b + d)/p + m'/(2q').
inline bool atomic_range_predicate(const AtomicParams& par) {
    const auto& dom = par.domain;
    const auto& cone = dom.cone();
    const WeightVector bd = dom.b_vec() + cone.d_vec();
    if (!strictly_succ(bd - 0.5 * cone.m_vec(), par.s_prime)) return false;
    if (dom.is_tube() && cone.kind() == ConeKind::HalfLine) {
        const double st = (bd[0] - par.s_prime[0]) / 2.0;
        return 2.0 * st > par.s[0] + std::max(0.0, 1.0 / par.p - 1.0);
    }
    const double qc = conjugate_exponent(par.q);
    const WeightVector lower = (1.0 / par.p) * bd + (std::isinf(qc) ? 0.0 : 0.5 / qc) * cone.m_prime_vec();
    return strictly_succ(par.s, lower);
}

/// ⟨B^{s'}_w, B^{s'}_{w'}⟩ in L²(y^{2s−1} dx dy) on C_+, by Plancherel:
///     4π Γ(2s) Γ(−2s' − 2s − 1) / Γ(−s')² · ((w' − w̄)/(2i))^{2s' + 2s + 1}.
inline cplx halfplane_atom_inner(double s, double s_prime, cplx w, cplx wp) {
    const double e = 2.0 * s_prime + 2.0 * s + 1.0;
    if (!(s > 0.0) || !(e < 0.0)) throw argument_error("halfplane_atom_inner: need s > 0 and s + s' < −1/2");
    const double C = 4.0 * std::numbers::pi *
                     std::exp(std::lgamma(2.0 * s) + std::lgamma(-e) - 2.0 * std::lgamma(-s_prime));
    return C * std::exp(e * std::log((wp - std::conj(w)) * cplx(0.0, -0.5)));
}

struct SynthesisProxyOptions {
    std::size_t samples = 8;
    std::size_t power_steps = 60;  // Gram path only
    std::uint64_t seed = 1;
};

/// max over random unit λ of ‖Ψλ‖_{A^{p,q}_s} / ‖λ‖_{ℓ^{p,q}}, drawn from
/// complex Gaussian and nonnegative families plus the constant sequence.
/// On C_+ with p = q = 2 the norm is evaluated exactly through the Gram
/// matrix of the atoms, and the power iterates G^t 1 join the test
/// sequences; otherwise norms are taken on the supplied grid.
inline double synthesis_norm_proxy(const AtomicParams& par, const Lattice& L, const SynthesisProxyOptions& opt = {},
                                   const GridFunction* grid = nullptr) {
    if (!L.on_domain() || L.size() == 0) throw argument_error("synthesis_norm_proxy: need a nonempty lattice on D");
    const std::size_t N = L.size();
    const bool gram = par.domain.is_tube() && par.domain.cone().kind() == ConeKind::HalfLine && par.p == 2.0 &&
                      par.q == 2.0 && grid == nullptr;
    if (!gram && grid == nullptr) throw argument_error("synthesis_norm_proxy: an evaluation grid is required here");
    std::vector<cplx> G;
    std::vector<double> a(N);
    for (std::size_t i = 0; i < N; ++i) a[i] = atom_weight(par, L.points[i]);
    if (gram) {
        G.resize(N * N);
        parallel_for(N, [&](std::size_t i) {
            for (std::size_t j = 0; j < N; ++j)
                G[i * N + j] = a[i] * a[j] *
                               halfplane_atom_inner(par.s[0], par.s_prime[0], L.domain_points[i].z[0], L.domain_points[j].z[0]);
        });
    }
    // Gλ with G_{ij} = ⟨a_i B_i, a_j B_j⟩, so that ‖Ψλ‖² = Σ_i λ_i conj((G conj λ)_i)
    auto gram_apply = [&](const std::vector<cplx>& v) {
        std::vector<cplx> out(N);
        parallel_for(N, [&](std::size_t i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < N; ++j) acc += G[i * N + j] * v[j];
            out[i] = acc;
        });
        return out;
    };
    auto ratio = [&](const CoefficientArray& lam) {
        const double nl = sequence_norm(lam, par.p, par.q);
        if (gram) {
            std::vector<cplx> cl(N);
            for (std::size_t i = 0; i < N; ++i) cl[i] = std::conj(lam.values[i]);
            const auto g = gram_apply(cl);
            std::vector<cplx> rows(N);
            for (std::size_t i = 0; i < N; ++i) rows[i] = lam.values[i] * g[i];
            return std::sqrt(std::max(0.0, pairwise_sum(rows).real())) / nl;
        }
        return mixed_norm(synthesize(par, L, lam, *grid), par.p, par.q, par.s) / nl;
    };
    Rng rng(opt.seed);
    auto lam = zero_coefficients(L);
    for (auto& v : lam.values) v = 1.0;
    double best = ratio(lam);
    for (std::size_t t = 0; t < opt.samples; ++t) {
        const bool positive = t % 2 == 1;
        for (auto& v : lam.values) v = positive ? cplx(rng.uniform(0.0, 1.0)) : cplx(rng.normal(), rng.normal());
        best = std::max(best, ratio(lam));
    }
    if (gram) {
        // ‖Ψλ‖² = u* G u with u = conj λ, so power iterates of G give good u
        std::vector<cplx> v(N, 1.0);
        for (std::size_t t = 0; t < opt.power_steps; ++t) {
            v = gram_apply(v);
            double nv = 0.0;
            for (const auto& x : v) nv = std::max(nv, std::abs(x));
            for (auto& x : v) x /= nv;
            for (std::size_t i = 0; i < N; ++i) lam.values[i] = std::conj(v[i]);
            best = std::max(best, ratio(lam));
        }
    }
    return best;
}

struct DualityCheck {
    cplx pairing;        // ⟨Ψλ | f⟩ against Δ^{−s'}∘ρ dν_D
    cplx sequence_side;  // ⟨λ | S f⟩ / c_{s'}
    double relative_difference() const { return std::abs(pairing - sequence_side) / std::abs(sequence_side); }
};

/// Both sides of c_{s'} ⟨Ψλ | f⟩ = ⟨λ | S f⟩ for holomorphic f, with the
/// left side integrated on the grid.
template <typename F>
DualityCheck atomic_duality(const AtomicParams& par, const Lattice& L, const CoefficientArray& lambda, F&& f,
                            const GridFunction& grid) {
    const auto psi = synthesize(par, L, lambda, grid);
    ProjectorParams pp;
    pp.domain = par.domain;
    pp.s_prime = par.s_prime;
    const auto qd = detail::projector_quadrature(pp, psi);
    std::vector<cplx> terms(grid.node_count());
    parallel_for(grid.node_count(), [&](std::size_t i) { terms[i] = psi.values[i] * std::conj(f(qd.points[i])) * qd.weights[i]; });
    const auto sf = sample(par, L, f);
    std::vector<cplx> seq(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) seq[i] = lambda.values[i] * std::conj(sf.values[i]);
    return {pairwise_sum(terms), pairwise_sum(seq) / par.constant()};
}

/// CSV with columns j,k,re,im.
inline void write_csv(const CoefficientArray& lambda, std::ostream& os) {
    char buf[96];
    os << "j,k,re,im\n";
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", lambda.slot[i], lambda.layer[i], lambda.values[i].real(),
                      lambda.values[i].imag());
        os << buf;
    }
}

inline CoefficientArray read_csv_coefficients(std::istream& is) {
    CoefficientArray lambda;
    std::string line;
    if (!std::getline(is, line) || line != "j,k,re,im") throw config_error("coefficient CSV: expected header j,k,re,im");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        long j = 0, k = 0;
        double re = 0.0, im = 0.0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ls >> j >> c1 >> k >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',')
            throw config_error("coefficient CSV: malformed row '" + line + "'");
        lambda.slot.push_back(j);
        lambda.layer.push_back(k);
        lambda.values.emplace_back(re, im);
    }
    return lambda;
}

} // namespace conebergman
