#pragma once

// Siegel domains D = {(ζ, z) ∈ E × F_C : Im z − Φ(ζ) ∈ Ω}, structured
// quadrature grids over D and discrete mixed norms L^{p,q}_s.
//
// Supported domains are tubes F + iΩ over any supported cone (n = 0,
// b = 0) and the Siegel upper half-space over the half-line with
// Φ(ζ, ζ') = Σ_j ζ_j conj(ζ'_j) and b = (−n).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/cone.hpp"
#include "conebergman/errors.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

/// One component of Φ as an n × n hermitian matrix, row-major.
using HermitianMatrix = std::vector<cplx>;

class SiegelDomain {
public:
    static SiegelDomain tube(const ConeDescriptor& cone) {
        SiegelDomain d;
        d.cone_ = cone;
        d.n_ = 0;
        d.b_ = WeightVector(cone.rank());
        return d;
    }

    /// {(ζ, z) ∈ C^n × C : Im z − |ζ|² > 0}.
    static SiegelDomain siegel_half_space(std::size_t n) {
        if (n == 0) return tube(ConeDescriptor::half_line());
        SiegelDomain d;
        d.cone_ = ConeDescriptor::half_line();
        d.n_ = n;
        HermitianMatrix id(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
        d.phi_ = {id};
        d.b_ = WeightVector{-static_cast<double>(n)};
        return d;
    }

    /// The upper half-plane C_+.
    static SiegelDomain upper_half_plane() { return tube(ConeDescriptor::half_line()); }

    const ConeDescriptor& cone() const noexcept { return cone_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return cone_.ambient_dim(); }
    const std::vector<HermitianMatrix>& phi_matrices() const noexcept { return phi_; }
    const WeightVector& b_vec() const noexcept { return b_; }
    bool is_tube() const noexcept { return n_ == 0; }

    /// Φ(ζ, ζ') ∈ F_C.
    CPoint phi(const CPoint& zeta, const CPoint& zeta_p) const {
        CPoint out(m(), 0.0);
        if (n_ == 0) return out;
        if (zeta.size() != n_ || zeta_p.size() != n_) throw argument_error("phi: wrong dimension of ζ");
        for (std::size_t k = 0; k < phi_.size(); ++k) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j) acc += phi_[k][i * n_ + j] * zeta[i] * std::conj(zeta_p[j]);
            out[k] = acc;
        }
        return out;
    }

    /// Φ(ζ) = Φ(ζ, ζ) ∈ F.
    Point phi(const CPoint& zeta) const { return real_part(phi(zeta, zeta)); }

    std::string describe() const {
        std::ostringstream os;
        if (n_ == 0) os << "tube over " << cone_.describe();
        else os << "siegel half-space n=" << n_;
        return os.str();
    }

private:
    ConeDescriptor cone_ = ConeDescriptor::half_line();
    std::size_t n_ = 0;
    std::vector<HermitianMatrix> phi_;
    WeightVector b_{0.0};
};

/// A point (ζ, z) of E × F_C.
struct DomainPoint {
    CPoint zeta;
    CPoint z;
};

/// ρ(ζ, z) = Im z − Φ(ζ).
inline Point rho(const SiegelDomain& dom, const CPoint& zeta, const CPoint& z) {
    if (z.size() != dom.m()) throw argument_error("rho: wrong dimension of z");
    if (zeta.size() != dom.n()) throw argument_error("rho: wrong dimension of ζ");
    Point out(dom.m());
    const Point ph = dom.phi(zeta);
    for (std::size_t k = 0; k < dom.m(); ++k) out[k] = z[k].imag() - (dom.n() ? ph[k] : 0.0);
    return out;
}

inline Point rho(const SiegelDomain& dom, const DomainPoint& w) { return rho(dom, w.zeta, w.z); }

inline bool in_domain(const SiegelDomain& dom, const DomainPoint& w) {
    return contains(dom.cone(), rho(dom, w));
}

/// Density of ν_D with respect to Lebesgue measure: Δ^{b+2d}(ρ(ζ, z)).
inline double weighted_measure_density(const SiegelDomain& dom, const DomainPoint& w) {
    const Point r = rho(dom, w);
    if (!contains(dom.cone(), r)) throw domain_error("weighted_measure_density: point is not in D");
    return power_function(dom.cone(), dom.b_vec() + 2.0 * dom.cone().d_vec(), r);
}

/// Horizontal scale of a layer: the factor by which t_h stretches F.
/// Δ^{-d}(h)^{1/m}, i.e. h itself on the half-line.
inline double layer_scale(const ConeDescriptor& cone, const Point& h) {
    return std::pow(tplus_determinant(cone, h), 1.0 / static_cast<double>(cone.ambient_dim()));
}

// ---------------------------------------------------------------------------
// Grids

/// Samples over a layered grid: for each cone layer h_k (with ν_Ω cell
/// measure) a set of horizontal nodes (ζ, x) with Lebesgue cell weights.
/// Node i represents the point (ζ_i, x_i + iΦ(ζ_i) + i h_{k(i)}) of D.
struct GridFunction {
    SiegelDomain domain = SiegelDomain::upper_half_plane();
    std::vector<Point> layers;
    std::vector<double> layer_measure;
    std::vector<std::size_t> offsets{0};  // nodes of layer k are [offsets[k], offsets[k+1])
    std::vector<CPoint> zeta;
    std::vector<Point> x;
    std::vector<double> weight;
    std::vector<cplx> values;
    std::vector<long> slot_j;  // optional box index per node (−1 if none)

    std::size_t node_count() const noexcept { return x.size(); }
    std::size_t layer_count() const noexcept { return layers.size(); }
    std::size_t layer_of(std::size_t node) const {
        auto it = std::upper_bound(offsets.begin(), offsets.end(), node);
        return static_cast<std::size_t>(it - offsets.begin()) - 1;
    }

    DomainPoint point(std::size_t i) const {
        const std::size_t k = layer_of(i);
        DomainPoint w;
        w.zeta = zeta[i];
        const Point ph = domain.n() ? domain.phi(zeta[i]) : Point(domain.m(), 0.0);
        w.z.resize(domain.m());
        for (std::size_t j = 0; j < domain.m(); ++j) w.z[j] = cplx(x[i][j], ph[j] + layers[k][j]);
        return w;
    }

    /// Same geometry, new values.
    GridFunction with_values(std::vector<cplx> v) const {
        if (v.size() != node_count()) throw argument_error("GridFunction: value count mismatch");
        GridFunction g = *this;
        g.values = std::move(v);
        return g;
    }

    template <typename F>
    GridFunction sampled(F&& f) const {
        std::vector<cplx> v(node_count());
        parallel_for(node_count(), [&](std::size_t i) { v[i] = f(point(i)); });
        return with_values(std::move(v));
    }

    /// Total ν_D measure carried by the grid.
    double total_measure() const {
        std::vector<double> t(node_count());
        for (std::size_t k = 0; k < layer_count(); ++k) {
            const double dk = power_function(domain.cone(), domain.b_vec() + domain.cone().d_vec(), layers[k]);
            for (std::size_t i = offsets[k]; i < offsets[k + 1]; ++i) t[i] = weight[i] * layer_measure[k] * dk;
        }
        return pairwise_sum(t);
    }
};

enum class HorizontalRule {
    Boxes,    // midpoint cells of width R·scale(h), aligned at 0
    Tangent,  // Gauss–Legendre in θ with x = L tan θ, L = x_extent·(scale(h) + offset)
    Window,   // composite Gauss–Legendre on [−x_extent, x_extent], the same on every layer
};

struct GridSpec {
    HorizontalRule rule = HorizontalRule::Tangent;
    double x_extent = 1.0;        // Boxes: number of cells on each side is x_extent / R
    double zeta_extent = 3.0;     // ζ window radius in units of sqrt(scale(h))
    std::size_t resolution = 32;  // Tangent, Window: nodes per axis; Boxes: cells per unit of x_extent
    double box_R = 1.0;           // cell width factor for Boxes
    double scale_offset = 0.0;    // added to scale(h) for the Tangent rule
    std::size_t tangent_panels = 4;
    double zeta_offset = 0.0;     // added to sqrt(scale(h)) on the ζ axes
};

namespace detail {

struct AxisRule {
    std::vector<double> nodes, weights;
    std::vector<long> slot;
};

inline AxisRule horizontal_axis(const GridSpec& spec, double scale) {
    AxisRule a;
    if (spec.rule == HorizontalRule::Boxes) {
        const double w = spec.box_R * scale;
        const long cells = static_cast<long>(std::llround(spec.x_extent / spec.box_R));
        const std::size_t sub = std::max<std::size_t>(1, spec.resolution);
        for (long j = -cells; j < cells; ++j) {
            for (std::size_t q = 0; q < sub; ++q) {
                a.nodes.push_back(w * (static_cast<double>(j) + (static_cast<double>(q) + 0.5) / static_cast<double>(sub)));
                a.weights.push_back(w / static_cast<double>(sub));
                a.slot.push_back(j);
            }
        }
        return a;
    }
    if (spec.rule == HorizontalRule::Window) {
        const std::size_t order = 16;
        const auto r = composite_rule(-spec.x_extent, spec.x_extent, std::max<std::size_t>(1, (spec.resolution + order - 1) / order), order);
        a.nodes = r.nodes;
        a.weights = r.weights;
        a.slot.assign(r.size(), -1);
        return a;
    }
    const double L = spec.x_extent * (scale + spec.scale_offset);
    const double half = std::numbers::pi / 2.0;
    const std::size_t order = std::max<std::size_t>(2, spec.resolution / std::max<std::size_t>(1, spec.tangent_panels));
    const auto r = composite_rule(-half, half, spec.tangent_panels, order);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double c = std::cos(r.nodes[i]);
        a.nodes.push_back(L * std::tan(r.nodes[i]));
        a.weights.push_back(r.weights[i] * L / (c * c));
        a.slot.push_back(-1);
    }
    return a;
}

} // namespace detail

/// Builds the grid skeleton (values zero) over the given cone layers.
/// Horizontal coordinates at layer h are stretched by scale(h) in x and by
/// sqrt(scale(h)) in ζ.
inline GridFunction make_grid(const SiegelDomain& dom, const std::vector<Point>& layers,
                              const std::vector<double>& layer_measure, const GridSpec& spec) {
    if (spec.resolution == 0) throw argument_error("make_grid: resolution must be positive");
    if (!(spec.x_extent > 0.0)) throw argument_error("make_grid: x_extent must be positive");
    if (layers.size() != layer_measure.size()) throw argument_error("make_grid: layer/measure size mismatch");
    if (layers.empty()) throw argument_error("make_grid: no layers");
    if (dom.m() != 1 && dom.n() != 0) throw unsupported_error("make_grid: ζ axes are supported over the half-line only");
    GridFunction g;
    g.domain = dom;
    g.layers = layers;
    g.layer_measure = layer_measure;
    g.offsets = {0};
    const std::size_t m = dom.m(), n = dom.n();
    for (const auto& h : layers) {
        if (!contains(dom.cone(), h)) throw domain_error("make_grid: layer point outside the cone");
        const double sc = layer_scale(dom.cone(), h);
        const auto ax = detail::horizontal_axis(spec, sc);
        // ζ axis: tangent rule per real coordinate, radius ∝ sqrt(scale)
        detail::AxisRule zr;
        if (n > 0) {
            GridSpec zs = spec;
            zs.rule = HorizontalRule::Tangent;
            zs.x_extent = spec.zeta_extent;
            zs.scale_offset = spec.zeta_offset;
            zr = detail::horizontal_axis(zs, std::sqrt(sc));
        }
        // tensor product over m x-axes and 2n real ζ-axes
        const std::size_t nx = ax.nodes.size();
        const std::size_t nz = n ? zr.nodes.size() : 1;
        std::size_t total = 1;
        for (std::size_t j = 0; j < m; ++j) total *= nx;
        for (std::size_t j = 0; j < 2 * n; ++j) total *= nz;
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            Point xv(m);
            double w = 1.0;
            long slot = -1;
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t ij = rem % nx;
                rem /= nx;
                xv[j] = ax.nodes[ij];
                w *= ax.weights[ij];
                if (j == 0) slot = ax.slot[ij];
            }
            CPoint zv(n);
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t ire = rem % nz;
                rem /= nz;
                const std::size_t iim = rem % nz;
                rem /= nz;
                zv[j] = cplx(zr.nodes[ire], zr.nodes[iim]);
                w *= zr.weights[ire] * zr.weights[iim];
            }
            g.x.push_back(std::move(xv));
            g.zeta.push_back(std::move(zv));
            g.weight.push_back(w);
            g.slot_j.push_back(slot);
        }
        g.offsets.push_back(g.x.size());
    }
    g.values.assign(g.x.size(), 0.0);
    return g;
}

/// Log-spaced Gauss–Legendre layers on the half-line: y = e^u, u ∈ [log y_min, log y_max].
/// Returns layer points and their ν = dy/y measures.
inline std::pair<std::vector<Point>, std::vector<double>> half_line_layers(double y_min, double y_max,
                                                                            std::size_t panels, std::size_t order) {
    if (!(y_min > 0.0) || !(y_max > y_min)) throw argument_error("half_line_layers: need 0 < y_min < y_max");
    const auto r = composite_rule(std::log(y_min), std::log(y_max), panels, order);
    std::vector<Point> pts;
    for (double u : r.nodes) pts.push_back({std::exp(u)});
    return {pts, r.weights};
}

// ---------------------------------------------------------------------------
// Mixed norms

namespace detail {

inline double lp_accumulate(std::span<const double> absvals, std::span<const double> w, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double a : absvals) m = std::max(m, a);
        return m;
    }
    std::vector<double> t(absvals.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = w[i] * std::pow(absvals[i], p);
    return std::pow(pairwise_sum(t), 1.0 / p);
}

} // namespace detail

/// Per-layer horizontal L^p norms ‖f_h‖_{L^p(N)}.
inline std::vector<double> layer_norms(const GridFunction& f, double p) {
    if (!(p > 0.0)) throw argument_error("mixed_norm: p must be positive");
    std::vector<double> out(f.layer_count());
    parallel_for(f.layer_count(), [&](std::size_t k) {
        const std::size_t a = f.offsets[k], b = f.offsets[k + 1];
        std::vector<double> av(b - a);
        for (std::size_t i = a; i < b; ++i) av[i - a] = std::abs(f.values[i]);
        out[k] = detail::lp_accumulate(av, std::span<const double>(f.weight.data() + a, b - a), p);
    });
    return out;
}

/// Outer L^q(ν_Ω) norm of h ↦ Δ^s(h) N(h) given per-layer values N.
inline double outer_norm(const GridFunction& f, const std::vector<double>& per_layer, double q, const WeightVector& s) {
    if (!(q > 0.0)) throw argument_error("mixed_norm: q must be positive");
    std::vector<double> av(f.layer_count());
    for (std::size_t k = 0; k < f.layer_count(); ++k)
        av[k] = power_function(f.domain.cone(), s, f.layers[k]) * per_layer[k];
    return detail::lp_accumulate(av, f.layer_measure, q);
}

/// Discrete L^{p,q}_s(D) norm of the grid function.
inline double mixed_norm(const GridFunction& f, double p, double q, const WeightVector& s) {
    if (f.node_count() == 0) throw argument_error("mixed_norm: empty grid");
    return outer_norm(f, layer_norms(f, p), q, s);
}

/// Relative mixed-norm distance ‖f − g‖ / ‖g‖ on a common grid.
inline double relative_error(const GridFunction& f, const GridFunction& g, double p, double q, const WeightVector& s) {
    if (f.node_count() != g.node_count()) throw argument_error("relative_error: grid mismatch");
    std::vector<cplx> d(f.node_count());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = f.values[i] - g.values[i];
    return mixed_norm(g.with_values(std::move(d)), p, q, s) / mixed_norm(g, p, q, s);
}

// ---------------------------------------------------------------------------
// Serialization

/// CSV: layer, slot, ζ (re, im pairs), x, h, weight, layer measure, re, im.
inline void write_csv(const GridFunction& f, std::ostream& os) {
    os << "layer,slot";
    for (std::size_t j = 0; j < f.domain.n(); ++j) os << ",zeta" << j << "_re,zeta" << j << "_im";
    for (std::size_t j = 0; j < f.domain.m(); ++j) os << ",x" << j;
    for (std::size_t j = 0; j < f.domain.m(); ++j) os << ",h" << j;
    os << ",weight,layer_measure,re,im\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12e", v);
        os << ',' << buf;
    };
    for (std::size_t k = 0; k < f.layer_count(); ++k) {
        for (std::size_t i = f.offsets[k]; i < f.offsets[k + 1]; ++i) {
            os << k << ',' << f.slot_j[i];
            for (const auto& z : f.zeta[i]) {
                num(z.real());
                num(z.imag());
            }
            for (double v : f.x[i]) num(v);
            for (double v : f.layers[k]) num(v);
            num(f.weight[i]);
            num(f.layer_measure[k]);
            num(f.values[i].real());
            num(f.values[i].imag());
            os << '\n';
        }
    }
}

namespace detail {
template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw config_error("grid binary: truncated input");
    return v;
}
} // namespace detail

/// Flat binary layout (little-endian host order): magic, m, n, layer count,
/// node count, layers with measures and offsets, then per node ζ, x, weight,
/// slot and value. The domain is reconstructed from (m, n) and must be a
/// half-line domain or a tube over a cone supplied by the caller.
inline void write_binary(const GridFunction& f, std::ostream& os) {
    detail::put<std::uint64_t>(os, 0x43424752'49443031ULL);
    detail::put<std::uint64_t>(os, f.domain.m());
    detail::put<std::uint64_t>(os, f.domain.n());
    detail::put<std::uint64_t>(os, f.layer_count());
    detail::put<std::uint64_t>(os, f.node_count());
    for (std::size_t k = 0; k < f.layer_count(); ++k) {
        for (double v : f.layers[k]) detail::put(os, v);
        detail::put(os, f.layer_measure[k]);
        detail::put<std::uint64_t>(os, f.offsets[k + 1]);
    }
    for (std::size_t i = 0; i < f.node_count(); ++i) {
        for (const auto& z : f.zeta[i]) {
            detail::put(os, z.real());
            detail::put(os, z.imag());
        }
        for (double v : f.x[i]) detail::put(os, v);
        detail::put(os, f.weight[i]);
        detail::put<std::int64_t>(os, f.slot_j[i]);
        detail::put(os, f.values[i].real());
        detail::put(os, f.values[i].imag());
    }
}

inline GridFunction read_binary(std::istream& is, const SiegelDomain& dom) {
    if (detail::get<std::uint64_t>(is) != 0x43424752'49443031ULL) throw config_error("grid binary: bad magic");
    const auto m = detail::get<std::uint64_t>(is);
    const auto n = detail::get<std::uint64_t>(is);
    if (m != dom.m() || n != dom.n()) throw config_error("grid binary: domain dimensions do not match");
    const auto nl = detail::get<std::uint64_t>(is);
    const auto nn = detail::get<std::uint64_t>(is);
    GridFunction f;
    f.domain = dom;
    f.offsets = {0};
    for (std::uint64_t k = 0; k < nl; ++k) {
        Point h(m);
        for (auto& v : h) v = detail::get<double>(is);
        f.layers.push_back(h);
        f.layer_measure.push_back(detail::get<double>(is));
        f.offsets.push_back(detail::get<std::uint64_t>(is));
    }
    for (std::uint64_t i = 0; i < nn; ++i) {
        CPoint z(n);
        for (auto& c : z) {
            const double re = detail::get<double>(is);
            c = cplx(re, detail::get<double>(is));
        }
        Point x(m);
        for (auto& v : x) v = detail::get<double>(is);
        f.zeta.push_back(z);
        f.x.push_back(x);
        f.weight.push_back(detail::get<double>(is));
        f.slot_j.push_back(detail::get<std::int64_t>(is));
        const double re = detail::get<double>(is);
        f.values.emplace_back(re, detail::get<double>(is));
    }
    return f;
}

} // namespace conebergman
