#pragma once

// (δ, R)-lattices on cones and on Siegel domains.
//
// Cone lattices are greedy maximal 2δ-separated subsets of a probe grid in
// the T_+ chart, scanned in order of distance from e_Ω. Because every
// rejected probe lies within 2δ of an accepted point, the result covers the
// probe set with radius 2δ (R = 2). Cell measures come from the
// nearest-lattice-point partition of the probe grid; the probe grid carries
// exact chart measures, so the cells sum to the ν_Ω measure of the box.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <vector>

#include "conebergman/cone.hpp"
#include "conebergman/domain.hpp"
#include "conebergman/errors.hpp"

namespace conebergman {

/// Per-coordinate closed intervals of the T_+ chart.
struct ChartBox {
    std::vector<double> lo, hi;

    static ChartBox cube(const ConeDescriptor& cone, double half_width) {
        return {std::vector<double>(cone.chart_dim(), -half_width), std::vector<double>(cone.chart_dim(), half_width)};
    }
    /// Half-line interval [y_min, y_max] (also usable per half-line leaf).
    static ChartBox half_line(double y_min, double y_max) { return {{std::log(y_min)}, {std::log(y_max)}}; }
};

struct Lattice {
    double delta = 0.0;
    double R = 2.0;
    std::vector<Point> points;           // h_k, or ρ-values of domain points
    std::vector<double> cell_measures;   // ν_Ω cells (cone) or ν_D cells (domain)
    std::vector<long> layer;             // k
    std::vector<long> slot;              // j (−1 for cone lattices)
    std::vector<DomainPoint> domain_points;  // empty for cone lattices
    std::vector<Point> base_points;      // base cone lattice h_k (domain lattices)
    std::vector<double> base_measures;   // ν_Ω cells of the base lattice
    ChartBox box;

    std::size_t size() const noexcept { return points.size(); }
    bool on_domain() const noexcept { return !domain_points.empty(); }
};

namespace detail {

/// Coordinates that are Lipschitz in the invariant distance, with their
/// Lipschitz constants: α per half-line leaf (1); α and α+β per Lorentz
/// leaf (1/2 and 1/√2).
inline std::vector<double> distance_keys(const ConeDescriptor& cone, const Point& chart,
                                         std::vector<double>* lipschitz = nullptr) {
    std::vector<double> k;
    if (lipschitz) lipschitz->clear();
    for (const auto& l : cone.leaves()) {
        if (l.kind == ConeKind::HalfLine) {
            k.push_back(chart[l.offset]);
            if (lipschitz) lipschitz->push_back(1.0);
        } else {
            k.push_back(chart[l.offset]);
            k.push_back(chart[l.offset] + chart[l.offset + 1]);
            if (lipschitz) {
                lipschitz->push_back(0.5);
                lipschitz->push_back(1.0 / std::sqrt(2.0));
            }
        }
    }
    return k;
}

/// Uniform hash on the distance keys; neighbours within distance r lie in
/// adjacent cells when the cell size is r · Lipschitz constant.
class DistanceHash {
public:
    DistanceHash(const ConeDescriptor& cone, double radius) : cone_(cone) {
        Point zero(cone.chart_dim(), 0.0);
        detail::distance_keys(cone, zero, &cell_);
        for (double& c : cell_) c *= radius;
    }

    void insert(std::size_t id, const Point& chart) { map_[cell_of(chart)].push_back(id); }

    template <typename F>
    void for_neighbours(const Point& chart, F&& f) const {
        const auto base = cell_of(chart);
        const std::size_t K = base.size();
        std::vector<long> cur(K);
        std::size_t total = 1;
        for (std::size_t i = 0; i < K; ++i) total *= 3;
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (std::size_t i = 0; i < K; ++i) {
                cur[i] = base[i] + static_cast<long>(rem % 3) - 1;
                rem /= 3;
            }
            auto it = map_.find(cur);
            if (it == map_.end()) continue;
            for (std::size_t id : it->second) f(id);
        }
    }

private:
    std::vector<long> cell_of(const Point& chart) const {
        const auto k = detail::distance_keys(cone_, chart);
        std::vector<long> c(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) c[i] = static_cast<long>(std::floor(k[i] / cell_[i]));
        return c;
    }

    const ConeDescriptor& cone_;
    std::vector<double> cell_;
    std::map<std::vector<long>, std::vector<std::size_t>> map_;
};

struct ProbeGrid {
    std::vector<Point> chart;
    std::vector<Point> points;
    std::vector<double> measure;
};

/// Tensor probe grid with trapezoid weights and at most `spacing` between
/// neighbouring probes along each chart axis.
inline ProbeGrid probe_grid(const ConeDescriptor& cone, const ChartBox& box, double spacing) {
    const std::size_t D = cone.chart_dim();
    if (box.lo.size() != D || box.hi.size() != D) throw argument_error("lattice: chart box has wrong dimension");
    std::vector<std::vector<double>> nodes(D), w(D);
    for (std::size_t a = 0; a < D; ++a) {
        if (!(box.hi[a] >= box.lo[a])) throw argument_error("lattice: empty chart box");
        const double len = box.hi[a] - box.lo[a];
        const std::size_t n = len > 0 ? static_cast<std::size_t>(std::ceil(len / spacing - 1e-9)) : 0;
        if (n == 0) {
            nodes[a] = {box.lo[a]};
            w[a] = {1.0};
            continue;
        }
        const double h = len / static_cast<double>(n);
        for (std::size_t i = 0; i <= n; ++i) {
            nodes[a].push_back(box.lo[a] + h * static_cast<double>(i));
            w[a].push_back((i == 0 || i == n) ? 0.5 * h : h);
        }
    }
    ProbeGrid g;
    std::size_t total = 1;
    for (const auto& v : nodes) total *= v.size();
    const double dens = chart_measure_density(cone);
    g.chart.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        Point c(D);
        double m = dens;
        for (std::size_t a = 0; a < D; ++a) {
            const std::size_t i = rem % nodes[a].size();
            rem /= nodes[a].size();
            c[a] = nodes[a][i];
            m *= w[a][i];
        }
        g.points.push_back(chart_to_point(cone, c));
        g.chart.push_back(std::move(c));
        g.measure.push_back(m);
    }
    return g;
}

} // namespace detail

struct ConeLatticeOptions {
    double probe_spacing_factor = 0.25;  // probe spacing in chart units, relative to δ
    double accept_slack = 1e-9;
};

/// Greedy maximal 2δ-separated lattice within the chart box.
inline Lattice cone_lattice(const ConeDescriptor& cone, double delta, const ChartBox& box,
                            const ConeLatticeOptions& opt = {}) {
    if (!(delta > 0.0)) throw argument_error("cone_lattice: δ must be positive");
    const auto probes = detail::probe_grid(cone, box, delta * opt.probe_spacing_factor);
    const Point e = cone.e_omega();
    std::vector<double> de(probes.points.size());
    parallel_for(de.size(), [&](std::size_t i) { de[i] = invariant_distance(cone, e, probes.points[i]); });
    std::vector<std::size_t> order(de.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return de[a] < de[b]; });

    const double sep = 2.0 * delta * (1.0 - opt.accept_slack);
    detail::DistanceHash hash(cone, 2.0 * delta);
    Lattice L;
    L.delta = delta;
    L.R = 2.0;
    L.box = box;
    std::vector<std::size_t> accepted_probe;
    for (std::size_t idx : order) {
        const Point& p = probes.points[idx];
        bool ok = true;
        hash.for_neighbours(probes.chart[idx], [&](std::size_t id) {
            if (ok && invariant_distance(cone, L.points[id], p) < sep) ok = false;
        });
        if (!ok) continue;
        hash.insert(L.points.size(), probes.chart[idx]);
        L.points.push_back(p);
        accepted_probe.push_back(idx);
    }
    // nearest-lattice-point partition of the probe measure
    std::vector<std::size_t> owner(probes.points.size());
    parallel_for(owner.size(), [&](std::size_t i) {
        double best = INFINITY;
        std::size_t arg = 0;
        hash.for_neighbours(probes.chart[i], [&](std::size_t id) {
            const double d = invariant_distance(cone, L.points[id], probes.points[i]);
            if (d < best || (d == best && id < arg)) {
                best = d;
                arg = id;
            }
        });
        owner[i] = arg;
    });
    L.cell_measures.assign(L.points.size(), 0.0);
    for (std::size_t i = 0; i < owner.size(); ++i) L.cell_measures[owner[i]] += probes.measure[i];
    L.layer.resize(L.points.size());
    std::iota(L.layer.begin(), L.layer.end(), 0L);
    L.slot.assign(L.points.size(), -1);
    return L;
}

/// ν_Ω measure of a chart box.
inline double chart_box_measure(const ConeDescriptor& cone, const ChartBox& box) {
    double v = chart_measure_density(cone);
    for (std::size_t a = 0; a < box.lo.size(); ++a) v *= box.hi[a] - box.lo[a];
    return v;
}

struct LatticeDiagnostics {
    double min_separation;   // min pairwise distance / δ
    double covering_radius;  // max over probes of distance to the lattice / δ
    std::size_t max_overlap;
};

/// Minimum pairwise distance (exhaustive).
inline double min_pairwise_distance(const ConeDescriptor& cone, const Lattice& L) {
    double m = INFINITY;
    for (std::size_t i = 0; i < L.size(); ++i)
        for (std::size_t j = i + 1; j < L.size(); ++j) m = std::min(m, invariant_distance(cone, L.points[i], L.points[j]));
    return m;
}

/// Distance from each probe point to the nearest lattice point.
inline std::vector<double> covering_distances(const ConeDescriptor& cone, const Lattice& L, const std::vector<Point>& probes) {
    std::vector<double> out(probes.size());
    parallel_for(probes.size(), [&](std::size_t i) {
        double best = INFINITY;
        for (const auto& p : L.points) best = std::min(best, invariant_distance(cone, p, probes[i]));
        out[i] = best;
    });
    return out;
}

/// #{k : d(probe, h_k) ≤ radius} for each probe.
inline std::vector<std::size_t> overlap_counts(const ConeDescriptor& cone, const Lattice& L, const std::vector<Point>& probes,
                                               double radius) {
    std::vector<std::size_t> out(probes.size());
    parallel_for(probes.size(), [&](std::size_t i) {
        std::size_t c = 0;
        for (const auto& p : L.points) c += invariant_distance(cone, p, probes[i]) <= radius;
        out[i] = c;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Lattices on D

/// The box family of the upper half-plane,
///     Q_{j,k} = (2^{kR} R j, 2^{kR} R (j+1)) × (2^{kR}, 2^{(k+1)R}),
/// with centres (2^{kR} R (j + 1/2), 2^{(k+1/2)R}) and exact ν_D cell measures
/// R (1 − 2^{−R}). Indices run over j ∈ [j_lo, j_hi), k ∈ [k_lo, k_hi).
inline Lattice box_lattice(double R, long j_lo, long j_hi, long k_lo, long k_hi) {
    if (!(R > 0.0)) throw argument_error("box_lattice: R must be positive");
    if (j_hi <= j_lo || k_hi <= k_lo) throw argument_error("box_lattice: empty index range");
    Lattice L;
    L.R = R;
    L.delta = R * std::log(2.0) / 2.0;
    const double cell = R * (1.0 - std::pow(2.0, -R));
    for (long k = k_lo; k < k_hi; ++k) {
        const double y0 = std::pow(2.0, static_cast<double>(k) * R);
        const double yc = std::pow(2.0, (static_cast<double>(k) + 0.5) * R);
        L.base_points.push_back({yc});
        L.base_measures.push_back(R * std::log(2.0));
        for (long j = j_lo; j < j_hi; ++j) {
            const double xc = y0 * R * (static_cast<double>(j) + 0.5);
            L.domain_points.push_back({{}, {cplx(xc, yc)}});
            L.points.push_back({yc});
            L.cell_measures.push_back(cell);
            L.layer.push_back(k);
            L.slot.push_back(j);
        }
    }
    return L;
}

/// Box lattice of the upper half-plane at parameter δ (so 2^R = e^{2δ}) whose
/// slot range on each layer covers the window |x| ≤ x_cover.
inline Lattice halfplane_window_lattice(double delta, long k_lo, long k_hi, double x_cover) {
    if (!(delta > 0.0) || !(x_cover > 0.0)) throw argument_error("halfplane_window_lattice: δ and x_cover must be positive");
    if (k_hi <= k_lo) throw argument_error("halfplane_window_lattice: empty layer range");
    const double R = 2.0 * delta / std::log(2.0);
    Lattice L;
    L.R = R;
    L.delta = delta;
    for (long k = k_lo; k < k_hi; ++k) {
        const long J = static_cast<long>(std::ceil(x_cover / (std::pow(2.0, static_cast<double>(k) * R) * R)));
        auto layer = box_lattice(R, -J, J, k, k + 1);
        for (std::size_t i = 0; i < layer.size(); ++i) {
            L.points.push_back(layer.points[i]);
            L.cell_measures.push_back(layer.cell_measures[i]);
            L.layer.push_back(layer.layer[i]);
            L.slot.push_back(layer.slot[i]);
            L.domain_points.push_back(layer.domain_points[i]);
        }
        L.base_points.push_back(layer.base_points[0]);
        L.base_measures.push_back(layer.base_measures[0]);
    }
    return L;
}

struct DomainLatticeExtents {
    long k_lo = -4, k_hi = 4;   // half-line layers h_k = e^{2δ(k+1/2)}
    double chart_half_width = 1.0;  // chart box of the base lattice for higher-rank cones
    long j_extent = 8;          // x-slots j ∈ [−j_extent, j_extent) per coordinate
    long zeta_extent = 3;       // ζ-slots per real coordinate, same convention
};

/// Product lattice on D: over each base point h_k, horizontal points
/// t_{h_k}·(2δ (j + 1/2)) and ζ-points sqrt(h_k)·2δ (l + 1/2), so that
/// ρ(ζ_{j,k}, z_{j,k}) = h_k. The base is the geometric ray e^{2δ(k+1/2)}
/// on the half-line and a greedy cone lattice otherwise. On the upper
/// half-plane this is the box family with 2^R = e^{2δ}.
inline Lattice domain_lattice(const SiegelDomain& dom, double delta, const DomainLatticeExtents& ext = {}) {
    if (!(delta > 0.0)) throw argument_error("domain_lattice: δ must be positive");
    if (dom.is_tube() && dom.cone().kind() == ConeKind::HalfLine) {
        auto L = box_lattice(2.0 * delta / std::log(2.0), -ext.j_extent, ext.j_extent, ext.k_lo, ext.k_hi);
        L.delta = delta;
        return L;
    }
    const auto& cone = dom.cone();
    const std::size_t m = dom.m(), n = dom.n();
    const double step = 2.0 * delta;
    Lattice L;
    L.delta = delta;
    L.R = 2.0;
    std::vector<long> base_index;
    if (cone.kind() == ConeKind::HalfLine) {
        for (long k = ext.k_lo; k < ext.k_hi; ++k) {
            L.base_points.push_back({std::exp(step * (static_cast<double>(k) + 0.5))});
            L.base_measures.push_back(step);
            base_index.push_back(k);
        }
    } else {
        const auto base = cone_lattice(cone, delta, ChartBox::cube(cone, ext.chart_half_width));
        L.base_points = base.points;
        L.base_measures = base.cell_measures;
        base_index = base.layer;
        L.box = base.box;
    }
    if (n > 0 && cone.kind() != ConeKind::HalfLine)
        throw unsupported_error("domain_lattice: ζ axes are supported over the half-line only");
    const long nj = 2 * ext.j_extent, nz = 2 * ext.zeta_extent;
    for (std::size_t kb = 0; kb < L.base_points.size(); ++kb) {
        const Point& h = L.base_points[kb];
        const double sc = n ? h[0] : 1.0;
        std::size_t total = 1;
        for (std::size_t a = 0; a < m; ++a) total *= static_cast<std::size_t>(nj);
        for (std::size_t a = 0; a < 2 * n; ++a) total *= static_cast<std::size_t>(nz);
        const double horiz_cell = std::pow(step, static_cast<double>(m + 2 * n)) * tplus_determinant(cone, h) *
                                  std::pow(sc, static_cast<double>(n));
        const double dens = power_function(cone, dom.b_vec() + cone.d_vec(), h);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            Point xi(m);
            long j0 = 0;
            for (std::size_t a = 0; a < m; ++a) {
                const long j = static_cast<long>(rem % static_cast<std::size_t>(nj)) - ext.j_extent;
                rem /= static_cast<std::size_t>(nj);
                xi[a] = step * (static_cast<double>(j) + 0.5);
                if (a == 0) j0 = j;
            }
            CPoint zeta(n);
            for (std::size_t a = 0; a < n; ++a) {
                const long lr = static_cast<long>(rem % static_cast<std::size_t>(nz)) - ext.zeta_extent;
                rem /= static_cast<std::size_t>(nz);
                const long li = static_cast<long>(rem % static_cast<std::size_t>(nz)) - ext.zeta_extent;
                rem /= static_cast<std::size_t>(nz);
                zeta[a] = std::sqrt(sc) * step * cplx(static_cast<double>(lr) + 0.5, static_cast<double>(li) + 0.5);
            }
            const Point x = tplus_apply(cone, h, xi);
            const Point ph = n ? dom.phi(zeta) : Point(m, 0.0);
            DomainPoint w;
            w.zeta = zeta;
            w.z.resize(m);
            for (std::size_t a = 0; a < m; ++a) w.z[a] = cplx(x[a], h[a] + ph[a]);
            L.domain_points.push_back(std::move(w));
            L.points.push_back(h);
            L.cell_measures.push_back(horiz_cell * dens * L.base_measures[kb]);
            L.layer.push_back(base_index[kb]);
            L.slot.push_back(j0);
        }
    }
    return L;
}

/// CSV export: index, layer, slot, coordinates of h (and z, ζ on D), cell measure.
inline void write_csv(const Lattice& L, std::ostream& os) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12e", v);
        os << ',' << buf;
    };
    const std::size_t dim = L.points.empty() ? 0 : L.points[0].size();
    const std::size_t n = L.on_domain() ? L.domain_points[0].zeta.size() : 0;
    os << "index,layer,slot";
    for (std::size_t a = 0; a < dim; ++a) os << ",h" << a;
    if (L.on_domain()) {
        for (std::size_t a = 0; a < dim; ++a) os << ",x" << a;
        for (std::size_t a = 0; a < n; ++a) os << ",zeta" << a << "_re,zeta" << a << "_im";
    }
    os << ",cell_measure\n";
    for (std::size_t i = 0; i < L.size(); ++i) {
        os << i << ',' << L.layer[i] << ',' << L.slot[i];
        for (double v : L.points[i]) num(v);
        if (L.on_domain()) {
            for (const auto& z : L.domain_points[i].z) num(z.real());
            for (const auto& z : L.domain_points[i].zeta) {
                num(z.real());
                num(z.imag());
            }
        }
        num(L.cell_measures[i]);
        os << '\n';
    }
}

/// Grid skeleton whose layers are the points of a cone lattice.
inline GridFunction make_grid(const SiegelDomain& dom, const Lattice& cone_lat, const GridSpec& spec) {
    if (cone_lat.on_domain()) throw argument_error("make_grid: expected a cone lattice");
    return make_grid(dom, cone_lat.points, cone_lat.cell_measures, spec);
}

} // namespace conebergman
