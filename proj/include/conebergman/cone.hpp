#pragma once

// Homogeneous cones: the half-line, Lorentz cones and finite products of them.
//
// Every supported cone is a product of "leaves". A leaf is either the
// half-line (rank 1) or a Lorentz cone in R^k (rank 2). Leaf data is
// concatenated in the product: coordinates of F, rank indices, structure
// vectors and n-basis blocks.
//
// Lorentz frame. For y = (y_0, ..., y_{k-1}):
//     Δ_1(y) = y_0 + y_{k-1},   Δ_2(y) = y_0^2 - y_1^2 - ... - y_{k-1}^2,
//     Δ^{(s1,s2)} = Δ_1^{s1-s2} Δ_2^{s2},   e_Ω = (1, 0, ..., 0).
// In light-cone variables u = y_0 + y_{k-1}, v = y_0 - y_{k-1}, w = middle
// coordinates, the triangular group T_+ is parametrised by (a, b, c) with
//     u = a^2,  w = a c,  v = |c|^2 + b^2,
// so Δ_1 = a^2, Δ_2 = a^2 b^2. The chart used for lattices and quadrature
// is (α, β, γ) = (log a, log b, c / b); the invariant measure ν_Ω = Δ^d dy is
// 2 dα dβ dγ in this chart.
//
// The dual cone is realised on the same space (F' = F through the standard
// inner product, e_Ω' = e_Ω). The dual power function is fixed by the
// transposed action, which for the Lorentz leaf gives
//     Δ'^{(s1,s2)}(λ) = (λ_0 - λ_{k-1})^{s2-s1} Δ_2(λ)^{s1}.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/errors.hpp"
#include "conebergman/numerics.hpp"
#include "conebergman/weight.hpp"

namespace conebergman {

using Point = std::vector<double>;
using CPoint = std::vector<cplx>;

enum class ConeKind { HalfLine, Lorentz, Product };

class ConeDescriptor {
public:
    struct Leaf {
        ConeKind kind;         // HalfLine or Lorentz
        std::size_t dim;       // ambient dimension of the leaf
        std::size_t offset;    // first coordinate of the leaf in F
        std::size_t rank_offset;
    };

    static ConeDescriptor half_line() {
        ConeDescriptor c;
        c.kind_ = ConeKind::HalfLine;
        c.leaves_.push_back({ConeKind::HalfLine, 1, 0, 0});
        c.finish();
        return c;
    }

    static ConeDescriptor lorentz(std::size_t dim) {
        if (dim < 3) throw argument_error("lorentz: ambient dimension must be at least 3");
        ConeDescriptor c;
        c.kind_ = ConeKind::Lorentz;
        c.leaves_.push_back({ConeKind::Lorentz, dim, 0, 0});
        c.finish();
        return c;
    }

    static ConeDescriptor product(const std::vector<ConeDescriptor>& factors) {
        if (factors.empty()) throw argument_error("product: no factors");
        ConeDescriptor c;
        c.kind_ = ConeKind::Product;
        c.factors_ = factors;
        std::size_t off = 0, roff = 0;
        for (const auto& f : factors) {
            for (const auto& l : f.leaves_) {
                c.leaves_.push_back({l.kind, l.dim, off + l.offset, roff + l.rank_offset});
            }
            off += f.ambient_dim();
            roff += f.rank();
        }
        c.finish();
        return c;
    }

    ConeKind kind() const noexcept { return kind_; }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t ambient_dim() const noexcept { return dim_; }
    const WeightVector& d_vec() const noexcept { return d_; }
    const WeightVector& m_vec() const noexcept { return m_; }
    const WeightVector& m_prime_vec() const noexcept { return mp_; }
    const Point& e_omega() const noexcept { return e_; }
    const Point& e_omega_prime() const noexcept { return e_; }
    const std::vector<WeightVector>& n_basis() const noexcept { return basis_; }
    /// Homogeneity degree of Δ^{s_j} for each n-basis element.
    const std::vector<double>& n_basis_degrees() const noexcept { return basis_deg_; }
    const std::vector<Leaf>& leaves() const noexcept { return leaves_; }
    const std::vector<ConeDescriptor>& factors() const noexcept { return factors_; }

    /// -(1 + m/2 + m'/2), recomputed from the multiplicity vectors.
    WeightVector d_from_multiplicities() const {
        return -(WeightVector::ones(rank_) + 0.5 * m_ + 0.5 * mp_);
    }

    /// Dimension of the T_+ chart (equals ambient_dim).
    std::size_t chart_dim() const noexcept { return dim_; }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
        case ConeKind::HalfLine: os << "halfline"; break;
        case ConeKind::Lorentz: os << "lorentz(" << dim_ << ")"; break;
        case ConeKind::Product:
            os << "product[";
            for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? "," : "") << factors_[i].describe();
            os << "]";
            break;
        }
        return os.str();
    }

private:
    void finish() {
        dim_ = 0;
        rank_ = 0;
        std::vector<double> d, m, mp;
        for (const auto& l : leaves_) {
            dim_ += l.dim;
            if (l.kind == ConeKind::HalfLine) {
                rank_ += 1;
                d.push_back(-1.0);
                m.push_back(0.0);
                mp.push_back(0.0);
            } else {
                rank_ += 2;
                const double k = static_cast<double>(l.dim);
                d.insert(d.end(), {-k / 2.0, -k / 2.0});
                m.insert(m.end(), {0.0, k - 2.0});
                mp.insert(mp.end(), {k - 2.0, 0.0});
            }
        }
        d_ = WeightVector(d);
        m_ = WeightVector(m);
        mp_ = WeightVector(mp);
        e_.assign(dim_, 0.0);
        basis_.clear();
        basis_deg_.clear();
        for (const auto& l : leaves_) {
            e_[l.offset] = 1.0;
            if (l.kind == ConeKind::HalfLine) {
                WeightVector b(rank_);
                b[l.rank_offset] = 1.0;
                basis_.push_back(b);
                basis_deg_.push_back(1.0);
            } else {
                WeightVector b1(rank_), b2(rank_);
                b1[l.rank_offset] = 1.0;
                b2[l.rank_offset] = 1.0;
                b2[l.rank_offset + 1] = 1.0;
                basis_.push_back(b1);
                basis_deg_.push_back(1.0);
                basis_.push_back(b2);
                basis_deg_.push_back(2.0);
            }
        }
    }

    ConeKind kind_ = ConeKind::HalfLine;
    std::vector<Leaf> leaves_;
    std::vector<ConeDescriptor> factors_;
    std::size_t dim_ = 0, rank_ = 0;
    WeightVector d_, m_, mp_;
    Point e_;
    std::vector<WeightVector> basis_;
    std::vector<double> basis_deg_;
};

// ---------------------------------------------------------------------------
// Membership

namespace detail {

inline void check_dim(const ConeDescriptor& cone, std::size_t n, const char* what) {
    if (n != cone.ambient_dim()) {
        std::ostringstream os;
        os << what << ": expected a point of dimension " << cone.ambient_dim() << ", got " << n;
        throw argument_error(os.str());
    }
}

inline void check_rank(const ConeDescriptor& cone, const WeightVector& s, const char* what) {
    if (s.size() != cone.rank()) {
        std::ostringstream os;
        os << what << ": expected a weight of rank " << cone.rank() << ", got " << s.size();
        throw argument_error(os.str());
    }
}

template <typename T>
T lorentz_form(const std::vector<T>& y, std::size_t off, std::size_t dim) {
    T q = y[off] * y[off];
    for (std::size_t j = 1; j < dim; ++j) q -= y[off + j] * y[off + j];
    return q;
}

/// Lorentz bilinear form y_0 x_0 - Σ y_j x_j on a leaf.
inline double lorentz_bilinear(const Point& x, const Point& y, std::size_t off, std::size_t dim) {
    double q = x[off] * y[off];
    for (std::size_t j = 1; j < dim; ++j) q -= x[off + j] * y[off + j];
    return q;
}

} // namespace detail

/// True iff h lies in the open cone.
inline bool contains(const ConeDescriptor& cone, const Point& h) {
    detail::check_dim(cone, h.size(), "contains");
    for (const auto& l : cone.leaves()) {
        if (!(h[l.offset] > 0.0)) return false;
        if (l.kind == ConeKind::Lorentz && !(detail::lorentz_form(h, l.offset, l.dim) > 0.0)) return false;
    }
    return true;
}

/// Membership in the dual cone (the supported realisations are self-dual).
inline bool dual_contains(const ConeDescriptor& cone, const Point& lambda) { return contains(cone, lambda); }

inline Point real_part(const CPoint& w) {
    Point r(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[i].real();
    return r;
}

inline CPoint complexify(const Point& p) { return CPoint(p.begin(), p.end()); }

// ---------------------------------------------------------------------------
// Power functions, expressed through the leaf minors.
//
// Δ^s(w) = Π_j P_j(w)^{e_j(s)}, with P_j the polynomial minors of each leaf
// and e_j linear in s. Each minor has positive real part on Ω + iF, except
// Δ_2 of a Lorentz leaf, which never takes values in (-∞, 0] there; so the
// principal logarithm of every minor is continuous on Ω + iF and vanishes
// at e_Ω.

struct MinorData {
    std::vector<cplx> values;
    std::vector<double> exponents;
    std::vector<double> degrees;
};

namespace detail {

template <bool Dual>
MinorData minors(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w) {
    MinorData out;
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset, r = l.rank_offset;
        if (l.kind == ConeKind::HalfLine) {
            out.values.push_back(w[o]);
            out.exponents.push_back(s[r]);
            out.degrees.push_back(1.0);
        } else {
            const cplx last = w[o + l.dim - 1];
            const cplx first = Dual ? (w[o] - last) : (w[o] + last);
            out.values.push_back(first);
            out.values.push_back(lorentz_form(w, o, l.dim));
            if constexpr (Dual) {
                out.exponents.push_back(s[r + 1] - s[r]);
                out.exponents.push_back(s[r]);
            } else {
                out.exponents.push_back(s[r] - s[r + 1]);
                out.exponents.push_back(s[r + 1]);
            }
            out.degrees.push_back(1.0);
            out.degrees.push_back(2.0);
        }
    }
    return out;
}

} // namespace detail

/// Minor values and exponents of Δ_Ω^s at w (no domain check).
inline MinorData power_minors(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w) {
    detail::check_dim(cone, w.size(), "power_minors");
    detail::check_rank(cone, s, "power_minors");
    return detail::minors<false>(cone, s, w);
}

inline MinorData dual_power_minors(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w) {
    detail::check_dim(cone, w.size(), "dual_power_minors");
    detail::check_rank(cone, s, "dual_power_minors");
    return detail::minors<true>(cone, s, w);
}

/// log Δ_Ω^s(w) using principal logarithms of the minors.
inline cplx log_power_function(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w) {
    detail::check_dim(cone, w.size(), "power_function");
    detail::check_rank(cone, s, "power_function");
    if (!contains(cone, real_part(w))) throw domain_error("power_function: Re(w) is not in the cone");
    const auto md = detail::minors<false>(cone, s, w);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < md.values.size(); ++j) acc += md.exponents[j] * std::log(md.values[j]);
    return acc;
}

/// Δ_Ω^s(w) for Re(w) ∈ Ω.
inline cplx power_function(const ConeDescriptor& cone, const WeightVector& s, const CPoint& w) {
    return std::exp(log_power_function(cone, s, w));
}

/// Δ_Ω^s(h) for real h ∈ Ω.
inline double power_function(const ConeDescriptor& cone, const WeightVector& s, const Point& h) {
    detail::check_dim(cone, h.size(), "power_function");
    detail::check_rank(cone, s, "power_function");
    if (!contains(cone, h)) throw domain_error("power_function: point is not in the cone");
    const auto md = detail::minors<false>(cone, s, complexify(h));
    double acc = 0.0;
    for (std::size_t j = 0; j < md.values.size(); ++j) acc += md.exponents[j] * std::log(md.values[j].real());
    return std::exp(acc);
}

inline cplx log_dual_power_function(const ConeDescriptor& cone, const WeightVector& s, const CPoint& lambda) {
    detail::check_dim(cone, lambda.size(), "dual_power_function");
    detail::check_rank(cone, s, "dual_power_function");
    if (!dual_contains(cone, real_part(lambda)))
        throw domain_error("dual_power_function: Re(λ) is not in the dual cone");
    const auto md = detail::minors<true>(cone, s, lambda);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < md.values.size(); ++j) acc += md.exponents[j] * std::log(md.values[j]);
    return acc;
}

inline cplx dual_power_function(const ConeDescriptor& cone, const WeightVector& s, const CPoint& lambda) {
    return std::exp(log_dual_power_function(cone, s, lambda));
}

inline double dual_power_function(const ConeDescriptor& cone, const WeightVector& s, const Point& lambda) {
    return dual_power_function(cone, s, complexify(lambda)).real();
}

// ---------------------------------------------------------------------------
// T_+ chart and action

/// Chart coordinates (α, β, γ) per Lorentz leaf and α = log y per half-line leaf.
inline Point chart_to_point(const ConeDescriptor& cone, const Point& chart) {
    detail::check_dim(cone, chart.size(), "chart_to_point");
    Point h(cone.ambient_dim(), 0.0);
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset;
        if (l.kind == ConeKind::HalfLine) {
            h[o] = std::exp(chart[o]);
            continue;
        }
        const double a = std::exp(chart[o]);
        const double b = std::exp(chart[o + 1]);
        double c2 = 0.0;
        const double u = a * a;
        for (std::size_t j = 1; j + 1 < l.dim; ++j) {
            const double c = b * chart[o + 1 + j];
            h[o + j] = a * c;
            c2 += c * c;
        }
        const double v = c2 + b * b;
        h[o] = 0.5 * (u + v);
        h[o + l.dim - 1] = 0.5 * (u - v);
    }
    return h;
}

inline Point point_to_chart(const ConeDescriptor& cone, const Point& h) {
    detail::check_dim(cone, h.size(), "point_to_chart");
    if (!contains(cone, h)) throw domain_error("point_to_chart: point is not in the cone");
    Point chart(cone.ambient_dim(), 0.0);
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset;
        if (l.kind == ConeKind::HalfLine) {
            chart[o] = std::log(h[o]);
            continue;
        }
        const double u = h[o] + h[o + l.dim - 1];
        const double v = h[o] - h[o + l.dim - 1];
        const double a = std::sqrt(u);
        double c2 = 0.0;
        std::vector<double> c(l.dim - 2);
        for (std::size_t j = 1; j + 1 < l.dim; ++j) {
            c[j - 1] = h[o + j] / a;
            c2 += c[j - 1] * c[j - 1];
        }
        const double b = std::sqrt(v - c2);
        chart[o] = std::log(a);
        chart[o + 1] = std::log(b);
        for (std::size_t j = 0; j < c.size(); ++j) chart[o + 2 + j] = c[j] / b;
    }
    return chart;
}

/// Density of ν_Ω with respect to Lebesgue measure in the chart (constant).
inline double chart_measure_density(const ConeDescriptor& cone) {
    double f = 1.0;
    for (const auto& l : cone.leaves())
        if (l.kind == ConeKind::Lorentz) f *= 2.0;
    return f;
}

/// The linear map t ∈ T_+ with t·e_Ω = h, applied to a (possibly complex) vector.
template <typename T>
std::vector<T> tplus_apply(const ConeDescriptor& cone, const Point& h, const std::vector<T>& x) {
    detail::check_dim(cone, h.size(), "tplus_apply");
    detail::check_dim(cone, x.size(), "tplus_apply");
    const Point chart = point_to_chart(cone, h);
    std::vector<T> out(x.size());
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset;
        if (l.kind == ConeKind::HalfLine) {
            out[o] = h[o] * x[o];
            continue;
        }
        const double a = std::exp(chart[o]);
        const double b = std::exp(chart[o + 1]);
        const std::size_t nm = l.dim - 2;
        std::vector<double> c(nm);
        for (std::size_t j = 0; j < nm; ++j) c[j] = b * chart[o + 2 + j];
        const T u = x[o] + x[o + l.dim - 1];
        const T v = x[o] - x[o + l.dim - 1];
        T cw = T(0), c2 = T(0);
        for (std::size_t j = 0; j < nm; ++j) {
            cw += c[j] * x[o + 1 + j];
            c2 += c[j] * c[j];
        }
        const T u2 = a * a * u;
        const T v2 = b * b * v + 2.0 * b * cw + c2 * u;
        for (std::size_t j = 0; j < nm; ++j) out[o + 1 + j] = a * (b * x[o + 1 + j] + c[j] * u);
        out[o] = 0.5 * (u2 + v2);
        out[o + l.dim - 1] = 0.5 * (u2 - v2);
    }
    return out;
}

/// |det t| for t·e_Ω = h, which equals Δ^{-d}(h).
inline double tplus_determinant(const ConeDescriptor& cone, const Point& h) {
    return power_function(cone, -cone.d_vec(), h);
}

// ---------------------------------------------------------------------------
// Invariant distance

/// Per leaf: |log(y/x)| on the half-line; on a Lorentz leaf sqrt(Σ log² λ_i)
/// with λ_i the roots of Δ_2(y - λx) = 0. Leaves combine as a Riemannian product.
inline double invariant_distance(const ConeDescriptor& cone, const Point& x, const Point& y) {
    detail::check_dim(cone, x.size(), "invariant_distance");
    detail::check_dim(cone, y.size(), "invariant_distance");
    if (!contains(cone, x) || !contains(cone, y)) throw domain_error("invariant_distance: point outside the cone");
    double acc = 0.0;
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset;
        if (l.kind == ConeKind::HalfLine) {
            const double t = std::log(y[o] / x[o]);
            acc += t * t;
            continue;
        }
        const double qx = detail::lorentz_form(x, o, l.dim);
        const double qy = detail::lorentz_form(y, o, l.dim);
        const double bxy = detail::lorentz_bilinear(x, y, o, l.dim);
        const double disc = std::max(0.0, bxy * bxy - qx * qy);
        const double l1 = (bxy + std::sqrt(disc)) / qx;
        const double l2 = qy / (qx * l1);
        const double t1 = std::log(l1), t2 = std::log(l2);
        acc += t1 * t1 + t2 * t2;
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// |s| in the n-basis

/// Coefficients α with s = Σ α_j s_j over the n-basis.
inline std::vector<double> n_basis_coefficients(const ConeDescriptor& cone, const WeightVector& s) {
    detail::check_rank(cone, s, "abs_weight");
    const std::size_t r = cone.rank();
    // Columns are basis vectors; Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(r, std::vector<double>(r + 1));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) a[i][j] = cone.n_basis()[j][i];
        a[i][r] = s[i];
    }
    for (std::size_t col = 0; col < r; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < r; ++i)
            if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) < 1e-14) throw numeric_error("abs_weight: n-basis is singular");
        for (std::size_t i = 0; i < r; ++i) {
            if (i == col) continue;
            const double f = a[i][col] / a[col][col];
            for (std::size_t j = col; j <= r; ++j) a[i][j] -= f * a[col][j];
        }
    }
    std::vector<double> alpha(r);
    for (std::size_t i = 0; i < r; ++i) alpha[i] = a[i][r] / a[i][i];
    return alpha;
}

/// |s| = Σ_j |α_j| deg(Δ^{s_j}).
inline double abs_weight(const ConeDescriptor& cone, const WeightVector& s) {
    const auto alpha = n_basis_coefficients(cone, s);
    double acc = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) acc += std::abs(alpha[j]) * cone.n_basis_degrees()[j];
    return acc;
}

// ---------------------------------------------------------------------------
// Gamma function of the cone and the Laplace-transform identity

struct GammaOptions {
    double rel_tol = 1e-12;
    std::size_t order = 24;      // Gauss–Legendre points per panel
    double panel_width = 0.5;    // panel width in logarithmic coordinates
    std::size_t max_panels = 96; // panels widen beyond this count
    int max_expansions = 12;
};

/// Truncated integral of e^{-⟨λ,h⟩} Δ^s(h) dν(h) with the logarithmic chart
/// restricted to [peak - lower, peak + upper] per axis. Exposed for the
/// divergence scans; it performs no convergence-region check.
inline double laplace_integral_window(const ConeDescriptor& cone, const WeightVector& s, const Point& lambda,
                                      double lower, double upper, const GammaOptions& opt = {}) {
    detail::check_rank(cone, s, "laplace_integral");
    detail::check_dim(cone, lambda.size(), "laplace_integral");
    auto axis = [&](double peak) {
        const double a = peak - lower, b = peak + upper;
        const double width = std::max(opt.panel_width, (b - a) / static_cast<double>(opt.max_panels));
        const auto panels = static_cast<std::size_t>(std::ceil((b - a) / width));
        return composite_rule(a, b, std::max<std::size_t>(panels, 1), opt.order);
    };
    double total = 1.0;
    for (const auto& l : cone.leaves()) {
        const std::size_t o = l.offset, r = l.rank_offset;
        if (l.kind == ConeKind::HalfLine) {
            // ∫ exp(-λ e^u + s u) du
            const double lam = lambda[o], sv = s[r];
            const double peak = sv > 0 ? std::log(sv / lam) : -std::log(lam);
            const auto q = axis(peak);
            std::vector<double> terms(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double u = q.nodes[i];
                terms[i] = q.weights[i] * std::exp(-lam * std::exp(u) + sv * u);
            }
            total *= pairwise_sum(terms);
            continue;
        }
        // Lorentz leaf, chart (α, β, c): integrand 2 a^{2 s1} b^{2 s2 - k + 2} e^{-⟨λ,y⟩}.
        const double k = static_cast<double>(l.dim);
        const std::size_t nm = l.dim - 2;
        const double lam_u = 0.5 * (lambda[o] + lambda[o + l.dim - 1]);
        const double lam_v = 0.5 * (lambda[o] - lambda[o + l.dim - 1]);
        std::vector<double> lam_mid(nm);
        double mid2 = 0.0;
        for (std::size_t j = 0; j < nm; ++j) {
            lam_mid[j] = lambda[o + 1 + j];
            mid2 += lam_mid[j] * lam_mid[j];
        }
        const double s1 = s[r], s2 = s[r + 1];
        const double ea = 2.0 * s1, eb = 2.0 * s2 - k + 2.0;
        const double a_eff = lam_u - mid2 / (4.0 * lam_v);
        const double peak_a = ea > 0 && a_eff > 0 ? 0.5 * std::log(ea / (2.0 * a_eff)) : 0.0;
        const double peak_b = eb > 0 && lam_v > 0 ? 0.5 * std::log(eb / (2.0 * lam_v)) : 0.0;
        // After the Gaussian c-integral ∫ e^{-(B|c|^2 + a⟨λ_mid,c⟩)} dc = (π/B)^{(k-2)/2} e^{a^2|λ_mid|^2/(4B)}
        // the integrand factorises into an α-part and a β-part.
        auto log_axis = [&](double peak, double expo, double coef) {
            const auto q = axis(peak);
            std::vector<double> t(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double x = q.nodes[i];
                t[i] = q.weights[i] * std::exp(expo * x - coef * std::exp(2.0 * x));
            }
            return pairwise_sum(t);
        };
        const double gauss = std::pow(std::numbers::pi / lam_v, 0.5 * static_cast<double>(nm));
        total *= 2.0 * gauss * log_axis(peak_a, ea, a_eff) * log_axis(peak_b, eb, lam_v);
    }
    return total;
}

/// Convergence region of Γ_Ω: Δ^s ν_Ω is a Radon measure iff s ≻ m/2.
inline bool gamma_converges(const ConeDescriptor& cone, const WeightVector& s) {
    detail::check_rank(cone, s, "gamma_cone");
    return strictly_succ(s, 0.5 * cone.m_vec());
}

struct LaplaceResult {
    double value;
    double lower_window;
    int expansions;
};

/// ∫_Ω e^{-⟨λ,h⟩} Δ^s(h) dν_Ω(h), expanding the window dyadically until the
/// relative change drops below the tolerance.
inline LaplaceResult laplace_integral(const ConeDescriptor& cone, const WeightVector& s, const Point& lambda,
                                      const GammaOptions& opt = {}) {
    if (!gamma_converges(cone, s)) {
        std::ostringstream os;
        os << "gamma_cone: s = " << s << " is outside the convergence region s ≻ m/2 = " << 0.5 * cone.m_vec();
        throw domain_error(os.str());
    }
    if (!dual_contains(cone, lambda)) throw domain_error("laplace_integral: λ is not in the dual cone");
    double lower = 8.0, upper = 4.0;
    double prev = laplace_integral_window(cone, s, lambda, lower, upper, opt);
    for (int it = 0; it < opt.max_expansions; ++it) {
        lower *= 2.0;
        upper += 1.0;
        const double cur = laplace_integral_window(cone, s, lambda, lower, upper, opt);
        if (rel_diff(cur, prev) < opt.rel_tol) return {cur, lower, it + 1};
        prev = cur;
    }
    std::ostringstream os;
    os << "gamma_cone: window expansion did not converge for s = " << s << " (last value " << prev
       << ", lower window " << lower << ")";
    throw numeric_error(os.str());
}

/// Γ_Ω(s) = ∫_Ω e^{-⟨e_Ω', h⟩} Δ^s(h) dν_Ω(h).
inline double gamma_cone(const ConeDescriptor& cone, const WeightVector& s, const GammaOptions& opt = {}) {
    return laplace_integral(cone, s, cone.e_omega_prime(), opt).value;
}

/// ∫ e^{-⟨λ,h⟩} Δ^s dν · Δ'^s(λ); constant in λ and equal to Γ_Ω(s).
inline double laplace_transform_check(const ConeDescriptor& cone, const WeightVector& s, const Point& lambda,
                                      const GammaOptions& opt = {}) {
    const double integral = laplace_integral(cone, s, lambda, opt).value;
    return integral * dual_power_function(cone, s, lambda);
}

} // namespace conebergman
