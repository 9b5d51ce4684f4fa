#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <vector>

#include "conebergman/errors.hpp"

namespace conebergman {

/// An element of R^r indexing power functions, weights and kernel exponents.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::size_t r, double fill = 0.0) : c_(r, fill) {}
    WeightVector(std::initializer_list<double> v) : c_(v) {}
    explicit WeightVector(std::vector<double> v) : c_(std::move(v)) {}

    std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    const std::vector<double>& components() const noexcept { return c_; }
    auto begin() const noexcept { return c_.begin(); }
    auto end() const noexcept { return c_.end(); }

    double sum() const { return std::accumulate(c_.begin(), c_.end(), 0.0); }

    static WeightVector ones(std::size_t r) { return WeightVector(r, 1.0); }

    WeightVector& operator+=(const WeightVector& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    WeightVector& operator-=(const WeightVector& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    WeightVector& operator*=(double a) {
        for (double& x : c_) x *= a;
        return *this;
    }

    friend WeightVector operator+(WeightVector a, const WeightVector& b) { return a += b; }
    friend WeightVector operator-(WeightVector a, const WeightVector& b) { return a -= b; }
    friend WeightVector operator-(WeightVector a) { return a *= -1.0; }
    friend WeightVector operator*(double s, WeightVector a) { return a *= s; }
    friend WeightVector operator*(WeightVector a, double s) { return a *= s; }
    friend WeightVector operator/(WeightVector a, double s) { return a *= 1.0 / s; }
    friend bool operator==(const WeightVector& a, const WeightVector& b) { return a.c_ == b.c_; }

    friend std::ostream& operator<<(std::ostream& os, const WeightVector& w) {
        os << '(';
        for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w.c_[i];
        return os << ')';
    }

private:
    void check_same(const WeightVector& o) const {
        if (o.size() != size()) throw argument_error("WeightVector: rank mismatch");
    }
    std::vector<double> c_;
};

/// Componentwise order: a <= b iff b - a has nonnegative entries.
inline bool leq(const WeightVector& a, const WeightVector& b) {
    if (a.size() != b.size()) throw argument_error("leq: rank mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] <= b[i])) return false;
    return true;
}

/// Strict order: a ≺ b iff a == b or every component of b - a is positive.
inline bool precedes(const WeightVector& a, const WeightVector& b) {
    if (a.size() != b.size()) throw argument_error("precedes: rank mismatch");
    if (a == b) return true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] < b[i])) return false;
    return true;
}

/// a ≻ b with a != b, i.e. every component strictly larger. This is the form
/// used by all convergence and boundedness conditions.
inline bool strictly_succ(const WeightVector& a, const WeightVector& b) {
    if (a.size() != b.size()) throw argument_error("strictly_succ: rank mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] > b[i])) return false;
    return true;
}

/// Componentwise maximum.
inline WeightVector sup(const WeightVector& a, const WeightVector& b) {
    if (a.size() != b.size()) throw argument_error("sup: rank mismatch");
    WeightVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
    return out;
}

inline WeightVector concat(const WeightVector& a, const WeightVector& b) {
    std::vector<double> v(a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    return WeightVector(std::move(v));
}

} // namespace conebergman
