#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "conebergman/errors.hpp"

namespace conebergman {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Gauss–Legendre rules

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(std::size_t n) {
    if (n == 1) return QuadratureRule{{0.0}, {2.0}};
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

} // namespace detail

/// n-point Gauss–Legendre rule on [-1, 1]; rules are cached per n.
inline const QuadratureRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw argument_error("gauss_legendre: n must be positive");
    static std::mutex mtx;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

/// Composite rule: `panels` equal panels on [a, b], `order` points each.
inline QuadratureRule composite_rule(double a, double b, std::size_t panels, std::size_t order) {
    if (panels == 0) throw argument_error("composite_rule: panels must be positive");
    const auto& g = gauss_legendre(order);
    QuadratureRule r;
    r.nodes.reserve(panels * order);
    r.weights.reserve(panels * order);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        for (std::size_t i = 0; i < order; ++i) {
            r.nodes.push_back(lo + 0.5 * h * (g.nodes[i] + 1.0));
            r.weights.push_back(0.5 * h * g.weights[i]);
        }
    }
    return r;
}

/// Fixed-order pairwise summation; the result does not depend on thread count.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.empty()) return T{};
    if (v.size() <= 16) {
        T s{};
        for (const T& x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

// ---------------------------------------------------------------------------
// Randomness. std distributions are implementation defined, so draws are
// taken directly from the 64-bit engine.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Parallel loops over independent output slots. Each index writes only its
// own slot, so results are identical for any thread count.

inline unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CONE_BERGMAN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) hw = std::min(hw, static_cast<unsigned>(v));
    }
    return hw;
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(thread_budget(), n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Relative difference |a - b| / max(|a|, |b|, tiny).
inline double rel_diff(double a, double b) {
    const double den = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / den;
}

} // namespace conebergman
