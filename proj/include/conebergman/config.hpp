#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "conebergman/boundary.hpp"
#include "conebergman/cone.hpp"
#include "conebergman/domain.hpp"
#include "conebergman/errors.hpp"
#include "conebergman/weight.hpp"

namespace conebergman::config {

using json = nlohmann::json;

/// A JSON value together with its dotted key path. Every accessor throws
/// config_error naming the path when the value is missing or malformed.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }
    const json& raw() const noexcept { return *j_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw config_error("config key '" + (path_.empty() ? std::string("<root>") : path_) + "': " + what);
    }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const {
        if (!j_->is_object()) fail("expected an object");
        if (!j_->contains(key)) Node(*j_, child_path(key)).fail("missing required key");
        return Node((*j_)[key], child_path(key));
    }

    Node at(std::size_t i) const {
        if (!j_->is_array()) fail("expected an array");
        if (i >= j_->size()) fail("index out of range");
        return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    }

    std::size_t size() const {
        if (!j_->is_array()) fail("expected an array");
        return j_->size();
    }

    std::vector<Node> items() const {
        std::vector<Node> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
        return out;
    }

    /// Rejects keys outside the allowed set.
    void allow(std::initializer_list<const char*> keys) const {
        if (!j_->is_object()) fail("expected an object");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_->items())
            if (!ok.count(k)) Node(v, child_path(k)).fail("unknown key");
    }

    /// Numbers, or the strings "inf" / "infinity".
    double number() const {
        if (j_->is_number()) return j_->get<double>();
        if (j_->is_string()) {
            const auto s = j_->get<std::string>();
            if (s == "inf" || s == "infinity") return INFINITY;
        }
        fail("expected a number");
    }

    double positive() const {
        const double v = number();
        if (!(v > 0.0)) fail("must be positive");
        return v;
    }

    std::size_t count() const {
        if (!j_->is_number_integer() && !j_->is_number_unsigned()) fail("expected a nonnegative integer");
        const auto v = j_->get<long long>();
        if (v < 0) fail("expected a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    long integer() const {
        if (!j_->is_number_integer() && !j_->is_number_unsigned()) fail("expected an integer");
        return static_cast<long>(j_->get<long long>());
    }

    std::uint64_t seed() const {
        if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<long long>() >= 0))
            fail("expected a nonnegative integer seed");
        return j_->get<std::uint64_t>();
    }

    std::string string() const {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }

    bool boolean() const {
        if (!j_->is_boolean()) fail("expected true or false");
        return j_->get<bool>();
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& n : items()) out.push_back(n.number());
        return out;
    }

    WeightVector weight(std::size_t rank) const {
        const auto v = numbers();
        if (v.size() != rank) fail("expected a weight vector of length " + std::to_string(rank));
        return WeightVector(v);
    }

    cplx complex() const {
        const auto v = numbers();
        if (v.size() != 2) fail("expected [re, im]");
        return {v[0], v[1]};
    }

    double number_or(const std::string& key, double dflt) const { return has(key) ? at(key).number() : dflt; }
    std::size_t count_or(const std::string& key, std::size_t dflt) const { return has(key) ? at(key).count() : dflt; }

private:
    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* j_;
    std::string path_;
};

inline json load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw config_error("cannot open config file " + file.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw config_error("config file " + file.string() + " is not valid JSON: " + e.what());
    }
}

/// {"kind":"lorentz","dim":3} | {"kind":"halfline"} | {"kind":"product","factors":[...]}
inline ConeDescriptor cone(const Node& n) {
    const auto kind = n.at("kind").string();
    if (kind == "halfline") {
        n.allow({"kind"});
        return ConeDescriptor::half_line();
    }
    if (kind == "lorentz") {
        n.allow({"kind", "dim"});
        const auto dim = n.at("dim").count();
        if (dim < 3) n.at("dim").fail("Lorentz cones need dim ≥ 3");
        return ConeDescriptor::lorentz(dim);
    }
    if (kind == "product") {
        n.allow({"kind", "factors"});
        std::vector<ConeDescriptor> f;
        for (const auto& item : n.at("factors").items()) f.push_back(cone(item));
        if (f.empty()) n.at("factors").fail("needs at least one factor");
        return ConeDescriptor::product(f);
    }
    n.at("kind").fail("unknown cone kind '" + kind + "'");
}

inline HorizontalRule horizontal_rule(const Node& n) {
    const auto r = n.string();
    if (r == "tangent") return HorizontalRule::Tangent;
    if (r == "boxes") return HorizontalRule::Boxes;
    if (r == "window") return HorizontalRule::Window;
    n.fail("unknown horizontal rule '" + r + "'");
}

/// A grid over a half-line base: log-spaced layers in [y_min, y_max] and a
/// horizontal rule. Keys mirror GridSpec.
inline GridFunction halfline_grid(const Node& n, const SiegelDomain& dom) {
    n.allow({"y_min", "y_max", "panels", "order", "rule", "x_extent", "zeta_extent", "resolution", "box_R",
             "scale_offset", "tangent_panels", "zeta_offset"});
    if (dom.cone().kind() != ConeKind::HalfLine) n.fail("grids are configured over half-line bases only");
    GridSpec spec;
    if (n.has("rule")) spec.rule = horizontal_rule(n.at("rule"));
    spec.x_extent = n.number_or("x_extent", spec.x_extent);
    spec.zeta_extent = n.number_or("zeta_extent", spec.zeta_extent);
    spec.resolution = n.count_or("resolution", spec.resolution);
    spec.box_R = n.number_or("box_R", spec.box_R);
    spec.scale_offset = n.number_or("scale_offset", spec.scale_offset);
    spec.tangent_panels = n.count_or("tangent_panels", spec.tangent_panels);
    spec.zeta_offset = n.number_or("zeta_offset", spec.zeta_offset);
    const double y0 = n.at("y_min").positive(), y1 = n.at("y_max").positive();
    if (!(y1 > y0)) n.at("y_max").fail("must exceed y_min");
    const auto [layers, meas] = half_line_layers(y0, y1, n.at("panels").count(), n.at("order").count());
    return make_grid(dom, layers, meas, spec);
}

/// Test functions of z on a rank-one domain.
///   {"type":"rational","factors":[{"shift":[a,b],"power":k}, ...]}  Π (z + a + ib)^{−k}
///   {"type":"conj-gaussian","shift":[a,b]}                          conj(z + a + ib) e^{−|z|²}
struct TestFunction {
    enum class Type { Rational, ConjGaussian } type = Type::Rational;
    std::vector<std::pair<cplx, double>> factors;
    cplx shift{0.0, 1.0};

    cplx operator()(cplx z) const {
        if (type == Type::ConjGaussian) return std::conj(z + shift) * std::exp(-std::norm(z));
        cplx v = 1.0;
        for (const auto& [a, k] : factors) v *= std::pow(z + a, -k);
        return v;
    }
    cplx operator()(const DomainPoint& w) const { return (*this)(w.z[0]); }
};

inline TestFunction test_function(const Node& n) {
    TestFunction f;
    const auto type = n.at("type").string();
    if (type == "rational") {
        n.allow({"type", "factors"});
        for (const auto& fac : n.at("factors").items()) {
            fac.allow({"shift", "power"});
            const cplx a = fac.at("shift").complex();
            if (!(a.imag() > 0.0)) fac.at("shift").fail("the pole −shift must lie in the lower half-plane");
            f.factors.emplace_back(a, fac.at("power").positive());
        }
        return f;
    }
    if (type == "conj-gaussian") {
        n.allow({"type", "shift"});
        f.type = TestFunction::Type::ConjGaussian;
        f.shift = n.at("shift").complex();
        return f;
    }
    n.at("type").fail("unknown function type '" + type + "'");
}

/// {"centre":c,"width":w,"tilt":[a,b],"support":[lo,hi],"panels":P,"order":Q}:
/// e^{−((λ−c)/w)²}(1 + (a+ib)λ) on [lo, hi].
inline SpectralDensity gaussian_density(const Node& n) {
    n.allow({"centre", "width", "tilt", "support", "panels", "order"});
    const double c = n.at("centre").number(), w = n.at("width").positive();
    const cplx tilt = n.has("tilt") ? n.at("tilt").complex() : cplx(0.0);
    double lo = 1.0, hi = 4.0;
    if (n.has("support")) {
        const auto s = n.at("support").numbers();
        if (s.size() != 2 || !(s[0] > 0.0) || !(s[1] > s[0])) n.at("support").fail("expected [lo, hi] with 0 < lo < hi");
        lo = s[0];
        hi = s[1];
    }
    return density_on_interval(lo, hi, n.count_or("panels", 12), n.count_or("order", 16), [&](const Point& l) {
        const double t = (l[0] - c) / w;
        return std::exp(-t * t) * (1.0 + tilt * l[0]);
    });
}

} // namespace conebergman::config
