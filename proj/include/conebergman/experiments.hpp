#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/atomic.hpp"
#include "conebergman/boundary.hpp"
#include "conebergman/config.hpp"
#include "conebergman/kernel.hpp"
#include "conebergman/projector.hpp"

namespace conebergman::experiments {

using config::json;
using config::Node;

enum class Kind {
    ProjectorThreshold,
    PositiveEquivalence,
    AtomicReconstruction,
    BoundaryLimit,
    GammaIdentity,
    Section7Properties,
    Transference,
    DualityConstancy,
    ConeInfo,
};

inline const std::vector<std::pair<Kind, std::string>>& kind_names() {
    static const std::vector<std::pair<Kind, std::string>> names{
        {Kind::ProjectorThreshold, "projector-threshold"},   {Kind::PositiveEquivalence, "positive-equivalence"},
        {Kind::AtomicReconstruction, "atomic-reconstruction"}, {Kind::BoundaryLimit, "boundary-limit"},
        {Kind::GammaIdentity, "gamma-identity"},             {Kind::Section7Properties, "section7-properties"},
        {Kind::Transference, "transference"},                {Kind::DualityConstancy, "duality-constancy"},
        {Kind::ConeInfo, "cone-info"}};
    return names;
}

inline std::string to_string(Kind k) {
    for (const auto& [kk, name] : kind_names())
        if (kk == k) return name;
    return "unknown";
}

inline Kind kind_from(const Node& n) {
    const auto s = n.string();
    for (const auto& [k, name] : kind_names())
        if (name == s) return k;
    n.fail("unknown experiment kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Reports

/// One assertion of an experiment.
struct Row {
    std::string anchor;      // section of the theory the row exercises
    std::string id;
    std::string parameters;  // key=value pairs separated by ';'
    std::string metric;
    double value = NAN;
    double tolerance = NAN;  // NaN when the row has no numeric threshold
    std::string verdict;
    std::string details;
    bool pass = false;
    double runtime_s = 0.0;  // summary.json only, so the CSV stays reproducible
};

struct Report {
    Kind kind = Kind::ConeInfo;
    std::optional<std::uint64_t> seed;
    double tolerance_scale = 1.0;
    double runtime_s = 0.0;
    std::vector<Row> rows;

    bool all_pass() const {
        return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
    }
    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.pass; }));
    }
};

/// Ten significant digits, the rendering used in every report.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
    return s;
}

inline std::string fmt(const WeightVector& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + fmt(w[i]);
    return s + ")";
}

inline std::string fmt(cplx z) { return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i"; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void write_csv(const Report& r, std::ostream& os) {
    os << "anchor,case,parameters,metric,value,tolerance,verdict,details,pass\n";
    for (const auto& row : r.rows) {
        os << csv_field(row.anchor) << ',' << csv_field(row.id) << ',' << csv_field(row.parameters) << ','
           << csv_field(row.metric) << ',' << fmt(row.value) << ',' << (std::isnan(row.tolerance) ? "" : fmt(row.tolerance))
           << ',' << csv_field(row.verdict) << ',' << csv_field(row.details) << ',' << (row.pass ? "pass" : "FAIL") << '\n';
    }
}

inline json summary(const Report& r) {
    auto number = [](double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); };
    json j;
    j["kind"] = to_string(r.kind);
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["tolerance_scale"] = r.tolerance_scale;
    j["all_pass"] = r.all_pass();
    j["cases"] = r.rows.size();
    j["failures"] = r.failures();
    j["runtime_s"] = r.runtime_s;
    j["rows"] = json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"anchor", row.anchor},
                             {"case", row.id},
                             {"metric", row.metric},
                             {"value", number(row.value)},
                             {"tolerance", std::isnan(row.tolerance) ? json(nullptr) : number(row.tolerance)},
                             {"verdict", row.verdict},
                             {"pass", row.pass},
                             {"runtime_s", row.runtime_s}});
    return j;
}

/// <dir>/<kind>.csv and <dir>/summary.json.
inline void write_outputs(const Report& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / (to_string(r.kind) + ".csv"), std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (dir / (to_string(r.kind) + ".csv")).string());
        write_csv(r, os);
    }
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    js << summary(r).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Running

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the config seed
    double tolerance_scale = 1.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Context {
    Node root;
    RunOptions opt;
    Report* report;

    /// Numeric error bounds scale with the tolerance scale.
    double bound(double t) const { return t * opt.tolerance_scale; }
    /// Thresholds of the form "ratio < t" loosen away from 1.
    double upper_ratio(double t) const { return 1.0 + (t - 1.0) * opt.tolerance_scale; }
    /// Thresholds of the form "ratio ≥ t" loosen towards 1.
    double lower_ratio(double t) const { return 1.0 + (t - 1.0) / opt.tolerance_scale; }

    std::uint64_t seed(bool required) const {
        if (opt.seed) return *opt.seed;
        if (root.has("seed")) return root.at("seed").seed();
        if (required) root.at("seed");  // throws naming the key
        return 0;
    }

    void add(Row row, Clock::time_point t0) {
        row.runtime_s = seconds_since(t0);
        report->rows.push_back(std::move(row));
    }
};

inline WeightVector weight_or_tilde(const Node& n, const SiegelDomain& dom, const char* key = "s_prime") {
    const std::size_t r = dom.cone().rank();
    if (n.has(key) && n.has("s_tilde")) n.at("s_tilde").fail(std::string("give either ") + key + " or s_tilde");
    if (n.has("s_tilde")) return s_prime_from_tilde(dom, n.at("s_tilde").weight(r));
    return n.at(key).weight(r);
}

inline TruncationPlan truncation_plan(const Context& ctx, const Node& n) {
    TruncationPlan plan;
    n.allow({"half_widths", "delta", "panel_width", "order"});
    if (n.has("half_widths")) {
        plan.half_widths = n.at("half_widths").numbers();
        if (plan.half_widths.size() < 3) n.at("half_widths").fail("needs at least 3 truncation levels");
    }
    plan.delta = n.has("delta") ? n.at("delta").positive() : plan.delta;
    plan.panel_width = n.has("panel_width") ? n.at("panel_width").positive() : plan.panel_width;
    plan.order = n.count_or("order", plan.order);
    (void)ctx;
    return plan;
}

inline VerdictRule verdict_rule(const Context& ctx) {
    VerdictRule rule;
    if (ctx.root.has("verdict_rule")) {
        const auto n = ctx.root.at("verdict_rule");
        n.allow({"bounded_ratio", "unbounded_step"});
        rule.bounded_ratio = n.number_or("bounded_ratio", rule.bounded_ratio);
        rule.unbounded_step = n.number_or("unbounded_step", rule.unbounded_step);
    }
    rule.bounded_ratio = ctx.upper_ratio(rule.bounded_ratio);
    rule.unbounded_step = ctx.lower_ratio(rule.unbounded_step);
    return rule;
}

inline std::string predicate_text(const BoundednessPredicate& p) {
    if (!p.necessary_hold) return "fails";
    if (p.sufficient_known) return *p.sufficient_known ? "holds" : "fails";
    return "necessary-only";
}

inline std::optional<Verdict> predicted_verdict(const BoundednessPredicate& p) {
    if (!p.necessary_hold) return Verdict::Unbounded;
    if (p.sufficient_known && *p.sufficient_known) return Verdict::Bounded;
    return std::nullopt;
}

inline std::string params_text(const ProjectorParams& par) {
    return "cone=" + par.domain.cone().describe() + ";p=" + fmt(par.p) + ";q=" + fmt(par.q) + ";s=" + fmt(par.s) +
           ";s'=" + fmt(par.s_prime);
}

inline std::string report_details(const OperatorReport& r) {
    std::string conv;
    for (bool c : r.converged) conv += c ? '1' : '0';
    return "levels=" + fmt(r.truncation_levels) + ";norm_estimates=" + fmt(r.norm_estimates) + ";converged=" + conv;
}

inline bool conflicting(Verdict a, Verdict b) {
    return (a == Verdict::Bounded && b == Verdict::Unbounded) || (a == Verdict::Unbounded && b == Verdict::Bounded);
}

// -- projector-threshold ----------------------------------------------------

inline void reproducing_rows(Context& ctx, const Node& n) {
    n.allow({"s", "s_prime", "s_tilde", "functions", "input_grid", "output_grid", "tolerance", "idempotence"});
    ProjectorParams par;
    par.s = n.has("s") ? n.at("s").weight(1) : par.s;
    par.s_prime = weight_or_tilde(n, par.domain);
    const auto in = config::halfline_grid(n.at("input_grid"), par.domain);
    const auto out = config::halfline_grid(n.at("output_grid"), par.domain);
    const double tol = ctx.bound(n.number_or("tolerance", 1e-3));
    const std::string params = "s=" + fmt(par.s) + ";s'=" + fmt(par.s_prime);
    const auto fns = n.at("functions").items();
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const auto t0 = Clock::now();
        const auto f = config::test_function(fns[i]);
        const auto pf = apply_projector(par, in.sampled(f), out);
        const double err = relative_error(pf, out.sampled(f), 2.0, 2.0, par.s);
        ctx.add({"§2.4", "reproduce f" + std::to_string(i + 1), params, "‖P f − f‖/‖f‖", err, tol, "", "", err < tol}, t0);
    }
    if (n.has("idempotence")) {
        const auto t0 = Clock::now();
        const auto m = n.at("idempotence");
        m.allow({"input_grid", "function", "tolerance"});
        const auto compact = config::halfline_grid(m.at("input_grid"), par.domain);
        const auto f = compact.sampled(config::test_function(m.at("function")));
        const auto pf = apply_projector(par, f, out);
        const auto ppf = apply_projector(par, apply_projector(par, f, in), out);
        const double err = relative_error(ppf, pf, 2.0, 2.0, par.s);
        const double itol = ctx.bound(m.number_or("tolerance", 2e-3));
        ctx.add({"§2.4", "idempotence", params, "‖P P f − P f‖/‖P f‖", err, itol, "", "", err < itol}, t0);
    }
}

inline void run_projector_threshold(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "cone", "truncations", "verdict_rule", "cases", "reproducing"});
    const auto cone = root.has("cone") ? config::cone(root.at("cone")) : ConeDescriptor::half_line();
    const auto dom = SiegelDomain::tube(cone);
    auto plan = root.has("truncations") ? truncation_plan(ctx, root.at("truncations")) : TruncationPlan{};
    plan.rule = verdict_rule(ctx);
    if (root.has("cases")) {
        const auto cases = root.at("cases").items();
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            c.allow({"s", "s_prime", "s_tilde", "p", "q", "c", "expect"});
            ProjectorParams par;
            par.domain = dom;
            par.s = c.at("s").weight(cone.rank());
            par.s_prime = weight_or_tilde(c, dom);
            par.p = c.number_or("p", 2.0);
            par.q = c.number_or("q", 2.0);
            if (c.has("c")) par.c = c.at("c").positive();
            else if (!(cone.kind() == ConeKind::HalfLine)) par.c = 1.0;
            const auto pred = positive_boundedness_predicate(par);
            std::optional<Verdict> expected = predicted_verdict(pred);
            if (c.has("expect")) {
                const auto e = c.at("expect").string();
                if (e == "Bounded") expected = Verdict::Bounded;
                else if (e == "Unbounded") expected = Verdict::Unbounded;
                else c.at("expect").fail("expected Bounded or Unbounded");
            }
            const std::string id = "case " + std::to_string(i + 1);
            for (int which = 0; which < 2; ++which) {
                const auto t0 = Clock::now();
                const auto rep = which == 0 ? estimate_cone_operator_norm(par, plan) : estimate_positive_projector_norm(par, plan);
                const bool pass = expected ? rep.verdict == *expected : !(rep.verdict == Verdict::Bounded && !pred.necessary_hold);
                double tol = NAN;
                if (expected) tol = *expected == Verdict::Bounded ? plan.rule.bounded_ratio : plan.rule.unbounded_step;
                ctx.add({"§1", id + (which == 0 ? " T" : " P+"), params_text(par),
                         which == 0 ? "growth_ratio(T)" : "growth_ratio(P+)", rep.growth_ratio, tol, to_string(rep.verdict),
                         report_details(rep) + ";expected=" + (expected ? to_string(*expected) : "any") +
                             ";predicate=" + predicate_text(pred),
                         pass},
                        t0);
            }
        }
    }
    if (root.has("reproducing")) reproducing_rows(ctx, root.at("reproducing"));
    if (!root.has("cases") && !root.has("reproducing")) root.at("cases");
}

// -- positive-equivalence ---------------------------------------------------

inline void run_positive_equivalence(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "verdict_rule", "groups"});
    const auto rule = verdict_rule(ctx);
    std::size_t case_no = 0;
    for (const auto& g : root.at("groups").items()) {
        g.allow({"cone", "s", "c", "truncations", "q", "s_prime", "p"});
        const auto cone = config::cone(g.at("cone"));
        const auto dom = SiegelDomain::tube(cone);
        auto plan = g.has("truncations") ? truncation_plan(ctx, g.at("truncations")) : TruncationPlan{};
        plan.rule = rule;
        const auto ps = g.has("p") ? g.at("p").numbers() : std::vector<double>{1.0, 2.0};
        for (double q : g.at("q").numbers()) {
            for (const auto& spn : g.at("s_prime").items()) {
                ++case_no;
                ProjectorParams par;
                par.domain = dom;
                par.q = q;
                par.s = g.at("s").weight(cone.rank());
                par.s_prime = spn.weight(cone.rank());
                par.c = g.has("c") ? g.at("c").positive() : (cone.kind() == ConeKind::HalfLine ? 0.0 : 1.0);
                auto t0 = Clock::now();
                const auto T = estimate_cone_operator_norm(par, plan);
                const double t_time = seconds_since(t0);
                const auto pred = positive_boundedness_predicate(par);
                for (double p : ps) {
                    if (!(p >= 1.0)) g.at("p").fail("p must be at least 1");
                    par.p = p;
                    t0 = Clock::now();
                    const auto P = estimate_positive_projector_norm(par, plan);
                    const bool conflict = conflicting(T.verdict, P.verdict);
                    Row row{"§3", "case " + std::to_string(case_no) + " p=" + fmt(p), params_text(par), "growth_ratio(P+)",
                            P.growth_ratio, NAN, "T=" + to_string(T.verdict) + " P+=" + to_string(P.verdict),
                            "T_norms=" + fmt(T.norm_estimates) + ";P_norms=" + fmt(P.norm_estimates) +
                                ";T_growth=" + fmt(T.growth_ratio) + ";predicate=" + predicate_text(pred) +
                                (conflict ? ";CONFLICT" : ""),
                            !conflict};
                    ctx.add(row, t0);
                    ctx.report->rows.back().runtime_s += t_time / static_cast<double>(ps.size());
                }
            }
        }
    }
}

// -- gamma-identity ---------------------------------------------------------

inline void run_gamma_identity(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "halfline_values", "tolerance", "lorentz"});
    const std::uint64_t seed = ctx.seed(root.has("lorentz"));
    const auto h = ConeDescriptor::half_line();
    if (root.has("halfline_values")) {
        const double tol = ctx.bound(root.number_or("tolerance", 1e-8));
        for (double s : root.at("halfline_values").numbers()) {
            const auto t0 = Clock::now();
            if (!(s > 0.0)) root.at("halfline_values").fail("values must be positive");
            const double g = gamma_cone(h, WeightVector{s});
            const double err = rel_diff(g, std::tgamma(s));
            ctx.add({"§2.1", "halfline s=" + fmt(s), "cone=halfline;s=" + fmt(s), "relative error against Γ(s)", err, tol,
                     "", "Γ_Ω=" + fmt(g), err < tol},
                    t0);
        }
    }
    if (root.has("lorentz")) {
        const auto n = root.at("lorentz");
        n.allow({"dim", "s", "samples", "tolerance"});
        const auto cone = ConeDescriptor::lorentz(n.at("dim").count());
        const auto s = n.at("s").weight(cone.rank());
        const double tol = ctx.bound(n.number_or("tolerance", 1e-3));
        auto t0 = Clock::now();
        const double g = gamma_cone(cone, s);
        Rng rng(seed);
        const std::size_t count = n.count_or("samples", 10);
        for (std::size_t i = 0; i < count; ++i) {
            const Point lam = conebergman::detail::random_cone_point(cone, rng, 1.5, 1.0);
            const double v = laplace_transform_check(cone, s, lam);
            const double dev = rel_diff(v, g);
            std::string ls;
            for (std::size_t k = 0; k < lam.size(); ++k) ls += (k ? " " : "") + fmt(lam[k]);
            ctx.add({"§2.1", cone.describe() + " λ" + std::to_string(i + 1), "cone=" + cone.describe() + ";s=" + fmt(s) + ";λ=(" + ls + ")",
                     "relative deviation of L[Δ^s](λ)Δ'^s(λ) from Γ_Ω(s)", dev, tol, "", "value=" + fmt(v) + ";Γ_Ω=" + fmt(g),
                     dev < tol},
                    t0);
            t0 = Clock::now();
        }
    }
}

// -- section7-properties ----------------------------------------------------

inline void run_section7(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "cones", "samples", "oscillation_weights", "ratio_s_range", "polynomials"});
    const std::uint64_t seed = ctx.seed(true);
    const std::size_t samples = root.count_or("samples", 10000);
    const double s_range = root.number_or("ratio_s_range", 3.0);
    std::uint64_t sub = 0;
    for (const auto& cn : root.at("cones").items()) {
        const auto cone = config::cone(cn);
        std::vector<WeightVector> weights;
        if (root.has("oscillation_weights")) {
            for (const auto& w : root.at("oscillation_weights").items())
                if (w.size() == cone.rank()) weights.push_back(w.weight(cone.rank()));
        } else {
            weights.push_back(WeightVector(std::vector<double>(cone.rank(), 1.0)));
        }
        for (const auto& s : weights) {
            const auto t0 = Clock::now();
            const auto r = oscillation_check(cone, s, samples, seed + sub++);
            ctx.add({"§7", "oscillation " + cone.describe() + " s=" + fmt(s),
                     "cone=" + cone.describe() + ";s=" + fmt(s) + ";samples=" + std::to_string(samples),
                     "spread of Im log Δ^s (bound |s|π)", r.spread, r.bound, "",
                     "min=" + fmt(r.min_imag) + ";max=" + fmt(r.max_imag), r.within_bound()},
                    t0);
        }
        const auto t0 = Clock::now();
        const auto r = ratio_sweep(cone, samples, seed + sub++, s_range);
        ctx.add({"§7", "ratio bounds " + cone.describe(),
                 "cone=" + cone.describe() + ";samples=" + std::to_string(samples) + ";s_range=" + fmt(s_range),
                 "violations of 2^{-|s|/2} ≤ |Δ^s(x±iy)|/Δ^s(x+y) ≤ 2^{|s|/2}", static_cast<double>(r.violations), 0.0, "",
                 "min_margin_log2=" + fmt(r.min_margin), r.violations == 0},
                t0);
    }
    if (root.has("polynomials")) {
        const auto n = root.at("polynomials");
        n.allow({"samples", "max_degree"});
        const auto t0 = Clock::now();
        const std::size_t ns = n.count_or("samples", 1000), deg = n.count_or("max_degree", 6);
        if (deg == 0) n.at("max_degree").fail("must be at least 1");
        const auto r = polynomial_sweep(ns, deg, seed + sub++);
        ctx.add({"§7", "polynomial ratio", "samples=" + std::to_string(ns) + ";max_degree=" + std::to_string(deg),
                 "violations of 2^{-k/2} ≤ |P(±ix)|/P(x) ≤ 1", static_cast<double>(r.violations), 0.0, "", "",
                 r.violations == 0},
                t0);
    }
}

// -- atomic-reconstruction --------------------------------------------------

inline AtomicParams atomic_params(const Node& n) {
    AtomicParams par;
    par.s = n.has("s") ? n.at("s").weight(1) : par.s;
    par.s_prime = weight_or_tilde(n, par.domain);
    par.p = n.number_or("p", 2.0);
    par.q = n.number_or("q", 2.0);
    return par;
}

inline std::string atomic_params_text(const AtomicParams& par) {
    return "p=" + fmt(par.p) + ";q=" + fmt(par.q) + ";s=" + fmt(par.s) + ";s'=" + fmt(par.s_prime);
}

inline void run_atomic(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "admissible", "inadmissible"});
    const std::uint64_t seed = ctx.seed(root.has("inadmissible"));
    if (root.has("admissible")) {
        const auto n = root.at("admissible");
        n.allow({"s", "s_prime", "s_tilde", "deltas", "y_range", "x_cover", "function", "output_grid", "final_tolerance"});
        const auto par = atomic_params(n);
        auto t0 = Clock::now();
        const bool pred = atomic_range_predicate(par);
        ctx.add({"§4", "admissible range", atomic_params_text(par), "range predicate", pred ? 1.0 : 0.0, NAN,
                 pred ? "admissible" : "inadmissible", "", pred},
                t0);
        const auto grid = config::halfline_grid(n.at("output_grid"), par.domain);
        const auto f = config::test_function(n.at("function"));
        std::vector<double> yr{0.01, 100.0};
        if (n.has("y_range")) {
            yr = n.at("y_range").numbers();
            if (yr.size() != 2 || !(yr[0] > 0.0) || !(yr[1] > yr[0])) n.at("y_range").fail("expected [y_min, y_max]");
        }
        const double cover = n.number_or("x_cover", 20.0);
        const auto deltas = n.at("deltas").numbers();
        const double final_tol = ctx.bound(n.number_or("final_tolerance", 1e-2));
        double prev = INFINITY;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            t0 = Clock::now();
            const double d = deltas[i];
            if (!(d > 0.0)) n.at("deltas").fail("δ must be positive");
            if (i > 0 && !(d < deltas[i - 1])) n.at("deltas").fail("δ must decrease");
            const long klo = static_cast<long>(std::floor(std::log(yr[0]) / (2 * d)));
            const long khi = static_cast<long>(std::ceil(std::log(yr[1]) / (2 * d)));
            const auto L = halfplane_window_lattice(d, klo, khi, cover);
            const double err = reconstruct(par, L, f, grid).relative_error;
            const bool last = i + 1 == deltas.size();
            const bool pass = err < prev && (!last || err < final_tol);
            ctx.add({"§4", "reconstruction δ=" + fmt(d), atomic_params_text(par) + ";δ=" + fmt(d) + ";atoms=" + std::to_string(L.size()),
                     "relative reconstruction error", err, last ? final_tol : NAN, "",
                     i > 0 ? "previous=" + fmt(prev) : std::string("first refinement"), pass},
                    t0);
            prev = err;
        }
    }
    if (root.has("inadmissible")) {
        const auto n = root.at("inadmissible");
        n.allow({"s", "s_prime", "s_tilde", "delta", "refinements", "chart_half_width", "zeta_extent", "min_growth",
                 "samples", "power_steps"});
        const auto par = atomic_params(n);
        auto t0 = Clock::now();
        const bool pred = atomic_range_predicate(par);
        ctx.add({"§4", "inadmissible range", atomic_params_text(par), "range predicate", pred ? 1.0 : 0.0, NAN,
                 pred ? "admissible" : "inadmissible", "", !pred},
                t0);
        const double delta = n.at("delta").positive();
        const double min_growth = ctx.lower_ratio(n.number_or("min_growth", 1.5));
        SynthesisProxyOptions popt;
        popt.seed = seed;
        popt.samples = n.count_or("samples", popt.samples);
        popt.power_steps = n.count_or("power_steps", popt.power_steps);
        double prev = NAN;
        for (double Kd : n.at("refinements").numbers()) {
            t0 = Clock::now();
            const long K = static_cast<long>(Kd);
            if (K < 1 || static_cast<double>(K) != Kd) n.at("refinements").fail("refinements must be positive integers");
            DomainLatticeExtents ext{-K, K, n.number_or("chart_half_width", 1.0), K, static_cast<long>(n.count_or("zeta_extent", 3))};
            const auto L = domain_lattice(par.domain, delta, ext);
            const double v = synthesis_norm_proxy(par, L, popt);
            if (!std::isnan(prev)) {
                const double g = v / prev;
                ctx.add({"§4", "synthesis growth K=" + std::to_string(K),
                         atomic_params_text(par) + ";δ=" + fmt(delta) + ";K=" + std::to_string(K) + ";atoms=" + std::to_string(L.size()),
                         "synthesis norm proxy growth per refinement", g, min_growth, "", "proxy=" + fmt(v) + ";previous=" + fmt(prev),
                         g >= min_growth},
                        t0);
            }
            prev = v;
        }
    }
    if (!root.has("admissible") && !root.has("inadmissible")) root.at("admissible");
}

// -- boundary-limit ---------------------------------------------------------

inline void run_boundary(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "densities", "y", "partition", "besov", "window_check"});
    const auto dom = SiegelDomain::upper_half_plane();
    if (root.has("densities")) {
        const auto pn = root.at("partition");
        pn.allow({"delta", "overlap", "y_range"});
        std::vector<double> yr{0.05, 50.0};
        if (pn.has("y_range")) {
            yr = pn.at("y_range").numbers();
            if (yr.size() != 2 || !(yr[0] > 0.0) || !(yr[1] > yr[0])) pn.at("y_range").fail("expected [λ_min, λ_max]");
        }
        const double delta = pn.has("delta") ? pn.at("delta").positive() : std::log(2.0) / 4.0;
        const double overlap = pn.number_or("overlap", 2.0);
        if (!(overlap >= 2.0)) pn.at("overlap").fail("must be at least 2");
        const auto P = make_partition(dom.cone(), delta, ChartBox::half_line(yr[0], yr[1]), overlap);
        const auto bn = root.at("besov");
        bn.allow({"p", "q", "s"});
        const double p = bn.number_or("p", 2.0), q = bn.number_or("q", 2.0);
        const WeightVector s = bn.at("s").weight(1);
        const auto ys = root.at("y").numbers();
        if (ys.size() < 2) root.at("y").fail("needs at least two heights");
        for (std::size_t i = 1; i < ys.size(); ++i)
            if (!(ys[i] < ys[i - 1]) || !(ys[i] > 0.0)) root.at("y").fail("heights must be positive and decreasing");
        const auto dens = root.at("densities").items();
        for (std::size_t i = 0; i < dens.size(); ++i) {
            const auto t0 = Clock::now();
            const auto u = config::gaussian_density(dens[i]);
            const auto d = boundary_limit_check(u, dom, P, p, q, s, ys);
            double worst = 0.0;
            for (std::size_t k = 1; k < d.size(); ++k) worst = std::max(worst, d[k] / d[k - 1]);
            ctx.add({"§2.6", "density " + std::to_string(i + 1),
                     "p=" + fmt(p) + ";q=" + fmt(q) + ";s=" + fmt(s) + ";δ=" + fmt(delta) + ";y=" + fmt(ys),
                     "largest ratio of consecutive Besov distances", worst, 1.0, "", "distances=" + fmt(d), worst < 1.0},
                    t0);
        }
    }
    if (root.has("window_check")) {
        const auto n = root.at("window_check");
        n.allow({"support", "points", "tolerance"});
        const auto t0 = Clock::now();
        const auto sup = n.at("support").numbers();
        if (sup.size() != 2 || !(sup[0] > 0.0) || !(sup[1] > sup[0])) n.at("support").fail("expected [a, b] with 0 < a < b");
        const double a = sup[0], b = sup[1];
        const auto u = density_on_interval(a, b, std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(4 * (b - a)))), 16,
                                           [](const Point&) { return cplx(1.0); });
        double worst = 0.0;
        for (const auto& pt : n.at("points").items()) {
            const cplx z = pt.complex();
            if (!(z.imag() > 0.0)) pt.fail("points must lie in the upper half-plane");
            const cplx expect = (std::exp(cplx(0, b) * z) - std::exp(cplx(0, a) * z)) / (cplx(0, 1) * z);
            worst = std::max(worst, std::abs(extend_at(u, dom, DomainPoint{{}, {z}}) - expect));
        }
        const double tol = ctx.bound(n.number_or("tolerance", 1e-10));
        ctx.add({"§2.6", "window transform", "support=" + fmt(sup), "max |Eu − closed form|", worst, tol, "", "", worst < tol}, t0);
    }
    if (!root.has("densities") && !root.has("window_check")) root.at("densities");
}

// -- transference -----------------------------------------------------------

inline void run_transference(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "n", "s", "grid", "functions", "spread_tolerance", "restriction"});
    const std::uint64_t seed = ctx.seed(root.has("restriction"));
    const std::size_t n = root.count_or("n", 1);
    if (n == 0) root.at("n").fail("the Siegel half-space needs n ≥ 1");
    const double s = root.at("s").positive();
    const auto dom = SiegelDomain::siegel_half_space(n);
    const auto dg = config::halfline_grid(root.at("grid"), dom);
    const auto tg = config::halfline_grid(root.at("grid"), SiegelDomain::upper_half_plane());
    const std::string params = "n=" + std::to_string(n) + ";p=2;s=" + fmt(s);
    auto t0 = Clock::now();
    std::vector<std::function<cplx(const CPoint&)>> family;
    for (const auto& fn : root.at("functions").items()) {
        const auto f = config::test_function(fn);
        family.push_back([f](const CPoint& z) { return f(z[0]); });
    }
    const auto r = transference_norm_check(dg, tg, family, 2.0, 2.0, WeightVector{s});
    const double Cp = transference_constant_halfline(n, s);
    const double tol = ctx.bound(root.number_or("spread_tolerance", 1e-2));
    std::vector<double> ratios;
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
        ratios.push_back(r.ratios[i]);
        if (r.skipped[i]) continue;
        const double dev = std::abs(r.ratios[i] / Cp - 1.0);
        ctx.add({"§6", "ratio f" + std::to_string(i + 1), params, "|‖ι f‖/(C'‖f‖) − 1|", dev, tol, "",
                 "ratio=" + fmt(r.ratios[i]) + ";C'=" + fmt(Cp), dev < tol},
                t0);
        t0 = Clock::now();
    }
    ctx.add({"§6", "ratio spread", params, "(max − min)/mean of ‖ι f‖/‖f‖", r.spread, tol, "", "ratios=" + fmt(ratios),
             r.spread < tol},
            t0);
    if (root.has("restriction")) {
        const auto m = root.at("restriction");
        m.allow({"samples", "a", "power", "slack"});
        if (n != 1) m.fail("the restriction check is implemented for n = 1");
        t0 = Clock::now();
        const cplx a = m.has("a") ? m.at("a").complex() : cplx(0.4, -0.3);
        if (!(std::abs(a) < 1.0)) m.at("a").fail("need |a| < 1");
        const double power = m.number_or("power", 7.0);
        const double slack = ctx.upper_ratio(m.number_or("slack", 1.01));
        const double C = std::sqrt(2.0 * s / std::numbers::pi);
        auto f = [&](const CPoint& zeta, cplx z) { return std::pow((z + cplx(0, 1)) / cplx(0, 2) - zeta[0] * std::conj(a), -power); };
        const double nd = mixed_norm(dg.sampled([&](const DomainPoint& w) { return f(w.zeta, w.z[0]); }), 2.0, 2.0, WeightVector{s});
        Rng rng(seed);
        const std::size_t count = m.count_or("samples", 10);
        for (std::size_t i = 0; i < count; ++i) {
            const CPoint z0{cplx(rng.normal(), rng.normal())};
            const double ph = dom.phi(z0)[0];
            const double nr = mixed_norm(tg.sampled([&](const DomainPoint& w) { return f(z0, w.z[0] + cplx(0, ph)); }), 2.0, 2.0,
                                         WeightVector{s + 0.5});
            const double ratio = nr / (C * nd);
            ctx.add({"§6", "restriction ζ" + std::to_string(i + 1), params + ";ζ0=" + fmt(z0[0]),
                     "‖f(ζ0,·+iΦ(ζ0))‖/(C‖f‖)", ratio, slack, "", "C=" + fmt(C), ratio <= slack},
                    t0);
            t0 = Clock::now();
        }
    }
}

// -- duality-constancy ------------------------------------------------------

inline void run_duality(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "s2", "densities", "grid", "tolerance"});
    const double s2 = root.at("s2").positive();
    const auto grid = config::halfline_grid(root.at("grid"), SiegelDomain::upper_half_plane());
    const double tol = ctx.bound(root.number_or("tolerance", 1e-3));
    const auto dn = root.at("densities").items();
    if (dn.size() < 2) root.at("densities").fail("needs at least two densities");
    std::vector<SpectralDensity> us;
    for (const auto& d : dn) us.push_back(config::gaussian_density(d));
    const double c0 = duality_constant_halfplane(s2);
    std::vector<double> cs;
    const std::string params = "s''=" + fmt(s2);
    for (std::size_t i = 0; i < us.size(); ++i) {
        const auto t0 = Clock::now();
        const auto& u = us[i];
        const auto& up = us[(i + 1) % us.size()];
        const cplx lhs = duality_pairing(extend(u, grid), extend(riesz_multiplier(up, WeightVector{s2}), grid), WeightVector{s2});
        const cplx c = lhs / density_pairing(u, up, WeightVector{0.0});
        cs.push_back(c.real());
        const double dev = std::max(std::abs(c.real() / c0 - 1.0), std::abs(c.imag() / c.real()));
        ctx.add({"§2.6", "pair " + std::to_string(i + 1) + "-" + std::to_string((i + 1) % us.size() + 1), params,
                 "relative deviation of the pairing constant", dev, tol, "", "c=" + fmt(c) + ";closed_form=" + fmt(c0), dev < tol},
                t0);
    }
    const auto t0 = Clock::now();
    const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
    double mean = 0.0;
    for (double c : cs) mean += c / static_cast<double>(cs.size());
    const double spread = (*hi - *lo) / std::abs(mean);
    ctx.add({"§2.6", "constant spread", params, "(max − min)/|mean| of the pairing constant", spread, tol, "",
             "constants=" + fmt(cs), spread < tol},
            t0);
}

// -- cone-info --------------------------------------------------------------

inline void run_cone_info(Context& ctx) {
    const auto& root = ctx.root;
    root.allow({"kind", "description", "seed", "cone"});
    const auto cone = config::cone(root.at("cone"));
    const auto t0 = Clock::now();
    const WeightVector ones(std::vector<double>(cone.rank(), 1.0));
    const WeightVector expect_d = -1.0 * (ones + 0.5 * cone.m_vec() + 0.5 * cone.m_prime_vec());
    double dev = 0.0;
    for (std::size_t j = 0; j < cone.rank(); ++j) dev = std::max(dev, std::abs(cone.d_vec()[j] - expect_d[j]));
    std::string basis;
    for (std::size_t j = 0; j < cone.n_basis().size(); ++j)
        basis += (j ? " " : "") + fmt(cone.n_basis()[j]) + "^" + fmt(cone.n_basis_degrees()[j]);
    ctx.add({"§2.1", cone.describe(),
             "rank=" + std::to_string(cone.rank()) + ";dim=" + std::to_string(cone.ambient_dim()),
             "|d + (1 + m/2 + m'/2)|", dev, 1e-12, "",
             "d=" + fmt(cone.d_vec()) + ";m=" + fmt(cone.m_vec()) + ";m'=" + fmt(cone.m_prime_vec()) + ";basis=" + basis,
             dev < 1e-12},
            t0);
    const WeightVector s(std::vector<double>(cone.rank(), 0.7));
    const double at_e = power_function(cone, s, cone.e_omega());
    ctx.add({"§2.1", cone.describe() + " base point", "s=" + fmt(s), "|Δ^s(e_Ω) − 1|", std::abs(at_e - 1.0), 1e-12, "", "",
             std::abs(at_e - 1.0) < 1e-12},
            Clock::now());
}

} // namespace detail

/// Runs one experiment. The kind comes from the config, or from `expected`
/// when the config omits it; a mismatch is a config error.
inline Report run(const json& cfg, const RunOptions& opt = {}, std::optional<Kind> expected = std::nullopt) {
    if (!(opt.tolerance_scale > 0.0)) throw config_error("--tolerance-scale must be positive");
    const Node root(cfg, "");
    if (!cfg.is_object()) root.fail("expected a JSON object");
    Kind kind = Kind::ConeInfo;
    if (root.has("kind")) {
        kind = kind_from(root.at("kind"));
        if (expected && kind != *expected)
            root.at("kind").fail("config is for '" + to_string(kind) + "' but the command runs '" + to_string(*expected) + "'");
    } else if (expected) {
        kind = *expected;
    } else {
        root.at("kind");
    }
    Report report;
    report.kind = kind;
    report.tolerance_scale = opt.tolerance_scale;
    detail::Context ctx{root, opt, &report};
    const auto t0 = detail::Clock::now();
    switch (kind) {
    case Kind::ProjectorThreshold: detail::run_projector_threshold(ctx); break;
    case Kind::PositiveEquivalence: detail::run_positive_equivalence(ctx); break;
    case Kind::AtomicReconstruction: detail::run_atomic(ctx); break;
    case Kind::BoundaryLimit: detail::run_boundary(ctx); break;
    case Kind::GammaIdentity: detail::run_gamma_identity(ctx); break;
    case Kind::Section7Properties: detail::run_section7(ctx); break;
    case Kind::Transference: detail::run_transference(ctx); break;
    case Kind::DualityConstancy: detail::run_duality(ctx); break;
    case Kind::ConeInfo: detail::run_cone_info(ctx); break;
    }
    if (opt.seed || root.has("seed")) report.seed = ctx.seed(false);
    report.runtime_s = detail::seconds_since(t0);
    return report;
}

} // namespace conebergman::experiments
