#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "conebergman/experiments.hpp"

using namespace conebergman;
namespace ex = conebergman::experiments;
using ex::json;

namespace {

std::string csv_of(const ex::Report& r) {
    std::ostringstream os;
    ex::write_csv(r, os);
    return os.str();
}

// message of the config_error thrown by running cfg
std::string config_message(const json& cfg, std::optional<ex::Kind> kind = std::nullopt, ex::RunOptions opt = {}) {
    try {
        ex::run(cfg, opt, kind);
    } catch (const config_error& e) {
        return e.what();
    }
    return "<no error>";
}

json small_props() {
    return json::parse(R"({"kind":"section7-properties","seed":3,"cones":[{"kind":"lorentz","dim":3}],
                           "samples":200,"polynomials":{"samples":100,"max_degree":4}})");
}

} // namespace

TEST(Config, ConeSpecs) {
    using config::Node;
    const auto l = json::parse(R"({"kind":"lorentz","dim":4})");
    EXPECT_EQ(config::cone(Node(l, "cone")).ambient_dim(), 4u);
    const auto p = json::parse(R"({"kind":"product","factors":[{"kind":"halfline"},{"kind":"lorentz","dim":3}]})");
    const auto c = config::cone(Node(p, "cone"));
    EXPECT_EQ(c.rank(), 3u);
    EXPECT_EQ(c.ambient_dim(), 4u);
    const auto bad = json::parse(R"({"kind":"lorentz","dim":2})");
    EXPECT_THROW(config::cone(Node(bad, "cone")), config_error);
    const auto extra = json::parse(R"({"kind":"halfline","dim":2})");
    try {
        config::cone(Node(extra, "cone"));
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("cone.dim"), std::string::npos) << e.what();
    }
}

TEST(Config, ErrorsNameTheKey) {
    // missing seed for a Monte-Carlo kind
    auto cfg = small_props();
    cfg.erase("seed");
    EXPECT_NE(config_message(cfg).find("'seed'"), std::string::npos);
    // a seed given on the command line is enough
    EXPECT_EQ(config_message(cfg, std::nullopt, ex::RunOptions{5, 1.0}), "<no error>");
    // unknown top-level key
    cfg = small_props();
    cfg["sample"] = 10;
    EXPECT_NE(config_message(cfg).find("'sample'"), std::string::npos);
    // malformed nested value
    cfg = small_props();
    cfg["polynomials"]["max_degree"] = "six";
    EXPECT_NE(config_message(cfg).find("'polynomials.max_degree'"), std::string::npos);
    // array element paths
    cfg = small_props();
    cfg["cones"][0]["dim"] = -3;
    EXPECT_NE(config_message(cfg).find("'cones[0].dim'"), std::string::npos);
    // kind mismatch against the subcommand and unknown kinds
    EXPECT_NE(config_message(small_props(), ex::Kind::GammaIdentity).find("'kind'"), std::string::npos);
    EXPECT_NE(config_message(json::parse(R"({"kind":"nope"})")).find("'kind'"), std::string::npos);
    EXPECT_NE(config_message(json::parse(R"({})")).find("'kind'"), std::string::npos);
    // weight vectors of the wrong rank
    const auto pt = json::parse(R"({"kind":"projector-threshold","cases":[{"s":[1,1],"s_tilde":[0.75]}]})");
    EXPECT_NE(config_message(pt).find("'cases[0].s'"), std::string::npos);
    // s' and s~ together are ambiguous
    const auto both = json::parse(R"({"kind":"projector-threshold","cases":[{"s":[1],"s_tilde":[0.75],"s_prime":[-2.5]}]})");
    EXPECT_NE(config_message(both).find("'cases[0].s_tilde'"), std::string::npos);
    EXPECT_THROW(ex::run(small_props(), ex::RunOptions{std::nullopt, 0.0}), config_error);
}

TEST(Config, InfinityAndFunctions) {
    const auto j = json::parse(R"(["inf", 2, 1.5])");
    const auto v = config::Node(j, "q").numbers();
    EXPECT_TRUE(std::isinf(v[0]));
    EXPECT_EQ(v[1], 2.0);
    const auto f = json::parse(R"({"type":"rational","factors":[{"shift":[0,1],"power":3},{"shift":[1,2],"power":1}]})");
    const auto tf = config::test_function(config::Node(f, "f"));
    const cplx z(0.3, 0.7);
    EXPECT_NEAR(std::abs(tf(z) - std::pow(z + cplx(0, 1), -3.0) / (z + cplx(1, 2))), 0.0, 1e-15);
    const auto lower = json::parse(R"({"type":"rational","factors":[{"shift":[0,-1],"power":3}]})");
    EXPECT_THROW(config::test_function(config::Node(lower, "f")), config_error);
}

TEST(Report, CsvFormatAndFieldQuoting) {
    ex::Report r;
    r.kind = ex::Kind::GammaIdentity;
    r.rows.push_back({"§2.1", "a,b", "x=1", "m", 0.5, NAN, "", "say \"hi\"", true});
    r.rows.push_back({"§2.1", "c", "", "m", INFINITY, 1e-3, "Bounded", "", false});
    const auto csv = csv_of(r);
    EXPECT_EQ(csv, "anchor,case,parameters,metric,value,tolerance,verdict,details,pass\n"
                   "§2.1,\"a,b\",x=1,m,0.5,,,\"say \"\"hi\"\"\",pass\n"
                   "§2.1,c,,m,inf,0.001,Bounded,,FAIL\n");
    EXPECT_FALSE(r.all_pass());
    EXPECT_EQ(r.failures(), 1u);
    const auto s = ex::summary(r);
    EXPECT_EQ(s["kind"], "gamma-identity");
    EXPECT_EQ(s["failures"], 1);
    EXPECT_EQ(s["rows"][1]["value"], "inf");
    EXPECT_FALSE(ex::Report{}.all_pass());
}

TEST(Run, EveryRowCarriesAnAnchorAndIsDeterministic) {
    const auto a = ex::run(small_props());
    const auto b = ex::run(small_props());
    ASSERT_EQ(a.rows.size(), 3u);  // oscillation at the default weight, ratio sweep, polynomials
    for (const auto& row : a.rows) EXPECT_EQ(row.anchor, "§7");
    EXPECT_TRUE(a.all_pass());
    EXPECT_EQ(csv_of(a), csv_of(b));
    // a different seed changes the sampled statistics
    const auto c = ex::run(small_props(), ex::RunOptions{99, 1.0});
    EXPECT_NE(csv_of(a), csv_of(c));
    EXPECT_EQ(*c.seed, 99u);
}

TEST(Run, ToleranceScaleLoosensBounds) {
    const auto cfg = json::parse(R"({"kind":"gamma-identity","halfline_values":[0.5,2.5],"tolerance":1e-20})");
    const auto strict = ex::run(cfg);
    EXPECT_FALSE(strict.rows[0].pass && strict.rows[1].pass);
    const auto loose = ex::run(cfg, ex::RunOptions{std::nullopt, 1e8});
    EXPECT_DOUBLE_EQ(loose.rows[0].tolerance, 1e-12);
    EXPECT_TRUE(loose.all_pass());
}

TEST(Run, ConeInfoAndOutputs) {
    const auto cfg = json::parse(R"({"kind":"cone-info","cone":{"kind":"product","factors":[{"kind":"lorentz","dim":3},{"kind":"halfline"}]}})");
    const auto r = ex::run(cfg);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_TRUE(r.all_pass());
    EXPECT_NE(r.rows[0].details.find("m=(0 1 0)"), std::string::npos) << r.rows[0].details;
    const auto dir = std::filesystem::temp_directory_path() / "conebergman-test-out";
    std::filesystem::remove_all(dir);
    ex::write_outputs(r, dir);
    std::ifstream csv(dir / "cone-info.csv");
    std::stringstream buf;
    buf << csv.rdbuf();
    EXPECT_EQ(buf.str(), csv_of(r));
    std::ifstream js(dir / "summary.json");
    const auto s = json::parse(js);
    EXPECT_EQ(s["all_pass"], true);
    std::filesystem::remove_all(dir);
}

TEST(Run, ThresholdVerdictAgainstPredicate) {
    // without "expect" the verdict is checked against the predicate
    const auto cfg = json::parse(R"({"kind":"projector-threshold",
        "truncations":{"half_widths":[8,16,32],"delta":0.25,"panel_width":1.0,"order":4},
        "cases":[{"s":[1],"s_tilde":[0.75]},{"s":[1],"s_tilde":[0.4]}]})");
    const auto r = ex::run(cfg);
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_EQ(r.rows[2].verdict, "Unbounded");
    EXPECT_NE(r.rows[2].details.find("expected=Unbounded"), std::string::npos);
    EXPECT_NE(r.rows[0].details.find("predicate=holds"), std::string::npos);
}
