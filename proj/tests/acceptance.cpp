// Acceptance run: one line per criterion, exit code 0 iff every criterion passes.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "conebergman/experiments.hpp"

#ifndef CONEBERGMAN_CONFIG_DIR
#define CONEBERGMAN_CONFIG_DIR "configs"
#endif

namespace ex = conebergman::experiments;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string note;
};

struct Criterion {
    int number;
    std::string title;
    std::string config;
    double time_limit_s;
    // extra structural checks on the report (case counts, verdicts)
    std::function<Outcome(const ex::Report&)> check;
};

std::size_t count_rows(const ex::Report& r, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& row : r.rows) n += row.id.rfind(prefix, 0) == 0;
    return n;
}

const ex::Row* find_row(const ex::Report& r, const std::string& id) {
    for (const auto& row : r.rows)
        if (row.id == id) return &row;
    return nullptr;
}

Outcome all_rows(const ex::Report& r) {
    std::ostringstream os;
    os << r.rows.size() - r.failures() << "/" << r.rows.size() << " rows pass";
    return {r.all_pass(), os.str()};
}

Outcome expect_rows(const ex::Report& r, const std::string& prefix, std::size_t n) {
    const std::size_t got = count_rows(r, prefix);
    if (got != n) return {false, "expected " + std::to_string(n) + " rows '" + prefix + "', found " + std::to_string(got)};
    return {true, ""};
}

Outcome combine(std::initializer_list<Outcome> parts) {
    Outcome o{true, ""};
    for (const auto& p : parts) {
        o.pass = o.pass && p.pass;
        if (!p.note.empty()) o.note += (o.note.empty() ? "" : "; ") + p.note;
    }
    return o;
}

std::vector<Criterion> criteria() {
    return {
        {1, "upper half-plane positive projector threshold (s~ 0.75 Bounded, 0.4 Unbounded)", "projector-threshold.json", 60.0,
         [](const ex::Report& r) {
             const auto* b = find_row(r, "case 1 P+");
             const auto* u = find_row(r, "case 2 P+");
             Outcome o{b && u && b->verdict == "Bounded" && b->value < 1.05 && u->verdict == "Unbounded", ""};
             if (b && u) o.note = "growth " + ex::fmt(b->value) + " / " + ex::fmt(u->value);
             return combine({all_rows(r), o});
         }},
        {2, "T and P_{s',+} verdicts never conflict over 12 cases, p in {1,2}", "positive-equivalence.json", 600.0,
         [](const ex::Report& r) {
             std::size_t inconclusive = 0;
             for (const auto& row : r.rows) inconclusive += row.verdict.find("Inconclusive") != std::string::npos;
             return combine({all_rows(r), expect_rows(r, "case ", 24),
                             {true, std::to_string(inconclusive) + " rows with an Inconclusive side"}});
         }},
        {3, "Gamma: rank one vs classical Gamma (1e-8), Lorentz(3) Laplace identity (1e-3)", "gamma-identity.json", 30.0,
         [](const ex::Report& r) {
             return combine({all_rows(r), expect_rows(r, "halfline ", 10), expect_rows(r, "lorentz(3) ", 10)});
         }},
        {4, "oscillation, ratio and polynomial bounds: zero violations", "section7-properties.json", 120.0,
         [](const ex::Report& r) {
             Outcome o{true, ""};
             for (const auto& row : r.rows)
                 if (row.parameters.find("samples=10000") == std::string::npos && row.id != "polynomial ratio") o.pass = false;
             if (!o.pass) o.note = "sweeps must use 10^4 samples";
             return combine({all_rows(r), expect_rows(r, "ratio bounds lorentz(3)", 1), expect_rows(r, "ratio bounds lorentz(4)", 1),
                             expect_rows(r, "polynomial ratio", 1), o});
         }},
        {5, "reproducing property (<1e-3) and idempotence (<2e-3)", "reproducing.json", 120.0,
         [](const ex::Report& r) { return combine({all_rows(r), expect_rows(r, "reproduce f", 3), expect_rows(r, "idempotence", 1)}); }},
        {6, "atomic reconstruction decreasing to <1e-2; inadmissible synthesis growth >= 1.5", "atomic-reconstruction.json", 120.0,
         [](const ex::Report& r) {
             return combine({all_rows(r), expect_rows(r, "reconstruction δ=", 3), expect_rows(r, "synthesis growth", 3)});
         }},
        {7, "boundary limits strictly decreasing for 3 densities; window transform to 1e-10", "boundary-limit.json", 60.0,
         [](const ex::Report& r) { return combine({all_rows(r), expect_rows(r, "density ", 3), expect_rows(r, "window transform", 1)}); }},
        {8, "transference ratio constant within 1%; restriction inequality at 10 points", "transference.json", 60.0,
         [](const ex::Report& r) {
             return combine({all_rows(r), expect_rows(r, "ratio f", 5), expect_rows(r, "restriction ζ", 10)});
         }},
        {9, "duality pairing constant stable within 1e-3 over 5 density pairs", "duality-constancy.json", 60.0,
         [](const ex::Report& r) { return combine({all_rows(r), expect_rows(r, "pair ", 5)}); }},
    };
}

std::string csv_of(const ex::Report& r) {
    std::ostringstream os;
    ex::write_csv(r, os);
    return os.str();
}

void print_line(int number, bool pass, const std::string& title, const std::string& note) {
    std::printf("criterion %2d: %s  %s%s%s\n", number, pass ? "PASS" : "FAIL", title.c_str(), note.empty() ? "" : "  [",
                note.empty() ? "" : (note + "]").c_str());
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv) {
    const fs::path config_dir = argc > 1 ? fs::path(argv[1]) : fs::path(CONEBERGMAN_CONFIG_DIR);
    const fs::path out_dir = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance-out");
    bool all = true;
    std::map<int, std::string> first_csv;
    const auto list = criteria();
    for (const auto& c : list) {
        try {
            const auto cfg = conebergman::config::load(config_dir / c.config);
            const auto report = ex::run(cfg);
            ex::write_outputs(report, out_dir / ("criterion-" + std::to_string(c.number)));
            first_csv[c.number] = csv_of(report);
            auto o = c.check(report);
            const bool in_time = report.runtime_s < c.time_limit_s;
            o.note += (o.note.empty() ? "" : "; ") + ex::fmt(report.runtime_s) + " s of " + ex::fmt(c.time_limit_s) + " s";
            o.pass = o.pass && in_time;
            all = all && o.pass;
            print_line(c.number, o.pass, c.title, o.note);
        } catch (const std::exception& e) {
            all = false;
            print_line(c.number, false, c.title, std::string("error: ") + e.what());
        }
    }
    // Criterion 10: rerun 1-9 with the same seeds and compare the CSVs byte for byte.
    std::vector<int> differing;
    try {
        for (const auto& c : list) {
            if (!first_csv.count(c.number)) {
                differing.push_back(c.number);
                continue;
            }
            const auto report = ex::run(conebergman::config::load(config_dir / c.config));
            if (csv_of(report) != first_csv[c.number]) differing.push_back(c.number);
        }
    } catch (const std::exception& e) {
        differing.push_back(-1);
        std::fprintf(stderr, "rerun failed: %s\n", e.what());
    }
    std::string note;
    for (int d : differing) note += (note.empty() ? "differs: " : " ") + std::to_string(d);
    print_line(10, differing.empty(), "determinism: rerunning criteria 1-9 gives byte-identical CSVs", note);
    all = all && differing.empty();
    std::printf("acceptance: %s\n", all ? "all criteria pass" : "some criteria FAIL");
    return all ? 0 : 1;
}
