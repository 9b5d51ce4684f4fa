#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conebergman/experiments.hpp"

namespace ex = conebergman::experiments;

namespace {

struct Command {
    const char* name;
    ex::Kind kind;
    const char* help;
};

const std::vector<Command> kCommands{
    {"cone-info", ex::Kind::ConeInfo, "Structure vectors and self-checks of a cone"},
    {"gamma", ex::Kind::GammaIdentity, "Gamma function of the cone and the Laplace identity"},
    {"projector-norm", ex::Kind::ProjectorThreshold, "Positive projector thresholds and the reproducing property"},
    {"positive-equivalence", ex::Kind::PositiveEquivalence, "Cone operator T against P_{s',+} over a parameter matrix"},
    {"atomic-recon", ex::Kind::AtomicReconstruction, "Atomic reconstruction and synthesis growth"},
    {"boundary", ex::Kind::BoundaryLimit, "Boundary limits of the extension operator"},
    {"transference", ex::Kind::Transference, "Lifting and restriction between a Siegel domain and its tube"},
    {"props7", ex::Kind::Section7Properties, "Oscillation, ratio and polynomial bounds"},
    {"duality", ex::Kind::DualityConstancy, "Constancy of the duality pairing constant"},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Bergman spaces on homogeneous cones and Siegel domains: experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    double tolerance_scale = 1.0;

    std::vector<std::pair<CLI::App*, ex::Kind>> subs;
    for (const auto& c : kCommands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory for <kind>.csv and summary.json")->capture_default_str();
        sub->add_option("--seed", seed, "Seed overriding the config seed");
        sub->add_option("--tolerance-scale", tolerance_scale, "Multiplier applied to every tolerance")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        subs.emplace_back(sub, c.kind);
    }

    CLI11_PARSE(app, argc, argv);

    ex::Kind kind = ex::Kind::ConeInfo;
    for (const auto& [sub, k] : subs)
        if (sub->parsed()) kind = k;

    try {
        const auto cfg = conebergman::config::load(config_path);
        ex::RunOptions opt;
        opt.seed = seed;
        opt.tolerance_scale = tolerance_scale;
        const auto report = ex::run(cfg, opt, kind);
        ex::write_outputs(report, out_dir);
        for (const auto& row : report.rows)
            std::cout << (row.pass ? "pass " : "FAIL ") << row.anchor << "  " << row.id << "  " << row.metric << " = "
                      << ex::fmt(row.value) << (std::isnan(row.tolerance) ? "" : " (tol " + ex::fmt(row.tolerance) + ")")
                      << (row.verdict.empty() ? "" : "  [" + row.verdict + "]") << '\n';
        std::cout << ex::to_string(report.kind) << ": " << report.rows.size() - report.failures() << "/" << report.rows.size()
                  << " passed in " << ex::fmt(report.runtime_s) << " s; reports in " << out_dir << '\n';
        return report.all_pass() ? 0 : 1;
    } catch (const conebergman::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
