// Command line frontend: ingest -> fit -> simulate -> capability ->
// revenue -> compare over a single JSON run configuration.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "evfcr/pipeline.hpp"
#include "evfcr/runconfig.hpp"

namespace {

int run_stage(const std::string& config_path, evfcr::Stage stage,
              const std::optional<std::uint64_t>& seed_override,
              const std::string& out_override, bool plots, int workers) {
    try {
        evfcr::RunConfig config = evfcr::RunConfig::load(config_path);
        if (seed_override) config.seed = *seed_override;
        if (!out_override.empty()) config.output_dir = out_override;
        if (plots) config.plots = true;
        if (workers > 0) config.workers = workers;
        const auto result = evfcr::run_pipeline(config, stage, std::cout);
        std::cout << "wrote " << result.artifacts.size() << " artifacts to "
                  << result.output_dir << "\n";
        return EXIT_SUCCESS;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_FAILURE;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV fleet FCR capability and revenue simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    bool plots = false;
    int workers = 0;

    const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        if (needs_config)
            cmd->add_option("config", config_path, "run configuration JSON")->required();
        cmd->add_option("--seed", seed_override, "override the config seed");
        cmd->add_option("--out", out_override, "override the output directory");
        cmd->add_flag("--plots", plots, "also emit SVG charts");
        cmd->add_option("--workers", workers, "override worker thread count");
    };

    auto* c_ingest = app.add_subcommand("ingest", "parse logs, report cluster counts");
    auto* c_fit = app.add_subcommand("fit", "estimate mobility profiles");
    auto* c_sim = app.add_subcommand("simulate", "run the fleet simulation");
    auto* c_cap = app.add_subcommand("capability", "aggregate pool capability profiles");
    auto* c_rev = app.add_subcommand("revenue", "evaluate FCR revenue per market design");
    auto* c_cmp = app.add_subcommand("compare", "full pipeline incl. design comparison");
    for (auto* cmd : {c_ingest, c_fit, c_sim, c_cap, c_rev, c_cmp}) add_common(cmd);

    auto* c_demo = app.add_subcommand("demo", "run the built-in two-shift demo fleet");
    add_common(c_demo, false);

    CLI11_PARSE(app, argc, argv);

    if (c_demo->parsed()) {
        const std::string dir = out_override.empty() ? "out-demo" : out_override;
        std::filesystem::create_directories(dir);
        const std::string demo_cfg = (std::filesystem::path(dir) / "demo_config.json").string();
        {
            std::ofstream out(demo_cfg);
            out << evfcr::demo_config_json() << "\n";
        }
        std::cout << "demo config written to " << demo_cfg << "\n";
        return run_stage(demo_cfg, evfcr::Stage::compare, seed_override, dir, plots, workers);
    }
    if (c_ingest->parsed()) return run_stage(config_path, evfcr::Stage::ingest, seed_override, out_override, plots, workers);
    if (c_fit->parsed()) return run_stage(config_path, evfcr::Stage::fit, seed_override, out_override, plots, workers);
    if (c_sim->parsed()) return run_stage(config_path, evfcr::Stage::simulate, seed_override, out_override, plots, workers);
    if (c_cap->parsed()) return run_stage(config_path, evfcr::Stage::capability, seed_override, out_override, plots, workers);
    if (c_rev->parsed()) return run_stage(config_path, evfcr::Stage::revenue, seed_override, out_override, plots, workers);
    return run_stage(config_path, evfcr::Stage::compare, seed_override, out_override, plots, workers);
}
