#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "riskbias/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"risk estimation and backtesting experiments"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "enumerate experiment ids with captions");

    riskbias::ExperimentConfig config;
    auto* run_cmd = app.add_subcommand("run", "run one experiment and write CSV outputs");
    run_cmd->add_option("id", config.id, "experiment id (see `list`)")->required();
    run_cmd->add_option("--scale", config.scale, "horizon m (0 = experiment default)");
    run_cmd->add_option("--seed", config.seed, "random seed");
    run_cmd->add_option("--bootstrap", config.bootstrap, "bootstrap replicate count B");
    run_cmd->add_option("--out", config.out_dir, "output directory");
    run_cmd->add_flag("--svg", config.emit_svg, "render SVG plots next to the CSVs");
    run_cmd->add_flag("--breaches", config.emit_breaches,
                      "table experiments: also write the secured series");
    run_cmd->add_option("--datasets", config.datasets,
                        "table experiments: comma list of dataset numbers, e.g. 1,2");
    run_cmd->set_config("--config", "", "key=value config file; explicit flags win");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit 2; --help/--version exit 0
    }

    if (list_cmd->parsed()) {
        for (const auto& info : riskbias::experiment_list())
            std::printf("%-8s %s\n", info.id.c_str(), info.caption.c_str());
        return 0;
    }

    try {
        const riskbias::ExperimentResult result = riskbias::run_experiment(config);
        for (const auto& f : result.files)
            std::printf("wrote %s/%s\n", config.out_dir.c_str(), f.c_str());
        for (const auto& w : result.warnings) std::printf("warning: %s\n", w.c_str());
        if (!result.errors.empty()) {
            for (const auto& e : result.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
            return 1;
        }
        std::printf("done in %.1fs\n", result.wall_seconds);
        return 0;
    } catch (const riskbias::ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
