#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "grushin/errors.hpp"
#include "grushin_lab/config.hpp"
#include "grushin_lab/experiments.hpp"
#include "grushin_lab/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

int threads_from_env() {
    const char* env = std::getenv("GRUSHIN_LAB_THREADS");
    if (!env || !*env) return 0;
    try {
        std::size_t used = 0;
        const int n = std::stoi(env, &used);
        if (used == std::string(env).size() && n >= 0) return n;
    } catch (const std::exception&) {
    }
    throw grushin::lab::ConfigError("GRUSHIN_LAB_THREADS", "must be a non-negative integer");
}

}  // namespace

int main(int argc, char** argv) {
    namespace lab = grushin::lab;

    CLI::App app{"grushin-lab: reproducible experiments for singular Grushin mode operators"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = -1;
    bool verbose = false;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--threads", threads, "worker threads, 0 = all cores (default: GRUSHIN_LAB_THREADS or 0)")
        ->check(CLI::NonNegativeNumber);
    run->add_flag("--verbose", verbose, "progress messages on stderr");

    auto* validate = app.add_subcommand("validate", "check a config file without running it");
    validate->add_option("config", config_path, "config file (JSON)")->required();

    auto* list = app.add_subcommand("list-experiments", "print the available experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (list->parsed()) {
        for (const auto& info : lab::experiment_catalog()) std::cout << info.name << "\t" << info.summary << "\n";
        return kExitOk;
    }

    try {
        const lab::ExperimentConfig cfg = lab::load_config(config_path);
        if (validate->parsed()) {
            std::cout << "config ok: experiment \"" << cfg.experiment << "\"\n";
            return kExitOk;
        }

        lab::RunOptions ro;
        ro.threads = threads >= 0 ? threads : threads_from_env();
        if (verbose) ro.log = [](const std::string& msg) { std::cerr << "[grushin-lab] " << msg << std::endl; };

        const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
        const lab::ExperimentResult result = lab::run_experiment(cfg, ro);
        lab::write_outputs(result, cfg.to_json(), dir);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        if (verbose) std::cerr << "[grushin-lab] wrote results.json, results.csv, plot.gp to " << dir << std::endl;
        return kExitOk;
    } catch (const lab::ConfigError& e) {
        std::cerr << e.diagnostic() << "\n";
        return kExitConfig;
    } catch (const grushin::Error& e) {
        std::cerr << "numerical failure in module \"" << e.module() << "\": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
