#include "anvlc/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Artificial-noise precoding for clipped VLC: design and secrecy evaluation"};
    app.set_version_flag("--version", anvlc::kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> placements;
    std::optional<int> workers;
    std::vector<double> lambda_db;
    std::vector<double> sigma_p;

    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--placements", placements, "Number of random Bob/Eve placements");
    app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    app.add_option("--lambda-db", lambda_db, "Eve SINR caps in dB (comma separated)")
        ->delimiter(',');
    app.add_option("--sigma-p", sigma_p, "Signal std grid in A (comma separated)")
        ->delimiter(',');

    for (const auto& [name, help] : {
             std::pair{"convergence", "Per-iteration CCP objective trace"},
             std::pair{"sweep", "Secrecy rate versus sigma_P for each lambda"},
             std::pair{"single", "One placement with both schemes and precoders"},
             std::pair{"validate", "Bussgang Monte-Carlo diagnostics"},
         }) {
        app.add_subcommand(name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : anvlc::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    anvlc::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = anvlc::load_config(config_path);
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (placements) {
            cfg.placements = *placements;
        }
        if (workers) {
            cfg.workers = *workers;
        }
        if (!lambda_db.empty()) {
            cfg.lambda_db = lambda_db;
        }
        if (!sigma_p.empty()) {
            cfg.sigma_p = sigma_p;
        }
        cfg.validate();
    } catch (const anvlc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return anvlc::kExitConfig;
    }

    try {
        const auto result = anvlc::run_experiment(cfg, command, out_dir);
        if (result.exit_code != anvlc::kExitOk) {
            std::cerr << (result.exit_code == anvlc::kExitConfig ? "config error: "
                                                                 : "solver error: ")
                      << result.message << '\n';
            if (result.partial) {
                std::cerr << "partial results written to " << result.csv.string() << '\n';
            }
            return result.exit_code;
        }
        std::cout << result.csv.string() << '\n' << result.metadata.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return anvlc::kExitSolver;
    }
    return anvlc::kExitOk;
}
