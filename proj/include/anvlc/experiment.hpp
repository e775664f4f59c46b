#pragma once

#include "anvlc/an_optimizer.hpp"
#include "anvlc/channel_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anvlc {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kCsvSchemaVersion = 1;

/// Invalid or unreadable configuration. The message starts with the offending key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    RoomScene scene = RoomScene::reference();
    CcpConfig optimizer;
    std::vector<double> lambda_db{0.0, -5.0};
    std::vector<double> sigma_p{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
    int placements = 500;
    std::uint64_t seed = 1;
    int workers = 0;
    /// Operating point for `single` and `convergence`.
    double focus_sigma_p = 0.25;
    std::optional<ReceiverPosition> bob;
    std::optional<ReceiverPosition> eve;
    std::uint64_t validate_samples = 1000000;

    void validate() const;
};

/// Parses the JSON configuration text; absent fields keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the effective configuration (used for the config hash).
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path csv;
    std::filesystem::path metadata;
    bool partial = false;
    std::string message;
};

/// Runs `convergence`, `sweep`, `single` or `validate`, writing <out>/<command>.csv and
/// <out>/<command>.meta.txt.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& command,
                         const std::filesystem::path& out_dir);

}  // namespace anvlc
