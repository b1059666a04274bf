#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lldos/config.hpp"

namespace lldos {

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

// Commands throw lldos::Error subclasses on failure; run_command converts
// them into the stable exit-code contract and an error.json record.
void cmd_bounds(const ExperimentConfig& config, int workers);
void cmd_simulate(const ExperimentConfig& config, int workers);
void cmd_gamma(const ExperimentConfig& config, int workers);
void cmd_report(const ExperimentConfig& config, int workers);

ExperimentConfig apply_overrides(ExperimentConfig config, const CommandOptions& options);
int run_command(const std::string& name, const CommandOptions& options);

} // namespace lldos
