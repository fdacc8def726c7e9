#pragma once

#include "skl/errors.hpp"
#include "skl/selberg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace skl {

/// Invalid experiment configuration. The CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("ConfigError: " + what) {}
    const char* kind() const noexcept override { return "ConfigError"; }
};

/// Parameters of one experiment run. Empty lists and zero scalars select the
/// command's defaults in with_defaults().
struct ExperimentConfig {
    std::string command;
    std::vector<long> p;
    std::vector<double> eta;
    std::vector<int> N;
    std::vector<double> theta0;
    std::vector<SpectralParameter> r_target;
    std::vector<double> t_sweep;
    std::vector<int> L;
    std::vector<long> q;
    std::vector<double> omega;
    double tol = 0.0;
    int grid = 0;
    int trials = 0;
    int steps = 0;
    std::uint64_t seed = 20240101;
    bool perturb = false;
};

const std::vector<std::string>& command_names();

/// "1.3" is real, "i0.3" or "0.3i" imaginary. Throws ConfigError.
SpectralParameter parse_spectral_parameter(const std::string& text);

/// Fills the command's defaults and validates ranges. Throws ConfigError.
ExperimentConfig with_defaults(ExperimentConfig config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Inverse of to_json; missing keys keep their defaults. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

struct CommandResult {
    nlohmann::json report;  // {command, config, results, pass}
    bool pass = false;
    std::string csv;
};

/// Runs a validated configuration. Library errors raised by individual checks
/// are recorded in the report and count as failures.
CommandResult run_command(const ExperimentConfig& config);

CommandResult cmd_propagate(const ExperimentConfig& config);
CommandResult cmd_design_tree(const ExperimentConfig& config);
CommandResult cmd_recurrence_tree(const ExperimentConfig& config);
CommandResult cmd_selberg(const ExperimentConfig& config);
CommandResult cmd_design_hyperbolic(const ExperimentConfig& config);
CommandResult cmd_recurrence_hyperbolic(const ExperimentConfig& config);
CommandResult cmd_quasimode(const ExperimentConfig& config);

}  // namespace skl
