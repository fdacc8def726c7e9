#include "skl/harness.hpp"
#include "skl/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

// "a:b:step" expands to a, a+step, ..., b; anything else is one value.
std::vector<double> expand_sweep(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& item : items) {
        const auto first = item.find(':');
        if (first == std::string::npos) {
            out.push_back(std::stod(item));
            continue;
        }
        const auto second = item.find(':', first + 1);
        if (second == std::string::npos) throw skl::ConfigError("sweep '" + item + "' must read start:stop:step");
        const double a = std::stod(item.substr(0, first));
        const double b = std::stod(item.substr(first + 1, second - first - 1));
        const double step = std::stod(item.substr(second + 1));
        if (!(step > 0.0) || b < a) throw skl::ConfigError("sweep '" + item + "' is empty");
        const long count = std::lround(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(a + step * static_cast<double>(i));
    }
    return out;
}

bool parent_exists(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() || std::filesystem::is_directory(parent);
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral kernel laboratory: propagation, kernel design and quasimode checks"};
    app.set_config("--config", "", "Read options from a TOML or INI file; command-line flags take precedence");
    app.require_subcommand(1, 1);
    app.fallthrough();

    skl::ExperimentConfig config;
    std::vector<std::string> r_target;
    std::vector<std::string> t_sweep;
    std::string json_path;
    std::string csv_path;

    app.add_option("--p", config.p, "Primes p of the (p+1)-regular tree")->delimiter(',');
    app.add_option("--eta", config.eta, "Window parameters eta in (0, 1/2)")->delimiter(',');
    app.add_option("--bigN", config.N, "Support or time bounds N")->delimiter(',');
    app.add_option("--theta0", config.theta0, "Target angles theta0 in [0, pi]")->delimiter(',');
    app.add_option("--r-target", r_target, "Spectral parameters; prefix or suffix i marks imaginary ones")->delimiter(',');
    app.add_option("--t-sweep", t_sweep, "T values or start:stop:step ranges")->delimiter(',');
    app.add_option("--L", config.L, "Amplification lengths L")->delimiter(',');
    app.add_option("--q", config.q, "Recurrence steps q for the annulus bounds")->delimiter(',');
    app.add_option("--omega", config.omega, "Window half widths for explicit quasimode checks")->delimiter(',');
    app.add_option("--tol", config.tol, "Tolerance (command specific)");
    app.add_option("--grid", config.grid, "Main grid size (command specific)");
    app.add_option("--trials", config.trials, "Randomized trial count");
    app.add_option("--steps", config.steps, "Wave steps per energy trial");
    app.add_option("--seed", config.seed, "Random seed, recorded in every report");
    app.add_option("--json", json_path, "Write the JSON report here instead of stdout");
    app.add_option("--csv", csv_path, "Write plot data as CSV here");
    app.add_flag("--perturb", config.perturb, "Inject a fault so the checks must fail");

    for (const auto& name : skl::command_names()) app.add_subcommand(name, "Run the " + name + " suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    skl::CommandResult result;
    try {
        config.command = app.get_subcommands().front()->get_name();
        for (const auto& r : r_target) config.r_target.push_back(skl::parse_spectral_parameter(r));
        try {
            config.t_sweep = expand_sweep(t_sweep);
        } catch (const std::logic_error&) {
            throw skl::ConfigError("cannot parse --t-sweep");
        }
        config = skl::with_defaults(config);
        (void)skl::thread_budget();
        if (!json_path.empty() && !parent_exists(json_path)) {
            throw skl::ConfigError("directory for --json '" + json_path + "' does not exist");
        }
        if (!csv_path.empty() && !parent_exists(csv_path)) {
            throw skl::ConfigError("directory for --csv '" + csv_path + "' does not exist");
        }
        const auto start = std::chrono::steady_clock::now();
        result = skl::run_command(config);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        std::cerr << config.command << ": " << (result.pass ? "pass" : "FAIL") << " in " << elapsed.count()
                  << " s (threads " << skl::thread_budget() << ")\n";
    } catch (const skl::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const skl::InvalidArgument& e) {
        std::cerr << "environment or configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const skl::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    }

    const std::string json = result.report.dump(2) + "\n";
    if (json_path.empty()) {
        std::cout << json;
    } else if (!write_file(json_path, json)) {
        std::cerr << "cannot write " << json_path << '\n';
        return kExitConfig;
    }
    if (!csv_path.empty() && !write_file(csv_path, result.csv)) {
        std::cerr << "cannot write " << csv_path << '\n';
        return kExitConfig;
    }
    return result.pass ? kExitPass : kExitFail;
}
