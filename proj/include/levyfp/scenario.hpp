#pragma once

#include "levyfp/discretization.hpp"
#include "levyfp/time_integration.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levyfp {

/// Invalid or inconsistent configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class InitialKind { gaussian, uniform, levy_exact, file };

struct InitialCondition {
    InitialKind kind = InitialKind::gaussian;
    double center = 0.0;  ///< gaussian: sqrt(rate/pi) exp(-rate (x - center)^2)
    double rate = 40.0;
    double t0 = 0.2;      ///< levy_exact: density of the alpha = 1/2, beta = 1 law at t0
    std::string path;     ///< file: CSV with columns x,p, interpolated linearly
};

/// One fully resolved run.
struct ScenarioConfig {
    std::string name = "scenario";
    StableParams params;
    int J = 200;
    std::optional<double> dt;  ///< nullopt means 0.5 h
    double t_final = 1.0;
    DriftSpec drift;
    std::string drift_text = "zero";
    BoundaryCondition bc = BoundaryCondition::absorbing;
    InitialCondition ic;

    Scheme scheme = Scheme::backward_euler;
    LinearSolverConfig solver;
    ApplyMode mode = ApplyMode::fast;
    std::vector<double> snapshots;

    std::string output_dir = "out";
    bool long_format = true;
    /// Physical window (lo, hi] for error norms; nullopt compares every interior node.
    std::optional<std::pair<double, double>> error_window;

    std::vector<std::string> warnings;

    [[nodiscard]] Grid grid() const { return Grid(J); }
    [[nodiscard]] double resolved_dt() const { return dt ? *dt : 0.5 / J; }
    [[nodiscard]] StepperConfig stepper() const;
    [[nodiscard]] DiscreteOperator build_operator() const;
};

/// Parses a configuration document into the list of runs it describes.
///
/// The document is a flat list of `key = value` lines (`#` starts a comment).
/// `[label]` sections start variants that inherit the keys above the first
/// section; `sweep.<key> = v1, v2, ...` expands into the cartesian product.
/// Relative file paths are resolved against base_dir.
[[nodiscard]] std::vector<ScenarioConfig> parse_scenarios(const std::string& text, const std::string& base_dir = ".");

/// Parses a document describing exactly one run.
[[nodiscard]] ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Reads and parses a configuration file. Relative paths inside it are
/// resolved against the file's directory.
[[nodiscard]] std::vector<ScenarioConfig> load_scenarios(const std::string& path);

/// Canonical `key = value` text of a resolved run; parse_config(to_text(c)) reproduces c.
[[nodiscard]] std::string to_text(const ScenarioConfig& cfg);

/// Initial density sampled at the interior nodes (physical x = b s_j).
[[nodiscard]] std::vector<double> initial_condition(const ScenarioConfig& cfg, const Grid& grid);

/// Shipped recipes: fig1 .. fig9 and table1.
[[nodiscard]] std::vector<std::string> builtin_recipe_names();
[[nodiscard]] std::optional<std::string> builtin_recipe(const std::string& name);

}  // namespace levyfp
