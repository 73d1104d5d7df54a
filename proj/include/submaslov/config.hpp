#pragma once

#include <optional>
#include <string>

#include "submaslov/expression.hpp"
#include "submaslov/scenarios.hpp"

namespace submaslov {

/// User-defined submersion given by coordinate expressions.
struct CustomSpec {
    int total_dim = 0, base_dim = 0;
    int total_index = 0, base_index = 0;
    std::vector<std::vector<Expression>> g; // total metric entries
    std::vector<std::vector<Expression>> h; // base metric entries
    std::vector<Expression> proj;

    SubmersionSpec build() const;
};

/// Parsed, validated run configuration.
struct RunConfig {
    std::string scenario; // builtin name, "fuzz-stationary", or "custom"
    int steps = 2000;
    std::optional<Vector> point, velocity;
    std::optional<std::pair<double, double>> interval;

    std::string boundary_type = "point";
    Matrix boundary_tangent = Matrix(0, 0); // base-dim × q
    Matrix boundary_shape = Matrix(0, 0);   // q × q

    VerifyOptions verify;
    std::uint64_t fuzz_case_seed = 1;
    int fuzz_steps = 2000;

    std::string csv_path, summary_path, json_path;
    std::optional<CustomSpec> custom;

    /// Scenario assembled from the configuration (seed overrides applied).
    Scenario instantiate() const;
};

/// Parses the line-oriented key-value document; unknown keys and dimension
/// mismatches are rejected with the offending line number.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Applies SUBMASLOV_* environment overrides to the tolerance knobs.
void apply_env_overrides(RunConfig& cfg);

} // namespace submaslov
