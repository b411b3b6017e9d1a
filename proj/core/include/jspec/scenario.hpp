#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "jspec/coefficients.hpp"

namespace jspec {

/// A reproducible run description: model, task, task parameters and a seed
/// for randomized sweeps. Identical scenario + seed produce byte-identical
/// reports.
struct Scenario {
    int schema_version = 1;
    std::string task;
    CoefficientModel model = CoefficientModel::free_model();
    std::uint64_t seed = 0;
    nlohmann::json params = nlohmann::json::object();

    nlohmann::ordered_json to_json() const;
};

/// Parses and validates a config document. Unknown task names, missing
/// fields and schema mismatches raise ValidationError.
Scenario parse_scenario(const nlohmann::json& config);

/// Runs the task and writes report.json (and task CSVs) under out_dir.
void run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

/// File-level entry point used by the CLI: 0 on success, 2 on validation
/// failure, 3 on numerical non-convergence.
int run_config(const std::filesystem::path& config_path,
               const std::filesystem::path& out_dir);

/// One-line documentation per task (listed by --help).
const std::vector<std::pair<std::string, std::string>>& task_descriptions();

} // namespace jspec
