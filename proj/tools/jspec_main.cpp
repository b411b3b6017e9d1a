#include <string>

#include <CLI11.hpp>

#include "jspec/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"jspec - numerical spectral toolkit for Jacobi operators"};
    app.footer(
        "Scenario configs are JSON documents:\n"
        "  {\"schema_version\": 1, \"task\": \"<task>\", \"model\": {...},\n"
        "   \"seed\": 0, \"params\": {...}}\n\n"
        "The model is {window_start, a: [...], b: [...], tail: {kind: \"constant\",\n"
        "a_inf, b_inf} | {kind: \"periodic\", period}}. Reports embed the resolved\n"
        "scenario; identical config + seed reproduce reports byte-for-byte.\n"
        "JSPEC_THREADS controls the worker count for grid sweeps (results do not\n"
        "depend on it).\n\nTasks and their output files:\n" +
        [] {
            std::string s;
            for (const auto& [name, doc] : jspec::task_descriptions()) {
                s += "  " + name + "\n      " + doc + "\n";
            }
            return s;
        }());

    auto* run = app.add_subcommand("run", "Run a scenario config");
    std::string config_path;
    std::string out_dir;
    run->add_option("--config", config_path, "Path to the scenario JSON config")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory for report.json and CSV traces")
        ->required();
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);
    return jspec::run_config(config_path, out_dir);
}
