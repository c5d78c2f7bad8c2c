#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "s2oct/checks.hpp"
#include "s2oct/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& output, int workers,
            const std::string& solver_cmd, double time_limit) {
    s2oct::ExperimentConfig cfg = s2oct::parse_config(config_path);
    if (!output.empty()) cfg.output_dir = output;
    if (workers > 0) cfg.workers = workers;
    if (!solver_cmd.empty()) cfg.solver_cmd = solver_cmd;
    if (time_limit > 0) cfg.time_limit = time_limit;

    const s2oct::RunSummary summary = s2oct::run_experiment(cfg);
    long result_rows = 0, diff_rows = 0;
    for (const auto& row : summary.rows) (row.method == "diff" ? diff_rows : result_rows)++;
    std::printf("wrote %s: %ld result rows, %ld diff rows, %ld errors\n",
                summary.results_csv.c_str(), result_rows, diff_rows, summary.error_rows);
    for (const auto& line : summary.log_lines) std::printf("  %s\n", line.c_str());
    return summary.error_rows == 0 ? 0 : 1;
}

int cmd_validate(const std::string& output) {
    const s2oct::ValidationReport report = s2oct::validate_artifacts(output);
    for (const auto& line : report.lines) std::printf("%s\n", line.c_str());
    std::printf("validated %ld artifacts, %ld mismatches\n", report.checked, report.mismatches);
    return report.mismatches == 0 ? 0 : 1;
}

int cmd_plot(const std::string& csv, const std::string& output, double time_limit) {
    const auto rows = s2oct::parse_results_csv(csv);
    std::filesystem::create_directories(output);
    s2oct::make_plots(rows, time_limit, output);
    std::printf("plots written under %s\n", output.c_str());
    return 0;
}

int cmd_oracle_check(int count, std::uint64_t seed) {
    int failures = 0;
    for (int k = 0; k < count; ++k) {
        const s2oct::checks::TinyCheck check = s2oct::checks::run_tiny_check(seed + static_cast<std::uint64_t>(k));
        if (check.all_good()) {
            std::printf("instance %d: ok (objective %.6g)\n", k, check.solver_objective);
        } else {
            ++failures;
            std::printf("instance %d: FAIL %s\n", k, check.detail.c_str());
        }
    }
    std::printf("%d/%d instances agree with the enumeration oracle\n", count - failures, count);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised optimal classification trees (MILP harness)"};
    app.require_subcommand(1);

    std::string config_path, output, solver_cmd, csv;
    int workers = 0;
    double time_limit = -1.0;
    int count = 20;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "Run the experiment pipeline from a config file");
    run->add_option("-c,--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "Output directory (overrides config)");
    run->add_option("-w,--workers", workers, "Worker count (overrides config)");
    run->add_option("--solver-cmd", solver_cmd, "External solver command with {mps} and {sol}");
    run->add_option("--time-limit", time_limit, "Per-solve time limit in seconds");

    auto* validate = app.add_subcommand("validate", "Re-route stored trees and flag mismatches");
    validate->add_option("-o,--output", output, "Run output directory")->required();

    auto* plot = app.add_subcommand("plot", "Regenerate SVG plots from a results CSV");
    plot->add_option("--csv", csv, "results.csv path")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--output", output, "Directory for the SVGs")->required();
    plot->add_option("--time-limit", time_limit, "ECDF time axis limit (seconds)");

    auto* oracle = app.add_subcommand("oracle-check", "Compare the solver against the enumeration oracle");
    oracle->add_option("-n,--count", count, "Number of random tiny instances");
    oracle->add_option("--seed", seed, "Base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, output, workers, solver_cmd, time_limit);
        if (validate->parsed()) return cmd_validate(output);
        if (plot->parsed()) return cmd_plot(csv, output, time_limit > 0 ? time_limit : 7200.0);
        if (oracle->parsed()) return cmd_oracle_check(count, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
