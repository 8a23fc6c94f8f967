#ifndef QUENCHLAB_RUNNER_HPP
#define QUENCHLAB_RUNNER_HPP

#include <string>

#include "quenchlab/config.hpp"

namespace quenchlab {

struct RunnerOptions {
    std::string out_dir;  // empty: runs/<run_id> under the working directory
    int threads = 0;      // 0: hardware concurrency
};

// Subcommand entry points. Each writes its artifact files under the resolved
// output directory and returns that directory. Outputs are byte-identical
// across reruns and thread counts for identical configs.
std::string cmd_pspin(const ExperimentConfig& cfg, const RunnerOptions& opts);
std::string cmd_train(const ExperimentConfig& cfg, const RunnerOptions& opts);

// Reads loss_curve.csv / msd.csv / noise.csv from run_dir, writes
// regime_report.csv and the SVG plots next to them.
void cmd_analyze(const std::string& run_dir, const AnalysisConfig& params);

// One training run per sweep value (concurrently), each analyzed, results
// merged into sweep.csv ordered by sweep value. Individual failures leave
// empty cells in their row instead of aborting the sweep.
std::string cmd_sweep(const ExperimentConfig& cfg, const RunnerOptions& opts);

// Helpers shared with the test suites.
Dataset build_train_split(const TrainRunConfig& tc);
Dataset build_test_split(const TrainRunConfig& tc);
std::string resolve_out_dir(const RunnerOptions& opts, const std::string& run_id);

}  // namespace quenchlab

#endif
