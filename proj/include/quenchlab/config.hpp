#ifndef QUENCHLAB_CONFIG_HPP
#define QUENCHLAB_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "quenchlab/nn.hpp"
#include "quenchlab/pspin.hpp"

namespace quenchlab {

struct ScheduleConfig {
    double base = 1.2;
    std::int64_t first_step = 1;
};

struct AnalysisConfig {
    double theta = 0.2;
    double eps_loss = 0.05;
    int tw_stride = 4;
    int points_per_decade = 20;
};

struct PspinRunConfig {
    PspinParams params;
    int realizations = 8;
};

enum class DatasetKind { SyntheticSeparable, SyntheticRandom, Mnist, MnistParity };

struct TrainRunConfig {
    TrainConfig train;
    DatasetKind dataset = DatasetKind::SyntheticRandom;
    int n_samples = 10000;   // synthetic only
    int test_samples = 2000; // synthetic only
    std::string mnist_images, mnist_labels;            // train split
    std::string mnist_test_images, mnist_test_labels;  // test split
};

struct SweepConfig {
    std::string parameter;        // a [train] key, e.g. hidden_size
    std::vector<double> values;
};

// Parsed experiment file: INI-style sections [pspin], [train], [schedule],
// [analysis], [sweep]. Unknown sections or keys are rejected; seeds have no
// defaults and must be spelled out in the file.
struct ExperimentConfig {
    std::optional<PspinRunConfig> pspin;
    std::optional<TrainRunConfig> train;
    ScheduleConfig schedule;
    AnalysisConfig analysis;
    std::optional<SweepConfig> sweep;

    // Effective configuration in a fixed serialization: sections and keys
    // sorted, numbers in canonical form. run_id is the 128-bit hash of this.
    std::string canonical_text() const;
    std::string run_id() const;  // 32 hex characters
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

// MurmurHash3 x64 128-bit fingerprint, hex-encoded.
std::string hash128_hex(const std::string& data);

}  // namespace quenchlab

#endif
