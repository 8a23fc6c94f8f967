#ifndef QUENCHLAB_DATA_HPP
#define QUENCHLAB_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace quenchlab {

// A labelled dataset with features in [0,1]. Features are stored row-major,
// one sample per row, as doubles (all downstream numerics are double).
struct Dataset {
    int n_samples = 0;
    int dim = 0;
    std::vector<double> features;  // n_samples * dim
    std::vector<int> labels;       // binary 0/1 or digits 0..9
    std::string split;             // "train" or "test"

    const double* sample(int i) const { return features.data() + static_cast<std::size_t>(i) * dim; }
};

enum class SyntheticMode {
    Separable,     // label = side of a fixed random hyperplane
    RandomLabels,  // i.i.d. fair-coin labels
};

// Seeded synthetic dataset: features i.i.d. Gaussian clipped to [-3,3] and
// rescaled to [0,1]; labels per mode. Deterministic in (n, dim, mode, seed).
Dataset gen_synthetic(int n, int dim, SyntheticMode mode, std::uint64_t seed,
                      const std::string& split = "train");

// Hyperplane used by the separable mode for a given seed; exposed so tests
// can verify the labels are linearly separable by construction.
// Returns (w, b) with label = (w . x + b > 0).
std::pair<std::vector<double>, double> synthetic_hyperplane(int dim, std::uint64_t seed);

// MNIST-style IDX pair: u8 image file (magic 0x00000803) plus u8 label file
// (magic 0x00000801). Pixels are scaled to [0,1] by /255. Throws IoError
// naming the offending file and offset on bad magic, truncation, or a
// count mismatch between the two files.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::string& split = "train");

// Inverse of load_idx for byte-valued data; used to build fixtures.
// features must all be exact multiples of 1/255.
void write_idx(const Dataset& data, int rows, int cols,
               const std::string& images_path, const std::string& labels_path);

// Digit parity relabeling for binary tasks on MNIST: even = 0, odd = 1.
void relabel_parity(Dataset& data);

}  // namespace quenchlab

#endif
