#ifndef QUENCHLAB_NN_HPP
#define QUENCHLAB_NN_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quenchlab/data.hpp"
#include "quenchlab/observables.hpp"

namespace quenchlab {

// Two small fully connected architectures:
//   ToyA            input -> hidden (ReLU) -> 1 (sigmoid), mean-square-error loss
//   FullyConnectedB input -> hidden... (ReLU) -> classes, softmax negative log-likelihood
struct NetArch {
    enum class Kind { ToyA, FullyConnectedB };
    Kind kind = Kind::ToyA;
    int input_dim = 32;
    std::vector<int> hidden_sizes = {1000};
    int output_dim = 1;
    std::uint64_t init_seed = 1;

    void validate() const;  // throws std::invalid_argument
    // (fan_in, fan_out) of each linear layer, input to output.
    std::vector<std::pair<int, int>> layer_dims() const;
    std::int64_t param_count() const;
};

// All weights and biases in one flat vector with a fixed layout: for each
// linear layer in order, the weight matrix stored fan_in-major (entry
// [k * fan_out + o] connects input k to output o) followed by the bias
// vector (fan_out). Fan_in-major keeps the unit-stride direction along the
// outputs, which is what the forward/backward kernels stream over. The
// layout never changes within a run, so snapshots of the same run are
// directly comparable.
struct WeightSnapshot {
    std::vector<double> w;
    std::int64_t iteration = 0;
};

struct GradientRecord {
    std::vector<double> mean_grad;     // gradient of the mean batch loss
    double per_sample_sq_dev = 0.0;    // filled by the noise estimator
};

// Non-owning view of a contiguous sample block (features row-major).
struct Batch {
    const double* x = nullptr;
    const int* y = nullptr;
    int n = 0;
    int dim = 0;

    static Batch whole(const Dataset& d) { return {d.features.data(), d.labels.data(), d.n_samples, d.dim}; }
};

// Weights and biases U(-1/sqrt(fan_in), +1/sqrt(fan_in)) per layer, drawn in
// layout order from init_seed; iteration = 0.
WeightSnapshot init_net(const NetArch& arch);

// Mean loss over the batch; per-sample losses returned if requested.
// ToyA: (sigmoid(out) - y)^2 with y in {0,1}. B: -log softmax(out)[y].
double forward_loss(const WeightSnapshot& w, const NetArch& arch, const Batch& batch,
                    std::vector<double>* per_sample = nullptr);

// Gradient of the mean batch loss via backpropagation (ReLU subgradient 0 at 0).
GradientRecord backward(const WeightSnapshot& w, const NetArch& arch, const Batch& batch);

// w' = w - alpha * mean_grad; iteration advances by one. Throws
// DivergenceError naming the iteration if any weight becomes non-finite.
void sgd_step(WeightSnapshot& w, const GradientRecord& g, double alpha);

// Mean loss and accuracy from one forward pass. ToyA predicts y=1 when the
// pre-sigmoid output is >= 0; B predicts the argmax logit.
std::pair<double, double> loss_accuracy(const WeightSnapshot& w, const NetArch& arch,
                                        const Batch& batch);

// SGD gradient noise: mean over the subset of (1/M) |grad L_s - grad L|^2,
// with grad L the subset-mean gradient. Two passes, subset sorted first so
// the value is exactly independent of index order.
double noise_D(const WeightSnapshot& w, const NetArch& arch, const Dataset& data,
               std::vector<int> subset_indices);

struct TrainConfig {
    NetArch arch;
    int batch_size = 100;
    double learning_rate = 0.1;
    std::int64_t max_iterations = 1000000;
    std::uint64_t data_seed = 1;     // consumed by dataset construction
    std::uint64_t shuffle_seed = 2;  // batch order and noise subsets
    int noise_subset_size = 1000;

    void validate(int train_size) const;
};

struct TrainResult {
    ObservableLog log;           // t, train_loss, test_loss, train_acc, test_acc
    NoiseSeries noise;           // D at each scheduled iteration
    SnapshotSeries snapshots;    // flat weight vectors at 0 and scheduled iterations
};

// Constant-learning-rate SGD with shuffled-epoch batches. Measurements (full
// train/test loss and accuracy, noise D on a fresh deterministic subset) and
// weight snapshots are taken at iteration 0 and every scheduled iteration.
TrainResult train_run(const TrainConfig& cfg, const Dataset& train, const Dataset& test,
                      const Schedule& schedule);

// Snapshot dump: "QLSNAP1", M (u64 LE), count (u64 LE), then per record the
// iteration (i64 LE) and M doubles (LE).
void write_snapshots(const std::string& path, const SnapshotSeries& snapshots);
SnapshotSeries read_snapshots(const std::string& path);

}  // namespace quenchlab

#endif
