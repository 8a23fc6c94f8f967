#include "quenchlab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "quenchlab/errors.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

namespace {

double dot4(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double* y, const double* x, double alpha, int n) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// The layer kernels below process samples in blocks of four so each streamed
// weight row is reused across four output rows. Loops are unit-stride over
// fan_out (the weight layout is fan_in-major) and the summation order is
// fixed, so results are bit-reproducible.

// rows[b][o] += sum_k x[b][k] * W[k*out+o] for a block of nb <= 4 samples
void linear_block(const double* const* xs, double* const* rows, const double* W, int in, int out,
                  int nb) {
    if (out == 1) {
        for (int b = 0; b < nb; ++b) rows[b][0] += dot4(W, xs[b], in);
        return;
    }
    for (int k = 0; k < in; ++k) {
        const double* w = W + static_cast<std::size_t>(k) * out;
        if (nb == 4) {
            const double x0 = xs[0][k], x1 = xs[1][k], x2 = xs[2][k], x3 = xs[3][k];
            double* r0 = rows[0];
            double* r1 = rows[1];
            double* r2 = rows[2];
            double* r3 = rows[3];
            for (int o = 0; o < out; ++o) {
                const double wv = w[o];
                r0[o] += x0 * wv;
                r1[o] += x1 * wv;
                r2[o] += x2 * wv;
                r3[o] += x3 * wv;
            }
        } else {
            for (int b = 0; b < nb; ++b) {
                if (xs[b][k] == 0.0) continue;
                axpy(rows[b], w, xs[b][k], out);
            }
        }
    }
}

// gW[k*out+o] += sum_b x[b][k] * delta[b][o]
void weight_grad_block(const double* const* xs, const double* const* deltas, double* gW, int in,
                       int out, int nb) {
    if (out == 1) {
        for (int b = 0; b < nb; ++b) axpy(gW, xs[b], deltas[b][0], in);
        return;
    }
    for (int k = 0; k < in; ++k) {
        double* g = gW + static_cast<std::size_t>(k) * out;
        if (nb == 4) {
            const double x0 = xs[0][k], x1 = xs[1][k], x2 = xs[2][k], x3 = xs[3][k];
            const double *d0 = deltas[0], *d1 = deltas[1], *d2 = deltas[2], *d3 = deltas[3];
            for (int o = 0; o < out; ++o)
                g[o] += x0 * d0[o] + x1 * d1[o] + x2 * d2[o] + x3 * d3[o];
        } else {
            for (int b = 0; b < nb; ++b) {
                if (xs[b][k] == 0.0) continue;
                axpy(g, deltas[b], xs[b][k], out);
            }
        }
    }
}

// dprev[b][k] = sum_o delta[b][o] * W[k*out+o]
void input_grad_block(const double* const* deltas, double* const* dprev, const double* W, int in,
                      int out, int nb) {
    if (out == 1) {
        for (int b = 0; b < nb; ++b) {
            const double d = deltas[b][0];
            double* dp = dprev[b];
            for (int k = 0; k < in; ++k) dp[k] = d * W[k];
        }
        return;
    }
    for (int k = 0; k < in; ++k) {
        const double* w = W + static_cast<std::size_t>(k) * out;
        if (nb == 4) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            const double *d0 = deltas[0], *d1 = deltas[1], *d2 = deltas[2], *d3 = deltas[3];
            for (int o = 0; o < out; ++o) {
                const double wv = w[o];
                s0 += d0[o] * wv;
                s1 += d1[o] * wv;
                s2 += d2[o] * wv;
                s3 += d3[o] * wv;
            }
            dprev[0][k] = s0;
            dprev[1][k] = s1;
            dprev[2][k] = s2;
            dprev[3][k] = s3;
        } else {
            for (int b = 0; b < nb; ++b) dprev[b][k] = dot4(deltas[b], w, out);
        }
    }
}

double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Reusable forward/backward buffers for one architecture. All loops run in a
// fixed order; results depend only on the weights and the batch.
class NetEval {
public:
    NetEval(const NetArch& arch, int capacity)
        : arch_(arch), dims_(arch.layer_dims()), capacity_(capacity) {
        z_.resize(dims_.size());
        act_.resize(dims_.size());
        delta_.resize(dims_.size());
        for (std::size_t l = 0; l < dims_.size(); ++l) {
            z_[l].resize(static_cast<std::size_t>(capacity) * dims_[l].second);
            act_[l].resize(static_cast<std::size_t>(capacity) * dims_[l].second);
            delta_[l].resize(static_cast<std::size_t>(capacity) * dims_[l].second);
        }
        per_sample_.resize(capacity);
    }

    // Fills z_ / act_ and per-sample losses; returns the mean loss.
    double forward(const double* w, const Batch& batch) {
        check_batch(batch);
        const int n = batch.n;
        const double* input = batch.x;
        std::size_t offset = 0;
        for (std::size_t l = 0; l < dims_.size(); ++l) {
            const auto [in, out] = dims_[l];
            const double* W = w + offset;
            const double* b = W + static_cast<std::size_t>(in) * out;
            for (int s = 0; s < n; ++s)
                std::memcpy(z_[l].data() + static_cast<std::size_t>(s) * out, b,
                            sizeof(double) * static_cast<std::size_t>(out));
            for (int s0 = 0; s0 < n; s0 += 4) {
                const int nb = std::min(4, n - s0);
                const double* xs[4] = {};
                double* rows[4] = {};
                for (int j = 0; j < nb; ++j) {
                    xs[j] = input + static_cast<std::size_t>(s0 + j) * in;
                    rows[j] = z_[l].data() + static_cast<std::size_t>(s0 + j) * out;
                }
                linear_block(xs, rows, W, in, out, nb);
            }
            if (l + 1 < dims_.size()) {
                for (std::size_t i = 0; i < static_cast<std::size_t>(n) * out; ++i)
                    act_[l][i] = z_[l][i] > 0.0 ? z_[l][i] : 0.0;
                input = act_[l].data();
            }
            offset += static_cast<std::size_t>(in + 1) * out;
        }

        const int out = dims_.back().second;
        const double* logits = z_.back().data();
        double total = 0.0;
        if (arch_.kind == NetArch::Kind::ToyA) {
            for (int s = 0; s < n; ++s) {
                const double p = sigmoid(logits[s]);
                const double d = p - batch.y[s];
                per_sample_[s] = d * d;
                total += per_sample_[s];
            }
        } else {
            for (int s = 0; s < n; ++s) {
                const double* zs = logits + static_cast<std::size_t>(s) * out;
                double m = zs[0];
                for (int c = 1; c < out; ++c) m = std::max(m, zs[c]);
                double sum = 0.0;
                for (int c = 0; c < out; ++c) sum += std::exp(zs[c] - m);
                const double lse = m + std::log(sum);
                per_sample_[s] = lse - zs[batch.y[s]];
                total += per_sample_[s];
            }
        }
        return total / n;
    }

    const std::vector<double>& per_sample() const { return per_sample_; }

    // Gradient of the mean batch loss, written (not accumulated) into grad.
    void backward(const double* w, const Batch& batch, double* grad) {
        forward(w, batch);
        const int n = batch.n;
        const double inv_n = 1.0 / n;

        // output-layer deltas: d(mean loss)/d(logit)
        {
            const int out = dims_.back().second;
            const double* logits = z_.back().data();
            double* dl = delta_.back().data();
            if (arch_.kind == NetArch::Kind::ToyA) {
                for (int s = 0; s < n; ++s) {
                    const double p = sigmoid(logits[s]);
                    dl[s] = 2.0 * (p - batch.y[s]) * p * (1.0 - p) * inv_n;
                }
            } else {
                for (int s = 0; s < n; ++s) {
                    const double* zs = logits + static_cast<std::size_t>(s) * out;
                    double* ds = dl + static_cast<std::size_t>(s) * out;
                    double m = zs[0];
                    for (int c = 1; c < out; ++c) m = std::max(m, zs[c]);
                    double sum = 0.0;
                    for (int c = 0; c < out; ++c) sum += std::exp(zs[c] - m);
                    for (int c = 0; c < out; ++c) ds[c] = std::exp(zs[c] - m) / sum * inv_n;
                    ds[batch.y[s]] -= inv_n;
                }
            }
        }

        std::memset(grad, 0, sizeof(double) * static_cast<std::size_t>(arch_.param_count()));
        std::size_t offset = arch_.param_count();
        for (int l = static_cast<int>(dims_.size()) - 1; l >= 0; --l) {
            const auto [in, out] = dims_[l];
            offset -= static_cast<std::size_t>(in + 1) * out;
            const double* W = w + offset;
            double* gW = grad + offset;
            double* gb = gW + static_cast<std::size_t>(in) * out;
            const double* input = l == 0 ? batch.x : act_[l - 1].data();
            for (int s0 = 0; s0 < n; s0 += 4) {
                const int nb = std::min(4, n - s0);
                const double* xs[4] = {};
                const double* ds[4] = {};
                for (int j = 0; j < nb; ++j) {
                    xs[j] = input + static_cast<std::size_t>(s0 + j) * in;
                    ds[j] = delta_[l].data() + static_cast<std::size_t>(s0 + j) * out;
                }
                weight_grad_block(xs, ds, gW, in, out, nb);
            }
            for (int s = 0; s < n; ++s)
                axpy(gb, delta_[l].data() + static_cast<std::size_t>(s) * out, 1.0, out);

            if (l > 0) {
                const int prev_out = dims_[l - 1].second;
                double* dprev = delta_[l - 1].data();
                for (int s0 = 0; s0 < n; s0 += 4) {
                    const int nb = std::min(4, n - s0);
                    const double* ds[4] = {};
                    double* dp[4] = {};
                    for (int j = 0; j < nb; ++j) {
                        ds[j] = delta_[l].data() + static_cast<std::size_t>(s0 + j) * out;
                        dp[j] = dprev + static_cast<std::size_t>(s0 + j) * prev_out;
                    }
                    input_grad_block(ds, dp, W, in, out, nb);
                }
                // ReLU subgradient: 0 at 0
                const double* zp = z_[l - 1].data();
                for (std::size_t i = 0; i < static_cast<std::size_t>(n) * prev_out; ++i)
                    if (!(zp[i] > 0.0)) dprev[i] = 0.0;
            }
        }
    }

    // Loss and accuracy from the buffers of the last forward() call.
    double accuracy(const Batch& batch) const {
        const int n = batch.n;
        const int out = dims_.back().second;
        const double* logits = z_.back().data();
        std::int64_t correct = 0;
        if (arch_.kind == NetArch::Kind::ToyA) {
            for (int s = 0; s < n; ++s) correct += (logits[s] >= 0.0 ? 1 : 0) == batch.y[s];
        } else {
            for (int s = 0; s < n; ++s) {
                const double* zs = logits + static_cast<std::size_t>(s) * out;
                int best = 0;
                for (int c = 1; c < out; ++c)
                    if (zs[c] > zs[best]) best = c;
                correct += best == batch.y[s];
            }
        }
        return static_cast<double>(correct) / n;
    }

private:
    void check_batch(const Batch& batch) const {
        if (batch.n <= 0) throw std::invalid_argument("nn: batch must be nonempty");
        if (batch.n > capacity_) throw std::invalid_argument("nn: batch exceeds buffer capacity");
        if (batch.dim != arch_.input_dim)
            throw std::invalid_argument("nn: batch feature dim " + std::to_string(batch.dim) +
                                        " does not match input_dim " +
                                        std::to_string(arch_.input_dim));
        const int classes = arch_.kind == NetArch::Kind::ToyA ? 2 : arch_.output_dim;
        for (int s = 0; s < batch.n; ++s)
            if (batch.y[s] < 0 || batch.y[s] >= classes)
                throw std::invalid_argument("nn: label " + std::to_string(batch.y[s]) +
                                            " out of range [0," + std::to_string(classes - 1) +
                                            "] at batch position " + std::to_string(s));
    }

    NetArch arch_;
    std::vector<std::pair<int, int>> dims_;
    int capacity_;
    std::vector<std::vector<double>> z_;
    std::vector<std::vector<double>> act_;
    std::vector<std::vector<double>> delta_;
    std::vector<double> per_sample_;
};

// Chunked full-set evaluation so capacity stays bounded.
std::pair<double, double> eval_in_chunks(NetEval& eval, const double* w, const Dataset& data,
                                         int chunk) {
    double loss_sum = 0.0;
    double correct_sum = 0.0;
    for (int start = 0; start < data.n_samples; start += chunk) {
        const int n = std::min(chunk, data.n_samples - start);
        Batch b{data.features.data() + static_cast<std::size_t>(start) * data.dim,
                data.labels.data() + start, n, data.dim};
        loss_sum += eval.forward(w, b) * n;
        correct_sum += eval.accuracy(b) * n;
    }
    return {loss_sum / data.n_samples, correct_sum / data.n_samples};
}

std::vector<int> sample_noise_subset(std::uint64_t shuffle_seed, std::int64_t iteration,
                                     int train_size, int subset_size) {
    // Fresh deterministic subset per measurement time.
    std::uint64_t state = shuffle_seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(iteration + 1));
    Rng rng(splitmix64(state));
    std::vector<int> idx(train_size);
    for (int i = 0; i < train_size; ++i) idx[i] = i;
    for (int i = 0; i < subset_size; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(train_size - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(subset_size);
    return idx;
}

}  // namespace

void NetArch::validate() const {
    if (input_dim < 1) throw std::invalid_argument("arch: input_dim must be >= 1");
    if (output_dim < 1) throw std::invalid_argument("arch: output_dim must be >= 1");
    for (const int h : hidden_sizes)
        if (h < 1) throw std::invalid_argument("arch: zero-sized hidden layer");
    if (kind == Kind::ToyA) {
        if (hidden_sizes.size() != 1)
            throw std::invalid_argument("arch: ToyA has exactly one hidden layer");
        if (output_dim != 1) throw std::invalid_argument("arch: ToyA output_dim must be 1");
    } else {
        if (hidden_sizes.empty())
            throw std::invalid_argument("arch: FullyConnectedB needs at least one hidden layer");
    }
}

std::vector<std::pair<int, int>> NetArch::layer_dims() const {
    std::vector<std::pair<int, int>> dims;
    int in = input_dim;
    for (const int h : hidden_sizes) {
        dims.emplace_back(in, h);
        in = h;
    }
    dims.emplace_back(in, output_dim);
    return dims;
}

std::int64_t NetArch::param_count() const {
    std::int64_t m = 0;
    for (const auto [in, out] : layer_dims()) m += static_cast<std::int64_t>(in + 1) * out;
    return m;
}

WeightSnapshot init_net(const NetArch& arch) {
    arch.validate();
    Rng rng(arch.init_seed);
    WeightSnapshot snap;
    snap.w.resize(static_cast<std::size_t>(arch.param_count()));
    std::size_t offset = 0;
    for (const auto [in, out] : arch.layer_dims()) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        const std::size_t count = static_cast<std::size_t>(in + 1) * out;
        for (std::size_t i = 0; i < count; ++i)
            snap.w[offset + i] = bound * (2.0 * rng.uniform01() - 1.0);
        offset += count;
    }
    snap.iteration = 0;
    return snap;
}

double forward_loss(const WeightSnapshot& w, const NetArch& arch, const Batch& batch,
                    std::vector<double>* per_sample) {
    arch.validate();
    if (static_cast<std::int64_t>(w.w.size()) != arch.param_count())
        throw std::invalid_argument("forward_loss: weight vector length does not match arch");
    NetEval eval(arch, batch.n);
    const double mean = eval.forward(w.w.data(), batch);
    if (per_sample)
        per_sample->assign(eval.per_sample().begin(), eval.per_sample().begin() + batch.n);
    return mean;
}

GradientRecord backward(const WeightSnapshot& w, const NetArch& arch, const Batch& batch) {
    arch.validate();
    if (static_cast<std::int64_t>(w.w.size()) != arch.param_count())
        throw std::invalid_argument("backward: weight vector length does not match arch");
    NetEval eval(arch, batch.n);
    GradientRecord g;
    g.mean_grad.resize(w.w.size());
    eval.backward(w.w.data(), batch, g.mean_grad.data());
    return g;
}

void sgd_step(WeightSnapshot& w, const GradientRecord& g, double alpha) {
    if (g.mean_grad.size() != w.w.size())
        throw std::invalid_argument("sgd_step: gradient length does not match weights");
    double probe = 0.0;
    for (std::size_t i = 0; i < w.w.size(); ++i) {
        w.w[i] -= alpha * g.mean_grad[i];
        probe += w.w[i];
    }
    w.iteration += 1;
    if (!std::isfinite(probe)) {
        std::ostringstream msg;
        msg << "sgd_step: non-finite update at iteration " << w.iteration;
        throw DivergenceError(msg.str());
    }
}

std::pair<double, double> loss_accuracy(const WeightSnapshot& w, const NetArch& arch,
                                        const Batch& batch) {
    NetEval eval(arch, batch.n);
    const double loss = eval.forward(w.w.data(), batch);
    return {loss, eval.accuracy(batch)};
}

double noise_D(const WeightSnapshot& w, const NetArch& arch, const Dataset& data,
               std::vector<int> subset_indices) {
    if (subset_indices.empty()) throw std::invalid_argument("noise_D: subset must be nonempty");
    for (const int i : subset_indices)
        if (i < 0 || i >= data.n_samples)
            throw std::invalid_argument("noise_D: subset index out of range");
    std::sort(subset_indices.begin(), subset_indices.end());

    const std::size_t m = w.w.size();
    NetEval eval(arch, 1);
    std::vector<double> grad_s(m);
    std::vector<double> mean(m, 0.0);
    const double inv_count = 1.0 / static_cast<double>(subset_indices.size());

    for (const int i : subset_indices) {
        Batch one{data.sample(i), data.labels.data() + i, 1, data.dim};
        eval.backward(w.w.data(), one, grad_s.data());
        for (std::size_t k = 0; k < m; ++k) mean[k] += grad_s[k];
    }
    for (auto& v : mean) v *= inv_count;

    double d = 0.0;
    for (const int i : subset_indices) {
        Batch one{data.sample(i), data.labels.data() + i, 1, data.dim};
        eval.backward(w.w.data(), one, grad_s.data());
        double dev = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double diff = grad_s[k] - mean[k];
            dev += diff * diff;
        }
        d += dev / static_cast<double>(m);
    }
    return d * inv_count;
}

void TrainConfig::validate(int train_size) const {
    arch.validate();
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
    if (max_iterations < 0) throw std::invalid_argument("train: max_iterations must be >= 0");
    if (noise_subset_size < 1 || noise_subset_size > train_size)
        throw std::invalid_argument("train: noise_subset_size must be in [1, train size]");
}

TrainResult train_run(const TrainConfig& cfg, const Dataset& train, const Dataset& test,
                      const Schedule& schedule) {
    cfg.validate(train.n_samples);
    if (train.dim != cfg.arch.input_dim)
        throw std::invalid_argument("train_run: dataset dim does not match input_dim");
    for (std::size_t i = 0; i < schedule.ticks.size(); ++i) {
        if (schedule.ticks[i] <= 0 || schedule.ticks[i] > cfg.max_iterations)
            throw std::invalid_argument("train_run: schedule tick out of range");
        if (i > 0 && schedule.ticks[i] <= schedule.ticks[i - 1])
            throw std::invalid_argument("train_run: schedule must be strictly increasing");
    }

    WeightSnapshot w = init_net(cfg.arch);
    const int eval_chunk = 512;
    NetEval eval(cfg.arch, std::max(cfg.batch_size, eval_chunk));
    std::vector<double> grad(w.w.size());

    TrainResult result;
    result.log.columns = {"t", "train_loss", "test_loss", "train_acc", "test_acc"};

    auto measure = [&]() {
        const auto [train_loss, train_acc] = eval_in_chunks(eval, w.w.data(), train, eval_chunk);
        const auto [test_loss, test_acc] = eval_in_chunks(eval, w.w.data(), test, eval_chunk);
        const double t = static_cast<double>(w.iteration);
        result.log.rows.push_back({t, train_loss, test_loss, train_acc, test_acc});
        const auto subset = sample_noise_subset(cfg.shuffle_seed, w.iteration, train.n_samples,
                                                std::min(cfg.noise_subset_size, train.n_samples));
        result.noise.values.emplace_back(t, noise_D(w, cfg.arch, train, subset));
        result.snapshots.times.push_back(t);
        result.snapshots.configs.push_back(w.w);
    };

    measure();  // iteration 0

    Rng shuffle_rng(derive_seed(cfg.shuffle_seed, 0));
    std::vector<int> order(train.n_samples);
    for (int i = 0; i < train.n_samples; ++i) order[i] = i;
    std::vector<double> x_buf(static_cast<std::size_t>(cfg.batch_size) * train.dim);
    std::vector<int> y_buf(cfg.batch_size);

    std::size_t next_tick = 0;
    int cursor = train.n_samples;  // forces a shuffle before the first batch
    for (std::int64_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        if (cursor >= train.n_samples) {
            for (int i = train.n_samples - 1; i > 0; --i) {
                const int j = static_cast<int>(shuffle_rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
                std::swap(order[i], order[j]);
            }
            cursor = 0;
        }
        const int b = std::min(cfg.batch_size, train.n_samples - cursor);
        for (int s = 0; s < b; ++s) {
            const int src = order[cursor + s];
            std::memcpy(x_buf.data() + static_cast<std::size_t>(s) * train.dim, train.sample(src),
                        sizeof(double) * static_cast<std::size_t>(train.dim));
            y_buf[s] = train.labels[src];
        }
        cursor += b;

        Batch batch{x_buf.data(), y_buf.data(), b, train.dim};
        eval.backward(w.w.data(), batch, grad.data());

        double probe = 0.0;
        for (std::size_t k = 0; k < w.w.size(); ++k) {
            w.w[k] -= cfg.learning_rate * grad[k];
            probe += w.w[k];
        }
        w.iteration = iter;
        if (!std::isfinite(probe)) {
            std::ostringstream msg;
            msg << "train_run: non-finite update at iteration " << iter;
            throw DivergenceError(msg.str());
        }

        if (next_tick < schedule.ticks.size() && schedule.ticks[next_tick] == iter) {
            measure();
            ++next_tick;
        }
    }
    return result;
}

void write_snapshots(const std::string& path, const SnapshotSeries& snapshots) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(path + ": cannot open file for writing");
    f.write("QLSNAP1", 7);
    const std::uint64_t m = snapshots.configs.empty() ? 0 : snapshots.configs[0].size();
    const std::uint64_t count = snapshots.configs.size();
    f.write(reinterpret_cast<const char*>(&m), 8);
    f.write(reinterpret_cast<const char*>(&count), 8);
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t iter = static_cast<std::int64_t>(snapshots.times[i]);
        f.write(reinterpret_cast<const char*>(&iter), 8);
        f.write(reinterpret_cast<const char*>(snapshots.configs[i].data()),
                static_cast<std::streamsize>(m * sizeof(double)));
    }
    if (!f) throw IoError(path + ": write failed");
}

SnapshotSeries read_snapshots(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path + ": cannot open file");
    char magic[7];
    f.read(magic, 7);
    if (f.gcount() != 7 || std::memcmp(magic, "QLSNAP1", 7) != 0)
        throw IoError(path + ": bad snapshot magic at offset 0");
    std::uint64_t m = 0, count = 0;
    f.read(reinterpret_cast<char*>(&m), 8);
    f.read(reinterpret_cast<char*>(&count), 8);
    if (!f) throw IoError(path + ": truncated snapshot header");
    SnapshotSeries s;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::int64_t iter = 0;
        f.read(reinterpret_cast<char*>(&iter), 8);
        std::vector<double> w(m);
        f.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(m * sizeof(double)));
        if (!f)
            throw IoError(path + ": truncated snapshot record " + std::to_string(i) + " of " +
                          std::to_string(count));
        s.times.push_back(static_cast<double>(iter));
        s.configs.push_back(std::move(w));
    }
    return s;
}

}  // namespace quenchlab
