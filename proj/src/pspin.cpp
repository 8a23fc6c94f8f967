#include "quenchlab/pspin.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "quenchlab/errors.hpp"

namespace quenchlab {

namespace {

std::int64_t choose2(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::int64_t choose3(std::int64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

// Dot product with four independent accumulators so the compiler can
// vectorize without reassociating a single sum chain; the reduction order is
// fixed, so results are reproducible.
double dot4(const double* a, const double* b, std::int64_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double* y, const double* x, double alpha, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

void PspinParams::validate() const {
    if (n < 3) throw std::invalid_argument("pspin: n must be >= 3");
    if (t_final < 0.0) throw std::invalid_argument("pspin: t_final must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("pspin: dt must be > 0");
    if (t_max < dt && t_max != 0.0)
        throw std::invalid_argument("pspin: t_max must be >= dt (or 0)");
}

CouplingTensor::CouplingTensor(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
    if (n < 3) throw std::invalid_argument("CouplingTensor: n must be >= 3");
    if (static_cast<std::int64_t>(values_.size()) != choose3(n))
        throw std::invalid_argument("CouplingTensor: wrong entry count");
}

std::int64_t CouplingTensor::triple_rank(int n, int i, int j, int k) {
    if (!(0 <= i && i < j && j < k && k < n))
        throw std::invalid_argument("triple_rank: need 0 <= i < j < k < n");
    // Offset of the i-block, then of the j-row inside it, then k.
    return (choose3(n) - choose3(n - i)) + (choose2(n - 1 - i) - choose2(n - j)) +
           (k - j - 1);
}

CouplingTensor sample_couplings(int n, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("sample_couplings: n must be >= 3");
    const std::int64_t count = choose3(n);
    const double stddev = std::sqrt(3.0) / static_cast<double>(n);
    Rng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(count));
    for (auto& v : values) v = stddev * rng.gaussian();
    return CouplingTensor(n, std::move(values));
}

SpinState random_sphere_config(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_sphere_config: n must be >= 1");
    Rng rng(seed);
    SpinState s;
    s.sigma.resize(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (auto& x : s.sigma) {
        x = rng.gaussian();
        norm2 += x * x;
    }
    const double scale = std::sqrt(static_cast<double>(n) / norm2);
    for (auto& x : s.sigma) x *= scale;
    s.t = 0.0;
    return s;
}

double energy(const CouplingTensor& J, const SpinState& s) {
    const int n = J.n();
    if (static_cast<int>(s.sigma.size()) != n)
        throw std::invalid_argument("energy: spin count does not match couplings");
    const double* sigma = s.sigma.data();
    const double* row = J.values().data();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        double ei = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const std::int64_t len = n - 1 - j;
            ei += sigma[j] * dot4(row, sigma + j + 1, len);
            row += len;
        }
        e -= sigma[i] * ei;
    }
    return e;
}

void energy_and_grad(const CouplingTensor& J, const std::vector<double>& sigma_v,
                     double& energy_out, std::vector<double>& grad_out) {
    const int n = J.n();
    if (static_cast<int>(sigma_v.size()) != n)
        throw std::invalid_argument("energy_and_grad: spin count does not match couplings");
    grad_out.assign(sigma_v.size(), 0.0);
    const double* sigma = sigma_v.data();
    double* grad = grad_out.data();
    const double* row = J.values().data();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const double si = sigma[i];
        double gi = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double sj = sigma[j];
            const std::int64_t len = n - 1 - j;
            // a = sum_k J_ijk s_k over k > j
            const double a = dot4(row, sigma + j + 1, len);
            axpy(grad + j + 1, row, -si * sj, len);  // dE/ds_k -= J s_i s_j
            grad[j] -= si * a;                       // dE/ds_j -= J s_i s_k
            gi += sj * a;                            // dE/ds_i -= J s_j s_k
            e -= si * sj * a;
            row += len;
        }
        grad[i] -= gi;
    }
    energy_out = e;
}

std::vector<double> grad_energy(const CouplingTensor& J, const SpinState& s) {
    double e;
    std::vector<double> grad;
    energy_and_grad(J, s.sigma, e, grad);
    return grad;
}

void langevin_step(SpinState& s, const CouplingTensor& J, double temperature,
                   double dt, Rng& noise) {
    const int n = J.n();
    double e;
    static thread_local std::vector<double> grad;
    energy_and_grad(J, s.sigma, e, grad);

    const double noise_amp = std::sqrt(2.0 * temperature * dt);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = s.sigma[i] - dt * grad[i];
        if (noise_amp != 0.0) x += noise_amp * noise.gaussian();
        s.sigma[i] = x;
        norm2 += x * x;
    }
    if (!std::isfinite(norm2) || norm2 == 0.0) {
        std::ostringstream msg;
        msg << "langevin_step: non-finite update at t=" << s.t + dt;
        throw DivergenceError(msg.str());
    }
    const double scale = std::sqrt(static_cast<double>(n) / norm2);
    for (auto& x : s.sigma) x *= scale;
    s.t += dt;
}

QuenchResult run_quench(const PspinParams& params, const Schedule& schedule) {
    params.validate();
    const std::int64_t n_steps = std::llround(params.t_max / params.dt);
    for (std::size_t i = 0; i < schedule.ticks.size(); ++i) {
        if (schedule.ticks[i] <= 0 || schedule.ticks[i] > n_steps)
            throw std::invalid_argument("run_quench: schedule tick out of range");
        if (i > 0 && schedule.ticks[i] <= schedule.ticks[i - 1])
            throw std::invalid_argument("run_quench: schedule must be strictly increasing");
    }

    const CouplingTensor J = sample_couplings(params.n, params.disorder_seed);
    SpinState s = random_sphere_config(params.n, params.init_seed);
    Rng noise(params.noise_seed);

    QuenchResult result;
    result.log.columns = {"t", "energy_per_spin"};
    const double inv_n = 1.0 / static_cast<double>(params.n);
    auto record = [&](const SpinState& state) {
        result.log.rows.push_back({state.t, energy(J, state) * inv_n});
        result.snapshots.times.push_back(state.t);
        result.snapshots.configs.push_back(state.sigma);
    };

    record(s);  // t = 0 entry is always present
    std::size_t next = 0;
    for (std::int64_t step = 1; step <= n_steps; ++step) {
        langevin_step(s, J, params.t_final, params.dt, noise);
        if (next < schedule.ticks.size() && schedule.ticks[next] == step) {
            s.t = static_cast<double>(step) * params.dt;  // avoid dt summation drift
            record(s);
            ++next;
        }
    }
    return result;
}

}  // namespace quenchlab
