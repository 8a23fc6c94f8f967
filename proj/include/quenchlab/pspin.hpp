#ifndef QUENCHLAB_PSPIN_HPP
#define QUENCHLAB_PSPIN_HPP

#include <cstdint>
#include <vector>

#include "quenchlab/observables.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

// Spherical 3-spin model quenched from random initial conditions and relaxed
// by overdamped Langevin dynamics at temperature T_final.
struct PspinParams {
    int n = 256;                       // spin count
    double t_final = 0.5;              // bath temperature after the quench
    double dt = 0.01;                  // Euler-Maruyama step
    double t_max = 1000.0;             // total simulated time
    std::uint64_t disorder_seed = 1;
    std::uint64_t init_seed = 2;
    std::uint64_t noise_seed = 3;

    void validate() const;             // throws std::invalid_argument
};

// Quenched couplings of the 3-body interaction, one entry per unordered
// triple i<j<k, packed flat in lexicographic order. C(n,3) doubles; the
// full symmetric tensor is never materialized.
class CouplingTensor {
public:
    CouplingTensor(int n, std::vector<double> values);

    int n() const { return n_; }
    std::int64_t entry_count() const { return static_cast<std::int64_t>(values_.size()); }
    const std::vector<double>& values() const { return values_; }

    // Lexicographic rank of the triple {i<j<k}, 0-based indices.
    static std::int64_t triple_rank(int n, int i, int j, int k);

    double at(int i, int j, int k) const { return values_[triple_rank(n_, i, j, k)]; }
    void set(int i, int j, int k, double v) { values_[triple_rank(n_, i, j, k)] = v; }

private:
    int n_;
    std::vector<double> values_;
};

// Spin configuration on the sphere |sigma|^2 = n, stamped with elapsed time.
struct SpinState {
    std::vector<double> sigma;
    double t = 0.0;
};

// C(n,3) i.i.d. Gaussian(0, 3/n^2) couplings, bit-reproducible from the seed.
CouplingTensor sample_couplings(int n, std::uint64_t seed);

// Uniform point on the sphere of radius sqrt(n): Gaussian vector rescaled to
// the exact norm. This is the infinite-temperature initial condition.
SpinState random_sphere_config(int n, std::uint64_t seed);

// E = -sum_{i<j<k} J_ijk s_i s_j s_k
double energy(const CouplingTensor& J, const SpinState& s);

// Component i of the energy gradient: -sum_{j<k, both != i} J_ijk s_j s_k.
std::vector<double> grad_energy(const CouplingTensor& J, const SpinState& s);

// One pass computing both; the simulation loop uses this.
void energy_and_grad(const CouplingTensor& J, const std::vector<double>& sigma,
                     double& energy_out, std::vector<double>& grad_out);

// Euler-Maruyama update s' = s - dt*grad E + sqrt(2 T dt)*eta followed by
// exact renormalization back to the sphere. Throws DivergenceError on
// non-finite values, naming the time stamp.
void langevin_step(SpinState& s, const CouplingTensor& J, double temperature,
                   double dt, Rng& noise);

// Full quench: random initial condition, n_steps = t_max/dt Langevin steps,
// energy per spin logged and the configuration deep-copied at t = 0 and at
// every scheduled time. schedule_ticks are step indices (time = tick * dt).
struct QuenchResult {
    ObservableLog log;        // columns: t, energy_per_spin
    SnapshotSeries snapshots; // sigma at t = 0 and each scheduled time
};

QuenchResult run_quench(const PspinParams& params, const Schedule& schedule);

}  // namespace quenchlab

#endif
