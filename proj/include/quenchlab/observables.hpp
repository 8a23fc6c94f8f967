#ifndef QUENCHLAB_OBSERVABLES_HPP
#define QUENCHLAB_OBSERVABLES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace quenchlab {

// Exponentially spaced measurement ticks. Ticks are integers (SGD iterations,
// or Langevin step counts to be multiplied by dt); the log spacing keeps the
// measurement overhead flat in log-time.
struct Schedule {
    std::vector<std::int64_t> ticks;  // strictly increasing, deduplicated
};

// ticks = unique round(first_step * base^k), capped at t_max, t_max included.
Schedule log_schedule(std::int64_t t_max, double base, std::int64_t first_step);

// Time-indexed measurement table: one named column per observable, one row
// per scheduled time. Column 0 is always the time stamp.
struct ObservableLog {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Mean squared componentwise difference between two configurations.
double msd(const std::vector<double>& a, const std::vector<double>& b);

struct MsdPoint {
    double t;      // time lag since tw
    double delta;  // displacement value
};

struct MsdCurve {
    double tw;
    std::vector<MsdPoint> points;       // strictly increasing t
    std::optional<double> noise;        // D(tw) when rescaling applies
};

struct MsdCurveSet {
    std::string system;  // "spins" or "weights"
    std::vector<MsdCurve> curves;
};

// Configuration snapshots of one run, in time order.
struct SnapshotSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> configs;
};

// One curve per waiting time: (t, msd(config(tw), config(tw + t))) for every
// later snapshot. Every tw must be one of the snapshot time stamps.
MsdCurveSet msd_curves(const SnapshotSeries& snapshots,
                       const std::vector<double>& tw_list,
                       const std::string& system);

// Gradient-noise strength per waiting time.
struct NoiseSeries {
    std::vector<std::pair<double, double>> values;  // (tw, D)
};

}  // namespace quenchlab

#endif
