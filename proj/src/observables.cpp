#include "quenchlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quenchlab {

Schedule log_schedule(std::int64_t t_max, double base, std::int64_t first_step) {
    if (first_step <= 0 || t_max < first_step)
        throw std::invalid_argument("log_schedule: need t_max >= first_step > 0");
    if (!(base > 1.0))
        throw std::invalid_argument("log_schedule: base must be > 1");

    Schedule s;
    double value = static_cast<double>(first_step);
    while (true) {
        const std::int64_t tick = std::llround(value);
        if (tick >= t_max) break;
        if (s.ticks.empty() || tick > s.ticks.back()) s.ticks.push_back(tick);
        value *= base;
    }
    s.ticks.push_back(t_max);
    return s;
}

double msd(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("msd: configuration lengths differ (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

MsdCurveSet msd_curves(const SnapshotSeries& snapshots,
                       const std::vector<double>& tw_list,
                       const std::string& system) {
    MsdCurveSet set;
    set.system = system;
    for (const double tw : tw_list) {
        auto it = std::find(snapshots.times.begin(), snapshots.times.end(), tw);
        if (it == snapshots.times.end()) {
            std::ostringstream msg;
            msg << "msd_curves: tw=" << tw << " was not snapshotted; available:";
            for (const double t : snapshots.times) msg << ' ' << t;
            throw std::invalid_argument(msg.str());
        }
        const std::size_t start = static_cast<std::size_t>(it - snapshots.times.begin());
        MsdCurve curve;
        curve.tw = tw;
        for (std::size_t j = start + 1; j < snapshots.times.size(); ++j) {
            curve.points.push_back({snapshots.times[j] - tw,
                                    msd(snapshots.configs[start], snapshots.configs[j])});
        }
        if (!curve.points.empty()) set.curves.push_back(std::move(curve));
    }
    return set;
}

}  // namespace quenchlab
