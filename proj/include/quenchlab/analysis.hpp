#ifndef QUENCHLAB_ANALYSIS_HPP
#define QUENCHLAB_ANALYSIS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "quenchlab/observables.hpp"

namespace quenchlab {

// Everything the analysis stage extracts from one run.
struct RegimeReport {
    std::optional<double> t1;             // end of the initial exploration regime
    std::optional<double> t2;             // loss reaches its floor / descent ends
    std::optional<double> collapse_pre;   // spread of raw curves with tw < t2
    std::optional<double> collapse_post;  // spread of rescaled curves with tw > t2
    std::optional<double> late_slope;     // log-log slope of the late-time displacement
    std::optional<double> plateau_q;      // shared flat level of the curves, if any
};

// Tunables for the detectors; defaults are deliberately loose so soft
// crossovers still register.
struct AnalysisParams {
    double theta = 0.2;          // slope threshold, fraction of the steepest descent
    double eps_loss = 0.05;      // "loss reached its floor" margin
    int tw_stride = 4;           // curve grid: every 4th schedule point
    int points_per_decade = 20;  // common interpolation grid density
};

// Crossover times of a loss curve sampled on a log-spaced schedule.
// The centered moving-window slope s(t) = dLoss/d(ln t) is compared with the
// steepest descent slope s0: t1 is the first time s drops below -theta*s0,
// t2 the first later time the loss comes within eps_loss of its minimum or
// the slope flattens back below theta*s0 in magnitude. Both detectors are
// invariant under adding a constant to the whole curve. Needs >= 10 points.
std::pair<std::optional<double>, std::optional<double>> detect_regimes(
    const std::vector<std::pair<double, double>>& loss_curve, double theta = 0.2,
    double eps_loss = 0.05);

// Divide each curve by its D(tw). Every tw needs a matching noise entry and
// D(tw) > 0; violations throw std::invalid_argument.
MsdCurveSet rescale_by_noise(const MsdCurveSet& curves, const NoiseSeries& noise);

// Mean, over a common geometric t grid, of the across-curve population
// variance of ln(delta). 0 means perfect collapse. Requires >= 2 curves with
// overlapping positive t support.
double collapse_score(const MsdCurveSet& curves, int points_per_decade = 20);

// Least-squares slope of ln(delta) vs ln(t) over the last decade of the
// curve. Requires >= 5 points in the window.
double fit_late_slope(const MsdCurve& curve);

// Shared flat region: an interval of at least half a decade in t where at
// least one pair of curves simultaneously has |d ln delta / d ln t| below
// 0.1. Returns the mean delta over the region, or nothing.
std::optional<double> estimate_plateau(const MsdCurveSet& curves, int points_per_decade = 20);

}  // namespace quenchlab

#endif
