#include "quenchlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quenchlab {

namespace {

// OLS slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

// Piecewise-linear interpolation of ln(delta) in ln(t); queries are clamped
// to the curve's support.
class LogLogCurve {
public:
    explicit LogLogCurve(const MsdCurve& curve) {
        if (curve.points.size() < 2)
            throw std::invalid_argument("analysis: curve needs at least 2 points");
        for (const auto& p : curve.points) {
            if (!(p.t > 0.0))
                throw std::invalid_argument("analysis: curve has nonpositive t");
            if (!(p.delta > 0.0))
                throw std::invalid_argument("analysis: curve has nonpositive delta");
            lt_.push_back(std::log(p.t));
            ld_.push_back(std::log(p.delta));
        }
    }

    double t_min() const { return std::exp(lt_.front()); }
    double t_max() const { return std::exp(lt_.back()); }
    double lt_min() const { return lt_.front(); }
    double lt_max() const { return lt_.back(); }

    double log_delta(double lt) const {
        if (lt <= lt_.front()) return ld_.front();
        if (lt >= lt_.back()) return ld_.back();
        const auto it = std::upper_bound(lt_.begin(), lt_.end(), lt);
        const std::size_t hi = static_cast<std::size_t>(it - lt_.begin());
        const std::size_t lo = hi - 1;
        const double f = (lt - lt_[lo]) / (lt_[hi] - lt_[lo]);
        return ld_[lo] + f * (ld_[hi] - ld_[lo]);
    }

    // Slope of the segment containing lt.
    double slope_at(double lt) const {
        std::size_t hi = static_cast<std::size_t>(
            std::upper_bound(lt_.begin(), lt_.end(), lt) - lt_.begin());
        hi = std::clamp<std::size_t>(hi, 1, lt_.size() - 1);
        return (ld_[hi] - ld_[hi - 1]) / (lt_[hi] - lt_[hi - 1]);
    }

    // Local slope from an OLS fit over a quarter-decade window around lt.
    // Measured displacement curves fluctuate point to point; a raw segment
    // slope on such data is noise, same problem the loss-curve detector has.
    double smoothed_slope_at(double lt) const {
        const double half = 0.25 * std::log(10.0);
        std::vector<double> wx, wy;
        for (std::size_t i = 0; i < lt_.size(); ++i) {
            if (std::abs(lt_[i] - lt) <= half) {
                wx.push_back(lt_[i]);
                wy.push_back(ld_[i]);
            }
        }
        if (wx.size() < 3) return slope_at(lt);
        return ols_slope(wx, wy);
    }

private:
    std::vector<double> lt_, ld_;
};

}  // namespace

std::pair<std::optional<double>, std::optional<double>> detect_regimes(
    const std::vector<std::pair<double, double>>& loss_curve, double theta, double eps_loss) {
    const std::size_t n = loss_curve.size();
    if (n < 10) throw std::invalid_argument("detect_regimes: need at least 10 points");

    std::vector<double> lt(n), loss(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(loss_curve[i].first > 0.0))
            throw std::invalid_argument("detect_regimes: times must be positive");
        lt[i] = std::log(loss_curve[i].first);
        loss[i] = loss_curve[i].second;
    }

    // centered moving-window slope, half-width 4 (clamped at the ends)
    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 4 ? i - 4 : 0;
        const std::size_t hi = std::min(i + 4, n - 1);
        std::vector<double> wx(lt.begin() + lo, lt.begin() + hi + 1);
        std::vector<double> wy(loss.begin() + lo, loss.begin() + hi + 1);
        slope[i] = ols_slope(wx, wy);
    }

    double s0 = 0.0;
    for (const double s : slope) s0 = std::max(s0, -s);
    // rounding noise on a flat curve produces slopes at the 1e-16 level
    double loss_scale = 0.0;
    for (const double v : loss) loss_scale = std::max(loss_scale, std::abs(v));
    if (s0 <= 1e-12 * std::max(loss_scale, 1e-300)) return {std::nullopt, std::nullopt};

    std::optional<double> t1, t2;
    std::size_t i1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (slope[i] < -theta * s0) {
            t1 = loss_curve[i].first;
            i1 = i;
            break;
        }
    }
    if (!t1) return {std::nullopt, std::nullopt};

    // floor margin relative to the curve minimum keeps the detector
    // shift-invariant (energy traces do not end at zero). The flattening
    // clause must hold for 3 consecutive windows; a single sub-threshold
    // slope estimate is indistinguishable from measurement noise.
    const double floor = *std::min_element(loss.begin(), loss.end());
    for (std::size_t i = i1 + 1; i < n; ++i) {
        if (loss[i] - floor < eps_loss) {
            t2 = loss_curve[i].first;
            break;
        }
        if (std::abs(slope[i]) < theta * s0 && i + 2 < n &&
            std::abs(slope[i + 1]) < theta * s0 && std::abs(slope[i + 2]) < theta * s0) {
            t2 = loss_curve[i].first;
            break;
        }
    }
    return {t1, t2};
}

MsdCurveSet rescale_by_noise(const MsdCurveSet& curves, const NoiseSeries& noise) {
    MsdCurveSet out;
    out.system = curves.system;
    for (const auto& curve : curves.curves) {
        const auto it = std::find_if(noise.values.begin(), noise.values.end(),
                                     [&](const auto& p) { return p.first == curve.tw; });
        if (it == noise.values.end())
            throw std::invalid_argument("rescale_by_noise: no D value for tw=" +
                                        std::to_string(curve.tw));
        const double d = it->second;
        if (!(d > 0.0))
            throw std::invalid_argument("rescale_by_noise: D(tw=" + std::to_string(curve.tw) +
                                        ") is not positive");
        MsdCurve scaled;
        scaled.tw = curve.tw;
        scaled.noise = d;
        scaled.points.reserve(curve.points.size());
        for (const auto& p : curve.points) scaled.points.push_back({p.t, p.delta / d});
        out.curves.push_back(std::move(scaled));
    }
    return out;
}

double collapse_score(const MsdCurveSet& curves, int points_per_decade) {
    if (curves.curves.size() < 2)
        throw std::invalid_argument("collapse_score: need at least 2 curves");

    std::vector<LogLogCurve> interp;
    for (const auto& c : curves.curves) interp.emplace_back(c);

    double lo = interp[0].lt_min(), hi = interp[0].lt_max();
    for (const auto& c : interp) {
        lo = std::max(lo, c.lt_min());
        hi = std::min(hi, c.lt_max());
    }
    if (!(hi > lo)) throw std::invalid_argument("collapse_score: curves share no t support");

    const double decades = (hi - lo) / std::log(10.0);
    const int n_pts = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);

    double total = 0.0;
    for (int g = 0; g < n_pts; ++g) {
        const double lt = lo + (hi - lo) * g / (n_pts - 1);
        double mean = 0.0;
        for (const auto& c : interp) mean += c.log_delta(lt);
        mean /= interp.size();
        double var = 0.0;
        for (const auto& c : interp) {
            const double d = c.log_delta(lt) - mean;
            var += d * d;
        }
        total += var / interp.size();
    }
    return total / n_pts;
}

double fit_late_slope(const MsdCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("fit_late_slope: empty curve");
    const double t_hi = curve.points.back().t;
    const double t_lo = t_hi / 10.0;
    std::vector<double> lt, ld;
    for (const auto& p : curve.points) {
        if (p.t < t_lo) continue;
        if (!(p.t > 0.0) || !(p.delta > 0.0))
            throw std::invalid_argument("fit_late_slope: nonpositive point");
        lt.push_back(std::log(p.t));
        ld.push_back(std::log(p.delta));
    }
    if (lt.size() < 5)
        throw std::invalid_argument("fit_late_slope: fewer than 5 points in the last decade");
    return ols_slope(lt, ld);
}

std::optional<double> estimate_plateau(const MsdCurveSet& curves, int points_per_decade) {
    const double flat_threshold = 0.1;
    const double min_span = 0.5 * std::log(10.0);

    // curves that cannot be interpolated in log-log (too short, zero delta)
    // simply cannot testify about a plateau
    std::vector<LogLogCurve> interp;
    for (const auto& c : curves.curves) {
        try {
            interp.emplace_back(c);
        } catch (const std::invalid_argument&) {
        }
    }
    if (interp.size() < 2) return std::nullopt;

    std::vector<double> levels;
    for (std::size_t a = 0; a < interp.size(); ++a) {
        for (std::size_t b = a + 1; b < interp.size(); ++b) {
            const double lo = std::max(interp[a].lt_min(), interp[b].lt_min());
            const double hi = std::min(interp[a].lt_max(), interp[b].lt_max());
            if (!(hi - lo >= min_span)) continue;

            const int n_iv = std::max(
                1, static_cast<int>(std::ceil((hi - lo) / std::log(10.0) * points_per_decade)));
            const double step = (hi - lo) / n_iv;

            int run_start = -1;
            auto harvest = [&](int first, int last) {  // intervals [first, last)
                if (first < 0) return;
                const double span = (last - first) * step;
                if (span < min_span) return;
                for (int g = first; g <= last; ++g) {
                    const double lt = lo + g * step;
                    levels.push_back(std::exp(interp[a].log_delta(lt)));
                    levels.push_back(std::exp(interp[b].log_delta(lt)));
                }
            };
            for (int g = 0; g < n_iv; ++g) {
                const double mid = lo + (g + 0.5) * step;
                const bool flat = std::abs(interp[a].smoothed_slope_at(mid)) < flat_threshold &&
                                  std::abs(interp[b].smoothed_slope_at(mid)) < flat_threshold;
                if (flat && run_start < 0) run_start = g;
                if (!flat) {
                    harvest(run_start, g);
                    run_start = -1;
                }
            }
            harvest(run_start, n_iv);
        }
    }
    if (levels.empty()) return std::nullopt;
    double mean = 0.0;
    for (const double v : levels) mean += v;
    return mean / levels.size();
}

}  // namespace quenchlab
