#include "quenchlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "quenchlab/analysis.hpp"
#include "quenchlab/csvio.hpp"
#include "quenchlab/errors.hpp"
#include "quenchlab/svgplot.hpp"

namespace fs = std::filesystem;

namespace quenchlab {

namespace {

constexpr const char* kCodeVersion = "quenchlab 1.0.0";

const std::vector<std::string> kMsdHeader = {"system", "run_id", "tw",  "t",
                                             "delta",  "D_tw",   "delta_over_D"};
const std::vector<std::string> kNoiseHeader = {"run_id", "tw", "D"};
const std::vector<std::string> kTrainLossHeader = {"t", "train_loss", "test_loss", "train_acc",
                                                   "test_acc"};
const std::vector<std::string> kPspinLossHeader = {"t", "energy_per_spin"};
const std::vector<std::string> kReportHeader = {"run_id",       "t1",         "t2",
                                                "collapse_pre", "collapse_post", "late_slope",
                                                "plateau_q"};
const std::vector<std::string> kSweepHeader = {"sweep_value", "final_train_loss", "t1",
                                               "t2",          "collapse_post",    "plateau_q"};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& dir, const std::string& run_id,
                    const ExperimentConfig& cfg, const std::string& started,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["run_id"] = run_id;
    j["code_version"] = kCodeVersion;
    j["config"] = cfg.canonical_text();
    j["started"] = started;
    j["finished"] = utc_now();
    j["outputs"] = outputs;
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    if (!f) throw IoError((dir / "manifest.json").string() + ": cannot open file for writing");
    f << j.dump(2) << '\n';
}

// Runs fn(0..n_jobs-1) on a fixed-size pool; results must be written into
// per-job slots so the merge order never depends on scheduling. The
// lowest-index exception is rethrown once all workers finish.
void parallel_for(int n_jobs, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_jobs));
    if (threads == 1) {
        for (int i = 0; i < n_jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_jobs));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n_jobs;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

// every tw_stride-th schedule time, dropping the final point (it has no
// later snapshot to compare against)
std::vector<double> tw_grid(const std::vector<double>& schedule_times, int stride) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < schedule_times.size(); i += static_cast<std::size_t>(stride))
        if (i + 1 < schedule_times.size()) grid.push_back(schedule_times[i]);
    return grid;
}

CsvTable msd_to_table(const MsdCurveSet& set, const std::string& run_id) {
    CsvTable t;
    t.header = kMsdHeader;
    for (const auto& curve : set.curves) {
        for (const auto& p : curve.points) {
            std::string d_cell, ratio_cell;
            if (curve.noise) {
                d_cell = format_double(*curve.noise);
                if (*curve.noise > 0.0) ratio_cell = format_double(p.delta / *curve.noise);
            }
            t.rows.push_back({set.system, run_id, format_double(curve.tw), format_double(p.t),
                              format_double(p.delta), d_cell, ratio_cell});
        }
    }
    return t;
}

struct LoadedRun {
    CsvTable loss;
    bool is_train = false;
    std::string run_id;
    MsdCurveSet curves;        // raw curves grouped by tw
    std::optional<NoiseSeries> noise;
};

LoadedRun load_run_dir(const fs::path& dir) {
    LoadedRun run;
    const std::string loss_path = (dir / "loss_curve.csv").string();
    run.loss = read_csv(loss_path);
    if (run.loss.header == kTrainLossHeader) {
        run.is_train = true;
    } else if (run.loss.header == kPspinLossHeader) {
        run.is_train = false;
    } else {
        throw IoError(loss_path + ": header matches neither the train nor the quench schema");
    }

    const std::string msd_path = (dir / "msd.csv").string();
    CsvTable msd_table = read_csv(msd_path);
    expect_header(msd_table, kMsdHeader, msd_path);
    std::map<double, MsdCurve> by_tw;
    for (std::size_t r = 0; r < msd_table.rows.size(); ++r) {
        const double tw = cell_as_double(msd_table, r, 2, msd_path);
        const double t = cell_as_double(msd_table, r, 3, msd_path);
        const double delta = cell_as_double(msd_table, r, 4, msd_path);
        auto& curve = by_tw[tw];
        curve.tw = tw;
        if (!curve.points.empty() && t <= curve.points.back().t)
            throw IoError(msd_path + ": row " + std::to_string(r + 2) +
                          ": t not strictly increasing within tw group");
        curve.points.push_back({t, delta});
        if (run.run_id.empty()) run.run_id = msd_table.rows[r][1];
        run.curves.system = msd_table.rows[r][0];
    }
    for (auto& [tw, curve] : by_tw) run.curves.curves.push_back(std::move(curve));

    const fs::path noise_path = dir / "noise.csv";
    if (fs::exists(noise_path)) {
        CsvTable noise_table = read_csv(noise_path.string());
        expect_header(noise_table, kNoiseHeader, noise_path.string());
        NoiseSeries ns;
        for (std::size_t r = 0; r < noise_table.rows.size(); ++r)
            ns.values.emplace_back(cell_as_double(noise_table, r, 1, noise_path.string()),
                                   cell_as_double(noise_table, r, 2, noise_path.string()));
        run.noise = std::move(ns);
        if (run.run_id.empty() && !noise_table.rows.empty()) run.run_id = noise_table.rows[0][0];
    }
    return run;
}

}  // namespace

std::string resolve_out_dir(const RunnerOptions& opts, const std::string& run_id) {
    if (const char* env = std::getenv("QUENCHLAB_OUT"); env && *env) return env;
    if (!opts.out_dir.empty()) return opts.out_dir;
    return (fs::path("runs") / run_id).string();
}

Dataset build_train_split(const TrainRunConfig& tc) {
    if (tc.dataset == DatasetKind::Mnist || tc.dataset == DatasetKind::MnistParity) {
        Dataset d = load_idx(tc.mnist_images, tc.mnist_labels, "train");
        if (tc.dataset == DatasetKind::MnistParity) relabel_parity(d);
        return d;
    }
    const auto mode = tc.dataset == DatasetKind::SyntheticSeparable ? SyntheticMode::Separable
                                                                    : SyntheticMode::RandomLabels;
    // one draw covering both splits, so train and test share the hyperplane
    Dataset full = gen_synthetic(tc.n_samples + tc.test_samples, tc.train.arch.input_dim, mode,
                                 tc.train.data_seed, "train");
    Dataset train;
    train.n_samples = tc.n_samples;
    train.dim = full.dim;
    train.split = "train";
    train.features.assign(full.features.begin(),
                          full.features.begin() + static_cast<std::size_t>(tc.n_samples) * full.dim);
    train.labels.assign(full.labels.begin(), full.labels.begin() + tc.n_samples);
    return train;
}

Dataset build_test_split(const TrainRunConfig& tc) {
    if (tc.dataset == DatasetKind::Mnist || tc.dataset == DatasetKind::MnistParity) {
        const std::string imgs = tc.mnist_test_images.empty() ? tc.mnist_images : tc.mnist_test_images;
        const std::string labs = tc.mnist_test_labels.empty() ? tc.mnist_labels : tc.mnist_test_labels;
        Dataset d = load_idx(imgs, labs, "test");
        if (tc.dataset == DatasetKind::MnistParity) relabel_parity(d);
        return d;
    }
    const auto mode = tc.dataset == DatasetKind::SyntheticSeparable ? SyntheticMode::Separable
                                                                    : SyntheticMode::RandomLabels;
    Dataset full = gen_synthetic(tc.n_samples + tc.test_samples, tc.train.arch.input_dim, mode,
                                 tc.train.data_seed, "test");
    Dataset test;
    test.n_samples = tc.test_samples;
    test.dim = full.dim;
    test.split = "test";
    test.features.assign(full.features.begin() + static_cast<std::size_t>(tc.n_samples) * full.dim,
                         full.features.end());
    test.labels.assign(full.labels.begin() + tc.n_samples, full.labels.end());
    return test;
}

std::string cmd_pspin(const ExperimentConfig& cfg, const RunnerOptions& opts) {
    if (!cfg.pspin) throw ConfigError("pspin subcommand needs a [pspin] section");
    const PspinRunConfig& pc = *cfg.pspin;
    const std::string run_id = cfg.run_id();
    const std::string started = utc_now();
    const fs::path dir = resolve_out_dir(opts, run_id);
    fs::create_directories(dir);

    const std::int64_t n_steps = std::llround(pc.params.t_max / pc.params.dt);
    Schedule schedule;
    if (n_steps > 0) {
        if (cfg.schedule.first_step > n_steps)
            throw ConfigError("pspin: first schedule point " +
                              std::to_string(cfg.schedule.first_step) + " is beyond t_max (" +
                              std::to_string(n_steps) + " steps)");
        schedule = log_schedule(n_steps, cfg.schedule.base, cfg.schedule.first_step);
    }

    std::vector<QuenchResult> results(static_cast<std::size_t>(pc.realizations));
    parallel_for(pc.realizations, opts.threads, [&](int r) {
        PspinParams p = pc.params;
        p.disorder_seed = derive_seed(pc.params.disorder_seed, static_cast<std::uint64_t>(r));
        p.init_seed = derive_seed(pc.params.init_seed, static_cast<std::uint64_t>(r));
        p.noise_seed = derive_seed(pc.params.noise_seed, static_cast<std::uint64_t>(r));
        try {
            results[static_cast<std::size_t>(r)] = run_quench(p, schedule);
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " (realization " + std::to_string(r) + ")");
        }
    });

    // disorder-averaged energy trace
    CsvTable loss;
    loss.header = kPspinLossHeader;
    const auto& times = results[0].snapshots.times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double mean = 0.0;
        for (const auto& res : results) mean += res.log.rows[i][1];
        mean /= pc.realizations;
        loss.rows.push_back({format_double(times[i]), format_double(mean)});
    }
    write_csv((dir / "loss_curve.csv").string(), loss);

    // disorder-averaged displacement curves on the shared schedule
    std::vector<double> schedule_times;
    for (const auto tick : schedule.ticks)
        schedule_times.push_back(static_cast<double>(tick) * pc.params.dt);
    MsdCurveSet averaged;
    averaged.system = "spins";
    for (const double tw : tw_grid(schedule_times, cfg.analysis.tw_stride)) {
        MsdCurve mean_curve;
        for (int r = 0; r < pc.realizations; ++r) {
            const auto set = msd_curves(results[static_cast<std::size_t>(r)].snapshots, {tw}, "spins");
            if (set.curves.empty()) break;
            const auto& c = set.curves[0];
            if (r == 0) {
                mean_curve.tw = tw;
                mean_curve.points = c.points;
                for (auto& p : mean_curve.points) p.delta = 0.0;
            }
            for (std::size_t k = 0; k < c.points.size(); ++k)
                mean_curve.points[k].delta += c.points[k].delta / pc.realizations;
        }
        if (!mean_curve.points.empty()) averaged.curves.push_back(std::move(mean_curve));
    }
    write_csv((dir / "msd.csv").string(), msd_to_table(averaged, run_id));

    write_manifest(dir, run_id, cfg, started, {"loss_curve.csv", "msd.csv"});
    return dir.string();
}

std::string cmd_train(const ExperimentConfig& cfg, const RunnerOptions& opts) {
    if (!cfg.train) throw ConfigError("train subcommand needs a [train] section");
    const TrainRunConfig& tc = *cfg.train;
    const std::string run_id = cfg.run_id();
    const std::string started = utc_now();
    const fs::path dir = resolve_out_dir(opts, run_id);
    fs::create_directories(dir);

    const Dataset train_set = build_train_split(tc);
    const Dataset test_set = build_test_split(tc);

    Schedule schedule;
    if (tc.train.max_iterations > 0) {
        if (cfg.schedule.first_step > tc.train.max_iterations)
            throw ConfigError("train: first schedule point " +
                              std::to_string(cfg.schedule.first_step) +
                              " is beyond max_iterations (" +
                              std::to_string(tc.train.max_iterations) + ")");
        schedule = log_schedule(tc.train.max_iterations, cfg.schedule.base, cfg.schedule.first_step);
    }

    TrainConfig train_cfg = tc.train;
    train_cfg.noise_subset_size = std::min(train_cfg.noise_subset_size, train_set.n_samples);
    const TrainResult result = train_run(train_cfg, train_set, test_set, schedule);

    CsvTable loss;
    loss.header = kTrainLossHeader;
    for (const auto& row : result.log.rows) {
        std::vector<std::string> cells;
        for (const double v : row) cells.push_back(format_double(v));
        loss.rows.push_back(std::move(cells));
    }
    write_csv((dir / "loss_curve.csv").string(), loss);

    CsvTable noise;
    noise.header = kNoiseHeader;
    for (const auto& [tw, d] : result.noise.values)
        noise.rows.push_back({run_id, format_double(tw), format_double(d)});
    write_csv((dir / "noise.csv").string(), noise);

    std::vector<double> schedule_times;
    for (const auto tick : schedule.ticks) schedule_times.push_back(static_cast<double>(tick));
    MsdCurveSet curves =
        msd_curves(result.snapshots, tw_grid(schedule_times, cfg.analysis.tw_stride), "weights");
    for (auto& curve : curves.curves) {
        for (const auto& [tw, d] : result.noise.values)
            if (tw == curve.tw) curve.noise = d;
    }
    write_csv((dir / "msd.csv").string(), msd_to_table(curves, run_id));

    write_snapshots((dir / "snapshots.bin").string(), result.snapshots);

    write_manifest(dir, run_id, cfg, started,
                   {"loss_curve.csv", "noise.csv", "msd.csv", "snapshots.bin"});
    return dir.string();
}

void cmd_analyze(const std::string& run_dir, const AnalysisConfig& params) {
    const fs::path dir = run_dir;
    const LoadedRun run = load_run_dir(dir);

    RegimeReport report;

    // crossover times from the loss (or energy) trace, t > 0 points only
    std::vector<std::pair<double, double>> trace;
    for (std::size_t r = 0; r < run.loss.rows.size(); ++r) {
        const double t = cell_as_double(run.loss, r, 0, (dir / "loss_curve.csv").string());
        const double v = cell_as_double(run.loss, r, 1, (dir / "loss_curve.csv").string());
        if (t > 0.0) trace.emplace_back(t, v);
    }
    if (trace.size() >= 10) {
        const auto [t1, t2] = detect_regimes(trace, params.theta, params.eps_loss);
        report.t1 = t1;
        report.t2 = t2;
    }

    MsdCurveSet pre, post;
    pre.system = post.system = run.curves.system;
    for (const auto& curve : run.curves.curves) {
        if (!report.t2 || curve.tw < *report.t2) pre.curves.push_back(curve);
        if (report.t2 && curve.tw > *report.t2) post.curves.push_back(curve);
    }

    try {
        if (pre.curves.size() >= 2) report.collapse_pre = collapse_score(pre, params.points_per_decade);
    } catch (const std::invalid_argument&) {}

    // the post-descent family: rescaled by D(tw) when noise is available
    MsdCurveSet post_family = post;
    std::optional<MsdCurveSet> post_rescaled;
    if (run.noise && !post.curves.empty()) {
        try {
            post_rescaled = rescale_by_noise(post, *run.noise);
            post_family = *post_rescaled;
        } catch (const std::invalid_argument&) {}
    }
    try {
        if (post_family.curves.size() >= 2)
            report.collapse_post = collapse_score(post_family, params.points_per_decade);
    } catch (const std::invalid_argument&) {}

    // late-time exponent: median over the post-descent curves
    {
        std::vector<double> slopes;
        const MsdCurveSet& family = post_family.curves.empty() ? run.curves : post_family;
        for (const auto& curve : family.curves) {
            try {
                slopes.push_back(fit_late_slope(curve));
            } catch (const std::invalid_argument&) {}
        }
        if (!slopes.empty()) {
            std::sort(slopes.begin(), slopes.end());
            report.late_slope = slopes[slopes.size() / 2];
        }
    }

    // plateau detection runs on the raw (unrescaled) late-time curves
    {
        const MsdCurveSet& family = post.curves.empty() ? run.curves : post;
        try {
            report.plateau_q = estimate_plateau(family, params.points_per_decade);
        } catch (const std::invalid_argument&) {}
    }

    CsvTable out;
    out.header = kReportHeader;
    out.rows.push_back({run.run_id, opt_cell(report.t1), opt_cell(report.t2),
                        opt_cell(report.collapse_pre), opt_cell(report.collapse_post),
                        opt_cell(report.late_slope), opt_cell(report.plateau_q)});
    write_csv((dir / "regime_report.csv").string(), out);

    // figure families
    {
        PlotSpec spec;
        spec.title = run.is_train ? "loss vs log t" : "energy per spin vs log t";
        spec.x_label = "t";
        spec.y_label = run.is_train ? "loss" : "E/N";
        spec.log_x = true;
        PlotSeries train_series;
        train_series.label = run.is_train ? "train" : "E/N";
        PlotSeries test_series;
        test_series.label = "test";
        for (const auto& [t, v] : trace) train_series.points.emplace_back(t, v);
        if (run.is_train) {
            for (std::size_t r = 0; r < run.loss.rows.size(); ++r) {
                const double t = cell_as_double(run.loss, r, 0, "loss_curve.csv");
                if (t > 0.0)
                    test_series.points.emplace_back(t,
                                                    cell_as_double(run.loss, r, 2, "loss_curve.csv"));
            }
        }
        spec.series.push_back(std::move(train_series));
        if (run.is_train) spec.series.push_back(std::move(test_series));
        write_svg_plot((dir / "loss_curve.svg").string(), spec);
    }
    {
        PlotSpec spec;
        spec.title = "mean square displacement";
        spec.x_label = "t";
        spec.y_label = "delta";
        spec.log_x = spec.log_y = true;
        for (const auto& curve : run.curves.curves) {
            PlotSeries s;
            s.label = "tw=" + format_double(curve.tw);
            for (const auto& p : curve.points) s.points.emplace_back(p.t, p.delta);
            spec.series.push_back(std::move(s));
        }
        write_svg_plot((dir / "msd.svg").string(), spec);
    }
    if (run.noise) {
        PlotSpec spec;
        spec.title = "rescaled mean square displacement";
        spec.x_label = "t";
        spec.y_label = "delta / D(tw)";
        spec.log_x = spec.log_y = true;
        MsdCurveSet all_rescaled;
        try {
            all_rescaled = rescale_by_noise(run.curves, *run.noise);
        } catch (const std::invalid_argument&) {}
        for (const auto& curve : all_rescaled.curves) {
            PlotSeries s;
            s.label = "tw=" + format_double(curve.tw);
            for (const auto& p : curve.points) s.points.emplace_back(p.t, p.delta);
            spec.series.push_back(std::move(s));
        }
        write_svg_plot((dir / "msd_rescaled.svg").string(), spec);
    }
}

std::string cmd_sweep(const ExperimentConfig& cfg, const RunnerOptions& opts) {
    if (!cfg.sweep) throw ConfigError("sweep subcommand needs a [sweep] section");
    if (!cfg.train) throw ConfigError("sweep subcommand needs a [train] section");

    const std::string run_id = cfg.run_id();
    const std::string started = utc_now();
    const fs::path dir = resolve_out_dir(opts, run_id);
    fs::create_directories(dir);

    std::vector<double> values = cfg.sweep->values;
    std::sort(values.begin(), values.end());

    struct PointOutcome {
        std::string dir;
        std::string error;
    };
    std::vector<PointOutcome> outcomes(values.size());

    parallel_for(static_cast<int>(values.size()), opts.threads, [&](int i) {
        const double value = values[static_cast<std::size_t>(i)];
        ExperimentConfig point = cfg;
        point.sweep.reset();
        TrainRunConfig& tc = *point.train;
        if (cfg.sweep->parameter == "hidden_size")
            tc.train.arch.hidden_sizes = {static_cast<int>(value)};
        else if (cfg.sweep->parameter == "batch_size")
            tc.train.batch_size = static_cast<int>(value);
        else if (cfg.sweep->parameter == "learning_rate")
            tc.train.learning_rate = value;
        else if (cfg.sweep->parameter == "noise_subset_size")
            tc.train.noise_subset_size = static_cast<int>(value);

        RunnerOptions point_opts;
        point_opts.threads = 1;
        point_opts.out_dir = (dir / ("sweep_" + format_double(value))).string();
        auto& outcome = outcomes[static_cast<std::size_t>(i)];
        try {
            outcome.dir = cmd_train(point, point_opts);
            cmd_analyze(outcome.dir, point.analysis);
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    });

    CsvTable sweep;
    sweep.header = kSweepHeader;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<std::string> row(kSweepHeader.size());
        row[0] = format_double(values[i]);
        if (outcomes[i].error.empty()) {
            const fs::path pdir = outcomes[i].dir;
            const CsvTable loss = read_csv((pdir / "loss_curve.csv").string());
            if (!loss.rows.empty())
                row[1] = loss.rows.back()[1];  // final train loss
            const CsvTable report = read_csv((pdir / "regime_report.csv").string());
            if (!report.rows.empty()) {
                row[2] = report.rows[0][1];  // t1
                row[3] = report.rows[0][2];  // t2
                row[4] = report.rows[0][4];  // collapse_post
                row[5] = report.rows[0][6];  // plateau_q
            }
        }
        sweep.rows.push_back(std::move(row));
    }
    write_csv((dir / "sweep.csv").string(), sweep);

    write_manifest(dir, run_id, cfg, started, {"sweep.csv"});
    return dir.string();
}

}  // namespace quenchlab
