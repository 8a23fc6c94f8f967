#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "quenchlab/errors.hpp"
#include "quenchlab/runner.hpp"

namespace {

// 0 success, 2 config error, 3 numerical divergence, 4 IO error
int run(int argc, char** argv) {
    CLI::App app{"quenchlab: glassy quenches and SGD training under one measurement pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        sub->add_option("--config", config_path, "experiment config file")
            ->required(config_required);
        sub->add_option("--out-dir", out_dir, "output directory (env QUENCHLAB_OUT overrides)");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    };

    CLI::App* pspin = app.add_subcommand("pspin", "run a Langevin quench of the 3-spin model");
    add_common(pspin, true);
    CLI::App* train = app.add_subcommand("train", "run an SGD training experiment");
    add_common(train, true);
    CLI::App* analyze = app.add_subcommand("analyze", "analyze the artifacts of a finished run");
    add_common(analyze, false);
    CLI::App* sweep = app.add_subcommand("sweep", "train/analyze across a parameter sweep");
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    quenchlab::RunnerOptions opts;
    opts.out_dir = out_dir;
    opts.threads = threads;

    if (pspin->parsed()) {
        const auto cfg = quenchlab::parse_config_file(config_path);
        std::printf("%s\n", quenchlab::cmd_pspin(cfg, opts).c_str());
    } else if (train->parsed()) {
        const auto cfg = quenchlab::parse_config_file(config_path);
        std::printf("%s\n", quenchlab::cmd_train(cfg, opts).c_str());
    } else if (analyze->parsed()) {
        quenchlab::AnalysisConfig params;
        if (!config_path.empty()) params = quenchlab::parse_config_file(config_path).analysis;
        std::string dir = opts.out_dir;
        if (const char* env = std::getenv("QUENCHLAB_OUT"); env && *env) dir = env;
        if (dir.empty()) throw quenchlab::ConfigError("analyze: --out-dir (the run directory) is required");
        quenchlab::cmd_analyze(dir, params);
        std::printf("%s\n", dir.c_str());
    } else if (sweep->parsed()) {
        const auto cfg = quenchlab::parse_config_file(config_path);
        std::printf("%s\n", quenchlab::cmd_sweep(cfg, opts).c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const quenchlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const quenchlab::DivergenceError& e) {
        std::fprintf(stderr, "numerical divergence: %s\n", e.what());
        return 3;
    } catch (const quenchlab::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
