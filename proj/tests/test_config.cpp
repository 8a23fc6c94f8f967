#include <doctest.h>

#include "quenchlab/config.hpp"
#include "quenchlab/errors.hpp"

using namespace quenchlab;

namespace {

const char* kPspinText = R"(
# quench experiment
[pspin]
n = 64
t_final = 0.5
dt = 0.01
t_max = 100
realizations = 4
disorder_seed = 1
init_seed = 2
noise_seed = 3

[schedule]
base = 1.3
first_step = 1
)";

const char* kTrainText = R"(
[train]
arch = toy_a
input_dim = 16
hidden_size = 50
batch_size = 10
learning_rate = 0.5
max_iterations = 100
noise_subset_size = 20
dataset = synthetic_separable
n_samples = 100
test_samples = 40
init_seed = 7
data_seed = 8
shuffle_seed = 9
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("pspin config parses with defaults applied") {
    const ExperimentConfig cfg = parse_config_text(kPspinText);
    REQUIRE(cfg.pspin);
    CHECK(cfg.pspin->params.n == 64);
    CHECK(cfg.pspin->params.t_final == 0.5);
    CHECK(cfg.pspin->realizations == 4);
    CHECK(cfg.schedule.base == 1.3);
    CHECK(cfg.analysis.theta == 0.2);       // default
    CHECK(cfg.analysis.tw_stride == 4);     // default
    CHECK(!cfg.train);
    CHECK(!cfg.sweep);
}

TEST_CASE("train config parses") {
    const ExperimentConfig cfg = parse_config_text(kTrainText);
    REQUIRE(cfg.train);
    CHECK(cfg.train->train.arch.kind == NetArch::Kind::ToyA);
    CHECK(cfg.train->train.arch.hidden_sizes == std::vector<int>{50});
    CHECK(cfg.train->train.learning_rate == 0.5);
    CHECK(cfg.train->dataset == DatasetKind::SyntheticSeparable);
}

TEST_CASE("unknown keys are rejected by name") {
    const std::string text = std::string(kPspinText) + "typo_key = 3\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("typo_key"), ConfigError);
}

TEST_CASE("unknown sections are rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text("[mystery]\nx = 1\n"), doctest::Contains("mystery"),
                         ConfigError);
}

TEST_CASE("seeds are required, not defaulted") {
    const char* no_seed = R"(
[pspin]
n = 8
disorder_seed = 1
init_seed = 2
)";
    CHECK_THROWS_WITH_AS(parse_config_text(no_seed), doctest::Contains("noise_seed"), ConfigError);
}

TEST_CASE("duplicate keys and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("[pspin]\nn = 8\nn = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[pspin]\nnonsense line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("orphan = 1\n"), ConfigError);
}

TEST_CASE("a config without pspin or train sections is rejected") {
    CHECK_THROWS_AS(parse_config_text("[schedule]\nbase = 2\n"), ConfigError);
}

TEST_CASE("sweep needs exactly one parameter and a train section") {
    const std::string good = std::string(kTrainText) + "[sweep]\nhidden_size = [10, 1000]\n";
    const ExperimentConfig cfg = parse_config_text(good);
    REQUIRE(cfg.sweep);
    CHECK(cfg.sweep->parameter == "hidden_size");
    CHECK(cfg.sweep->values == std::vector<double>{10.0, 1000.0});

    CHECK_THROWS_AS(parse_config_text(std::string(kPspinText) + "[sweep]\nhidden_size = [10]\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(std::string(kTrainText) + "[sweep]\nhidden_size = [10]\nbatch_size = [1]\n"),
        ConfigError);
    CHECK_THROWS_AS(parse_config_text(std::string(kTrainText) + "[sweep]\nwrong_param = [10]\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(std::string(kTrainText) + "[sweep]\nhidden_size = 10\n"),
                    ConfigError);
}

TEST_CASE("run_id is stable, 32 hex chars, and sensitive to every value") {
    const ExperimentConfig a = parse_config_text(kPspinText);
    const ExperimentConfig b = parse_config_text(kPspinText);
    CHECK(a.run_id() == b.run_id());
    CHECK(a.run_id().size() == 32);
    for (const char c : a.run_id()) CHECK(std::isxdigit(static_cast<unsigned char>(c)));

    ExperimentConfig mutated = a;
    mutated.pspin->params.t_final = 0.6;
    CHECK(mutated.run_id() != a.run_id());
}

TEST_CASE("key order in the file does not change the run_id") {
    const char* reordered = R"(
[schedule]
first_step = 1
base = 1.3

[pspin]
noise_seed = 3
init_seed = 2
disorder_seed = 1
realizations = 4
t_max = 100
dt = 0.01
t_final = 0.5
n = 64
)";
    CHECK(parse_config_text(kPspinText).run_id() == parse_config_text(reordered).run_id());
}

TEST_CASE("hash128 basics") {
    CHECK(hash128_hex("").size() == 32);
    CHECK(hash128_hex("a") != hash128_hex("b"));
    CHECK(hash128_hex("abc") == hash128_hex("abc"));
}

TEST_SUITE_END();
