#include "quenchlab/config.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "quenchlab/csvio.hpp"
#include "quenchlab/errors.hpp"

namespace quenchlab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// raw parsed file: section -> (key -> value string)
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

RawConfig parse_ini(const std::string& text, const std::string& origin) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            raw[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (raw[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        raw[section][key] = value;
    }
    return raw;
}

// Typed access with consumption tracking, so leftovers can be rejected by name.
class Section {
public:
    Section(RawConfig& raw, const std::string& name, const std::string& origin)
        : origin_(origin), name_(name) {
        auto it = raw.find(name);
        if (it != raw.end()) entries_ = &it->second;
    }

    bool present() const { return entries_ != nullptr; }

    std::optional<std::string> take(const std::string& key) {
        if (!entries_) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        std::string v = it->second;
        entries_->erase(it);
        return v;
    }

    std::string require(const std::string& key) {
        auto v = take(key);
        if (!v)
            throw ConfigError(origin_ + ": [" + name_ + "] missing required key '" + key + "'");
        return *v;
    }

    double take_double(const std::string& key, double fallback) {
        auto v = take(key);
        return v ? parse_double(key, *v) : fallback;
    }

    std::int64_t take_int(const std::string& key, std::int64_t fallback) {
        auto v = take(key);
        return v ? parse_int(key, *v) : fallback;
    }

    std::uint64_t require_seed(const std::string& key) {
        const std::string v = require(key);
        return static_cast<std::uint64_t>(parse_int(key, v));
    }

    std::vector<double> parse_list(const std::string& key, const std::string& v) {
        std::string body = trim(v);
        if (body.size() < 2 || body.front() != '[' || body.back() != ']')
            throw ConfigError(origin_ + ": [" + name_ + "] " + key + ": expected a [v1, v2, ...] list");
        body = body.substr(1, body.size() - 2);
        std::vector<double> out;
        std::istringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string it = trim(item);
            if (it.empty())
                throw ConfigError(origin_ + ": [" + name_ + "] " + key + ": empty list element");
            out.push_back(parse_double(key, it));
        }
        if (out.empty())
            throw ConfigError(origin_ + ": [" + name_ + "] " + key + ": list must be nonempty");
        return out;
    }

    double parse_double(const std::string& key, const std::string& v) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size())
            throw ConfigError(origin_ + ": [" + name_ + "] " + key + ": not a number: '" + v + "'");
        return x;
    }

    std::int64_t parse_int(const std::string& key, const std::string& v) {
        char* end = nullptr;
        const long long x = std::strtoll(v.c_str(), &end, 10);
        if (v.empty() || end != v.c_str() + v.size())
            throw ConfigError(origin_ + ": [" + name_ + "] " + key + ": not an integer: '" + v + "'");
        return x;
    }

    void reject_leftovers() const {
        if (entries_ && !entries_->empty())
            throw ConfigError(origin_ + ": [" + name_ + "] unknown key '" +
                              entries_->begin()->first + "'");
    }

private:
    std::string origin_, name_;
    std::map<std::string, std::string>* entries_ = nullptr;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    RawConfig raw = parse_ini(text, origin);

    for (const auto& [section, _] : raw) {
        if (section != "pspin" && section != "train" && section != "schedule" &&
            section != "analysis" && section != "sweep")
            throw ConfigError(origin + ": unknown section [" + section + "]");
    }

    ExperimentConfig cfg;

    Section schedule(raw, "schedule", origin);
    cfg.schedule.base = schedule.take_double("base", cfg.schedule.base);
    cfg.schedule.first_step = schedule.take_int("first_step", cfg.schedule.first_step);
    if (!(cfg.schedule.base > 1.0))
        throw ConfigError(origin + ": [schedule] base must be > 1");
    if (cfg.schedule.first_step < 1)
        throw ConfigError(origin + ": [schedule] first_step must be >= 1");
    schedule.reject_leftovers();

    Section analysis(raw, "analysis", origin);
    cfg.analysis.theta = analysis.take_double("theta", cfg.analysis.theta);
    cfg.analysis.eps_loss = analysis.take_double("eps_loss", cfg.analysis.eps_loss);
    cfg.analysis.tw_stride = static_cast<int>(analysis.take_int("tw_stride", cfg.analysis.tw_stride));
    cfg.analysis.points_per_decade =
        static_cast<int>(analysis.take_int("points_per_decade", cfg.analysis.points_per_decade));
    if (cfg.analysis.tw_stride < 1 || cfg.analysis.points_per_decade < 2)
        throw ConfigError(origin + ": [analysis] tw_stride must be >= 1 and points_per_decade >= 2");
    analysis.reject_leftovers();

    Section pspin(raw, "pspin", origin);
    if (pspin.present()) {
        PspinRunConfig pc;
        pc.params.n = static_cast<int>(pspin.take_int("n", pc.params.n));
        pc.params.t_final = pspin.take_double("t_final", pc.params.t_final);
        pc.params.dt = pspin.take_double("dt", pc.params.dt);
        pc.params.t_max = pspin.take_double("t_max", pc.params.t_max);
        pc.realizations = static_cast<int>(pspin.take_int("realizations", pc.realizations));
        pc.params.disorder_seed = pspin.require_seed("disorder_seed");
        pc.params.init_seed = pspin.require_seed("init_seed");
        pc.params.noise_seed = pspin.require_seed("noise_seed");
        pspin.reject_leftovers();
        if (pc.realizations < 1)
            throw ConfigError(origin + ": [pspin] realizations must be >= 1");
        try {
            pc.params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(origin + ": [pspin] " + e.what());
        }
        cfg.pspin = std::move(pc);
    }

    Section train(raw, "train", origin);
    if (train.present()) {
        TrainRunConfig tc;
        const std::string arch = train.take("arch").value_or("toy_a");
        if (arch == "toy_a") {
            tc.train.arch.kind = NetArch::Kind::ToyA;
            tc.train.arch.hidden_sizes = {1000};
            tc.train.arch.output_dim = 1;
        } else if (arch == "fully_connected_b") {
            tc.train.arch.kind = NetArch::Kind::FullyConnectedB;
            tc.train.arch.hidden_sizes = {100, 100};
            tc.train.arch.output_dim = 10;
        } else {
            throw ConfigError(origin + ": [train] arch must be toy_a or fully_connected_b");
        }
        tc.train.arch.input_dim = static_cast<int>(train.take_int("input_dim", 32));
        if (auto v = train.take("hidden_sizes")) {
            tc.train.arch.hidden_sizes.clear();
            for (const double h : train.parse_list("hidden_sizes", *v))
                tc.train.arch.hidden_sizes.push_back(static_cast<int>(h));
        } else if (auto h = train.take("hidden_size")) {
            tc.train.arch.hidden_sizes = {static_cast<int>(train.parse_int("hidden_size", *h))};
        }
        tc.train.arch.output_dim =
            static_cast<int>(train.take_int("output_dim", tc.train.arch.output_dim));
        tc.train.batch_size = static_cast<int>(train.take_int("batch_size", tc.train.batch_size));
        tc.train.learning_rate = train.take_double("learning_rate", tc.train.learning_rate);
        tc.train.max_iterations = train.take_int("max_iterations", tc.train.max_iterations);
        tc.train.noise_subset_size =
            static_cast<int>(train.take_int("noise_subset_size", tc.train.noise_subset_size));
        tc.train.arch.init_seed = train.require_seed("init_seed");
        tc.train.data_seed = train.require_seed("data_seed");
        tc.train.shuffle_seed = train.require_seed("shuffle_seed");

        const std::string dataset = train.take("dataset").value_or("synthetic_random");
        if (dataset == "synthetic_separable") tc.dataset = DatasetKind::SyntheticSeparable;
        else if (dataset == "synthetic_random") tc.dataset = DatasetKind::SyntheticRandom;
        else if (dataset == "mnist") tc.dataset = DatasetKind::Mnist;
        else if (dataset == "mnist_parity") tc.dataset = DatasetKind::MnistParity;
        else throw ConfigError(origin + ": [train] unknown dataset '" + dataset + "'");

        tc.n_samples = static_cast<int>(train.take_int("n_samples", tc.n_samples));
        tc.test_samples = static_cast<int>(train.take_int("test_samples", tc.test_samples));
        tc.mnist_images = train.take("mnist_images").value_or("");
        tc.mnist_labels = train.take("mnist_labels").value_or("");
        tc.mnist_test_images = train.take("mnist_test_images").value_or("");
        tc.mnist_test_labels = train.take("mnist_test_labels").value_or("");
        train.reject_leftovers();

        if ((tc.dataset == DatasetKind::Mnist || tc.dataset == DatasetKind::MnistParity) &&
            (tc.mnist_images.empty() || tc.mnist_labels.empty()))
            throw ConfigError(origin + ": [train] mnist datasets need mnist_images and mnist_labels");
        try {
            tc.train.arch.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(origin + ": [train] " + e.what());
        }
        cfg.train = std::move(tc);
    }

    Section sweep(raw, "sweep", origin);
    if (sweep.present()) {
        if (!cfg.train)
            throw ConfigError(origin + ": [sweep] requires a [train] section");
        SweepConfig sc;
        // exactly one "parameter = [values]" entry
        auto it = raw.find("sweep");
        if (it->second.size() != 1)
            throw ConfigError(origin + ": [sweep] must contain exactly one parameter = [values] entry");
        sc.parameter = it->second.begin()->first;
        if (sc.parameter != "hidden_size" && sc.parameter != "batch_size" &&
            sc.parameter != "learning_rate" && sc.parameter != "noise_subset_size")
            throw ConfigError(origin + ": [sweep] unknown sweep parameter '" + sc.parameter + "'");
        sc.values = sweep.parse_list(sc.parameter, *sweep.take(sc.parameter));
        cfg.sweep = std::move(sc);
    }

    if (!cfg.pspin && !cfg.train)
        throw ConfigError(origin + ": config needs a [pspin] or [train] section");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

namespace {

void emit(std::ostringstream& out, const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
}
void emit(std::ostringstream& out, const std::string& key, double v) {
    emit(out, key, format_double(v));
}
void emit(std::ostringstream& out, const std::string& key, std::int64_t v) {
    emit(out, key, std::to_string(v));
}
void emit_seed(std::ostringstream& out, const std::string& key, std::uint64_t v) {
    emit(out, key, std::to_string(v));
}

}  // namespace

std::string ExperimentConfig::canonical_text() const {
    // alphabetical sections, alphabetical keys, all effective values spelled out
    std::ostringstream out;
    out << "[analysis]\n";
    emit(out, "eps_loss", analysis.eps_loss);
    emit(out, "points_per_decade", static_cast<std::int64_t>(analysis.points_per_decade));
    emit(out, "theta", analysis.theta);
    emit(out, "tw_stride", static_cast<std::int64_t>(analysis.tw_stride));
    if (pspin) {
        out << "[pspin]\n";
        emit_seed(out, "disorder_seed", pspin->params.disorder_seed);
        emit(out, "dt", pspin->params.dt);
        emit_seed(out, "init_seed", pspin->params.init_seed);
        emit(out, "n", static_cast<std::int64_t>(pspin->params.n));
        emit_seed(out, "noise_seed", pspin->params.noise_seed);
        emit(out, "realizations", static_cast<std::int64_t>(pspin->realizations));
        emit(out, "t_final", pspin->params.t_final);
        emit(out, "t_max", pspin->params.t_max);
    }
    out << "[schedule]\n";
    emit(out, "base", schedule.base);
    emit(out, "first_step", schedule.first_step);
    if (sweep) {
        out << "[sweep]\n";
        std::string list = "[";
        for (std::size_t i = 0; i < sweep->values.size(); ++i) {
            if (i) list += ", ";
            list += format_double(sweep->values[i]);
        }
        list += "]";
        emit(out, sweep->parameter, list);
    }
    if (train) {
        out << "[train]\n";
        emit(out, "arch",
             train->train.arch.kind == NetArch::Kind::ToyA ? std::string("toy_a")
                                                           : std::string("fully_connected_b"));
        emit(out, "batch_size", static_cast<std::int64_t>(train->train.batch_size));
        emit_seed(out, "data_seed", train->train.data_seed);
        switch (train->dataset) {
            case DatasetKind::SyntheticSeparable: emit(out, "dataset", std::string("synthetic_separable")); break;
            case DatasetKind::SyntheticRandom: emit(out, "dataset", std::string("synthetic_random")); break;
            case DatasetKind::Mnist: emit(out, "dataset", std::string("mnist")); break;
            case DatasetKind::MnistParity: emit(out, "dataset", std::string("mnist_parity")); break;
        }
        std::string hidden = "[";
        for (std::size_t i = 0; i < train->train.arch.hidden_sizes.size(); ++i) {
            if (i) hidden += ", ";
            hidden += std::to_string(train->train.arch.hidden_sizes[i]);
        }
        hidden += "]";
        emit(out, "hidden_sizes", hidden);
        emit_seed(out, "init_seed", train->train.arch.init_seed);
        emit(out, "input_dim", static_cast<std::int64_t>(train->train.arch.input_dim));
        emit(out, "learning_rate", train->train.learning_rate);
        emit(out, "max_iterations", train->train.max_iterations);
        if (!train->mnist_images.empty()) {
            emit(out, "mnist_images", train->mnist_images);
            emit(out, "mnist_labels", train->mnist_labels);
            if (!train->mnist_test_images.empty()) {
                emit(out, "mnist_test_images", train->mnist_test_images);
                emit(out, "mnist_test_labels", train->mnist_test_labels);
            }
        } else {
            emit(out, "n_samples", static_cast<std::int64_t>(train->n_samples));
            emit(out, "test_samples", static_cast<std::int64_t>(train->test_samples));
        }
        emit(out, "noise_subset_size", static_cast<std::int64_t>(train->train.noise_subset_size));
        emit(out, "output_dim", static_cast<std::int64_t>(train->train.arch.output_dim));
        emit_seed(out, "shuffle_seed", train->train.shuffle_seed);
    }
    return out.str();
}

std::string ExperimentConfig::run_id() const { return hash128_hex(canonical_text()); }

// MurmurHash3 x64 128 (public-domain algorithm by Austin Appleby).
std::string hash128_hex(const std::string& data) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(data.data());
    const std::size_t len = data.size();
    const std::size_t nblocks = len / 16;
    std::uint64_t h1 = 0x9368e53c2f6af274ULL, h2 = 0x586dcd208f7cd3fdULL;  // fixed seeds
    const std::uint64_t c1 = 0x87c37b91114253d5ULL, c2 = 0x4cf5ad432745937fULL;

    auto rotl = [](std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); };
    auto fmix = [](std::uint64_t k) {
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        k *= 0xc4ceb9fe1a85ec53ULL;
        k ^= k >> 33;
        return k;
    };

    for (std::size_t i = 0; i < nblocks; ++i) {
        std::uint64_t k1, k2;
        std::memcpy(&k1, bytes + i * 16, 8);
        std::memcpy(&k2, bytes + i * 16 + 8, 8);
        k1 *= c1; k1 = rotl(k1, 31); k1 *= c2; h1 ^= k1;
        h1 = rotl(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
        k2 *= c2; k2 = rotl(k2, 33); k2 *= c1; h2 ^= k2;
        h2 = rotl(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
    }

    const std::uint8_t* tail = bytes + nblocks * 16;
    std::uint64_t k1 = 0, k2 = 0;
    switch (len & 15) {
        case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
        case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
        case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
        case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
        case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
        case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
        case 9:
            k2 ^= std::uint64_t(tail[8]);
            k2 *= c2; k2 = rotl(k2, 33); k2 *= c1; h2 ^= k2;
            [[fallthrough]];
        case 8: k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
        case 7: k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
        case 6: k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
        case 5: k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
        case 4: k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
        case 3: k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
        case 2: k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
        case 1:
            k1 ^= std::uint64_t(tail[0]);
            k1 *= c1; k1 = rotl(k1, 31); k1 *= c2; h1 ^= k1;
            break;
        case 0: break;
    }

    h1 ^= len;
    h2 ^= len;
    h1 += h2;
    h2 += h1;
    h1 = fmix(h1);
    h2 = fmix(h2);
    h1 += h2;
    h2 += h1;

    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h1),
                  static_cast<unsigned long long>(h2));
    return buf;
}

}  // namespace quenchlab
