#include "quenchlab/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "quenchlab/errors.hpp"
#include "quenchlab/rng.hpp"

namespace quenchlab {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& f, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    f.read(reinterpret_cast<char*>(buf), 4);
    if (f.gcount() != 4)
        throw IoError(path + ": truncated at offset " + std::to_string(offset) +
                      " (expected 4 more bytes)");
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_u32_be(std::ofstream& f, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(buf), 4);
}

}  // namespace

std::pair<std::vector<double>, double> synthetic_hyperplane(int dim, std::uint64_t seed) {
    // Own stream so feature generation and the hyperplane never interleave.
    Rng rng(derive_seed(seed, 1));
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (auto& x : w) x = rng.gaussian();
    // Features live in [0,1]; centering the plane on the feature mean keeps
    // the two classes roughly balanced.
    double b = 0.0;
    for (const double x : w) b -= 0.5 * x;
    return {w, b};
}

Dataset gen_synthetic(int n, int dim, SyntheticMode mode, std::uint64_t seed,
                      const std::string& split) {
    if (n < 2 || dim < 1)
        throw std::invalid_argument("gen_synthetic: need n >= 2 and dim >= 1");

    Dataset d;
    d.n_samples = n;
    d.dim = dim;
    d.split = split;
    d.features.resize(static_cast<std::size_t>(n) * dim);
    d.labels.resize(static_cast<std::size_t>(n));

    Rng feat_rng(derive_seed(seed, 0));
    for (auto& x : d.features) {
        const double g = std::clamp(feat_rng.gaussian(), -3.0, 3.0);
        x = (g + 3.0) / 6.0;
    }

    if (mode == SyntheticMode::Separable) {
        const auto [w, b] = synthetic_hyperplane(dim, seed);
        for (int i = 0; i < n; ++i) {
            double score = b;
            const double* x = d.sample(i);
            for (int k = 0; k < dim; ++k) score += w[k] * x[k];
            d.labels[i] = score > 0.0 ? 1 : 0;
        }
    } else {
        Rng label_rng(derive_seed(seed, 2));
        for (auto& y : d.labels) y = static_cast<int>(label_rng.uniform_int(2));
    }
    return d;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::string& split) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw IoError(images_path + ": cannot open file");
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw IoError(labels_path + ": cannot open file");

    const std::uint32_t img_magic = read_u32_be(img, images_path, 0);
    if (img_magic != kImagesMagic) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", img_magic);
        throw IoError(images_path + ": bad magic " + buf + " at offset 0 (want 0x00000803)");
    }
    const std::uint32_t count = read_u32_be(img, images_path, 4);
    const std::uint32_t rows = read_u32_be(img, images_path, 8);
    const std::uint32_t cols = read_u32_be(img, images_path, 12);

    const std::uint32_t lab_magic = read_u32_be(lab, labels_path, 0);
    if (lab_magic != kLabelsMagic) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", lab_magic);
        throw IoError(labels_path + ": bad magic " + buf + " at offset 0 (want 0x00000801)");
    }
    const std::uint32_t lab_count = read_u32_be(lab, labels_path, 4);
    if (lab_count != count)
        throw IoError(labels_path + ": label count " + std::to_string(lab_count) +
                      " does not match image count " + std::to_string(count) + " in " +
                      images_path);

    const std::size_t pixels = std::size_t(count) * rows * cols;
    std::vector<unsigned char> raw(pixels);
    img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(img.gcount()) != pixels)
        throw IoError(images_path + ": truncated at offset " +
                      std::to_string(16 + img.gcount()) + " (want " + std::to_string(pixels) +
                      " pixel bytes)");

    std::vector<unsigned char> raw_labels(count);
    lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(lab.gcount()) != count)
        throw IoError(labels_path + ": truncated at offset " + std::to_string(8 + lab.gcount()) +
                      " (want " + std::to_string(count) + " label bytes)");

    Dataset d;
    d.n_samples = static_cast<int>(count);
    d.dim = static_cast<int>(rows * cols);
    d.split = split;
    d.features.resize(pixels);
    for (std::size_t i = 0; i < pixels; ++i) d.features[i] = raw[i] / 255.0;
    d.labels.assign(raw_labels.begin(), raw_labels.end());
    return d;
}

void write_idx(const Dataset& data, int rows, int cols,
               const std::string& images_path, const std::string& labels_path) {
    if (rows * cols != data.dim)
        throw std::invalid_argument("write_idx: rows*cols must equal feature dim");

    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw IoError(images_path + ": cannot open file for writing");
    write_u32_be(img, kImagesMagic);
    write_u32_be(img, static_cast<std::uint32_t>(data.n_samples));
    write_u32_be(img, static_cast<std::uint32_t>(rows));
    write_u32_be(img, static_cast<std::uint32_t>(cols));
    for (const double x : data.features) {
        const double scaled = x * 255.0;
        const auto byte = static_cast<unsigned char>(std::lround(scaled));
        img.put(static_cast<char>(byte));
    }

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw IoError(labels_path + ": cannot open file for writing");
    write_u32_be(lab, kLabelsMagic);
    write_u32_be(lab, static_cast<std::uint32_t>(data.n_samples));
    for (const int y : data.labels) lab.put(static_cast<char>(y));
}

void relabel_parity(Dataset& data) {
    for (auto& y : data.labels) y = y % 2;
}

}  // namespace quenchlab
