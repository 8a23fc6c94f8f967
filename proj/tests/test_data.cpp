#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "quenchlab/data.hpp"
#include "quenchlab/errors.hpp"

using namespace quenchlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "quenchlab_data_tests";
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// big-endian u32 push
void push_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x >> 24));
    v.push_back(static_cast<unsigned char>(x >> 16));
    v.push_back(static_cast<unsigned char>(x >> 8));
    v.push_back(static_cast<unsigned char>(x));
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("synthetic data is deterministic in all parameters") {
    const Dataset a = gen_synthetic(50, 8, SyntheticMode::Separable, 123);
    const Dataset b = gen_synthetic(50, 8, SyntheticMode::Separable, 123);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    const Dataset c = gen_synthetic(50, 8, SyntheticMode::Separable, 124);
    CHECK(a.features != c.features);
}

TEST_CASE("synthetic features live in the unit interval") {
    const Dataset d = gen_synthetic(500, 16, SyntheticMode::RandomLabels, 9);
    for (const double x : d.features) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("separable labels agree with the generating hyperplane") {
    const Dataset d = gen_synthetic(2000, 12, SyntheticMode::Separable, 77);
    const auto [w, b] = synthetic_hyperplane(12, 77);
    int correct = 0;
    for (int i = 0; i < d.n_samples; ++i) {
        double score = b;
        for (int k = 0; k < d.dim; ++k) score += w[k] * d.sample(i)[k];
        correct += (score > 0.0 ? 1 : 0) == d.labels[i];
    }
    CHECK(correct == d.n_samples);
}

TEST_CASE("random labels are roughly balanced") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset d = gen_synthetic(10000, 4, SyntheticMode::RandomLabels, seed);
        double mean = 0.0;
        for (const int y : d.labels) mean += y;
        mean /= d.n_samples;
        CHECK(mean >= 0.45);
        CHECK(mean <= 0.55);
    }
}

TEST_CASE("synthetic generator rejects degenerate sizes") {
    CHECK_THROWS_AS(gen_synthetic(1, 4, SyntheticMode::Separable, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_synthetic(10, 0, SyntheticMode::Separable, 1), std::invalid_argument);
}

TEST_CASE("handcrafted idx pair loads with exact pixel scaling") {
    const fs::path dir = temp_dir();
    std::vector<unsigned char> img;
    push_u32(img, 0x00000803);
    push_u32(img, 2);  // count
    push_u32(img, 3);  // rows
    push_u32(img, 3);  // cols
    for (int i = 0; i < 9; ++i) img.push_back(i == 4 ? 255 : 0);   // image 0: center on
    for (int i = 0; i < 9; ++i) img.push_back(i == 0 ? 255 : 0);   // image 1: corner on
    std::vector<unsigned char> lab;
    push_u32(lab, 0x00000801);
    push_u32(lab, 2);
    lab.push_back(7);
    lab.push_back(1);
    write_bytes(dir / "imgs.idx", img);
    write_bytes(dir / "labs.idx", lab);

    const Dataset d = load_idx((dir / "imgs.idx").string(), (dir / "labs.idx").string());
    CHECK(d.n_samples == 2);
    CHECK(d.dim == 9);
    CHECK(d.features[4] == 1.0);
    CHECK(d.features[0] == 0.0);
    CHECK(d.features[9] == 1.0);
    CHECK(d.labels == std::vector<int>{7, 1});
}

TEST_CASE("corrupted magic is rejected with the file name") {
    const fs::path dir = temp_dir();
    std::vector<unsigned char> img;
    push_u32(img, 0xDEADBEEF);
    push_u32(img, 0);
    push_u32(img, 1);
    push_u32(img, 1);
    std::vector<unsigned char> lab;
    push_u32(lab, 0x00000801);
    push_u32(lab, 0);
    write_bytes(dir / "badmagic.idx", img);
    write_bytes(dir / "oklabs.idx", lab);
    CHECK_THROWS_WITH_AS(load_idx((dir / "badmagic.idx").string(), (dir / "oklabs.idx").string()),
                         doctest::Contains("bad magic"), IoError);
}

TEST_CASE("truncated image payload is rejected with an offset") {
    const fs::path dir = temp_dir();
    std::vector<unsigned char> img;
    push_u32(img, 0x00000803);
    push_u32(img, 2);
    push_u32(img, 2);
    push_u32(img, 2);
    img.push_back(0);  // 1 of 8 pixel bytes
    std::vector<unsigned char> lab;
    push_u32(lab, 0x00000801);
    push_u32(lab, 2);
    lab.push_back(0);
    lab.push_back(1);
    write_bytes(dir / "trunc.idx", img);
    write_bytes(dir / "labs2.idx", lab);
    CHECK_THROWS_WITH_AS(load_idx((dir / "trunc.idx").string(), (dir / "labs2.idx").string()),
                         doctest::Contains("truncated"), IoError);
}

TEST_CASE("image/label count mismatch is rejected") {
    const fs::path dir = temp_dir();
    std::vector<unsigned char> img;
    push_u32(img, 0x00000803);
    push_u32(img, 1);
    push_u32(img, 1);
    push_u32(img, 1);
    img.push_back(9);
    std::vector<unsigned char> lab;
    push_u32(lab, 0x00000801);
    push_u32(lab, 3);
    lab.push_back(0);
    lab.push_back(1);
    lab.push_back(2);
    write_bytes(dir / "one.idx", img);
    write_bytes(dir / "three.idx", lab);
    CHECK_THROWS_WITH_AS(load_idx((dir / "one.idx").string(), (dir / "three.idx").string()),
                         doctest::Contains("count"), IoError);
}

TEST_CASE("missing file is rejected with the path") {
    CHECK_THROWS_WITH_AS(load_idx("/nonexistent/images.idx", "/nonexistent/labels.idx"),
                         doctest::Contains("/nonexistent/images.idx"), IoError);
}

TEST_CASE("idx round-trip reproduces byte-valued data exactly") {
    const fs::path dir = temp_dir();
    Dataset d;
    d.n_samples = 3;
    d.dim = 4;
    d.split = "train";
    for (int i = 0; i < 12; ++i) d.features.push_back((i * 19 % 256) / 255.0);
    d.labels = {0, 5, 9};
    write_idx(d, 2, 2, (dir / "rt_imgs.idx").string(), (dir / "rt_labs.idx").string());
    const Dataset back = load_idx((dir / "rt_imgs.idx").string(), (dir / "rt_labs.idx").string());
    CHECK(back.features == d.features);
    CHECK(back.labels == d.labels);
}

TEST_CASE("parity relabeling maps digits to even/odd") {
    Dataset d;
    d.labels = {0, 1, 2, 3, 7, 8, 9};
    relabel_parity(d);
    CHECK(d.labels == std::vector<int>{0, 1, 0, 1, 1, 0, 1});
}

// Real MNIST is not shipped with the repository; point QUENCHLAB_MNIST_DIR at
// a directory holding train-images-idx3-ubyte / train-labels-idx1-ubyte to
// exercise this end-to-end.
TEST_CASE("real mnist files parse when available") {
    const char* dir = std::getenv("QUENCHLAB_MNIST_DIR");
    if (!dir || !*dir) {
        MESSAGE("QUENCHLAB_MNIST_DIR not set; skipping");
        return;
    }
    const Dataset d = load_idx(std::string(dir) + "/train-images-idx3-ubyte",
                               std::string(dir) + "/train-labels-idx1-ubyte");
    CHECK(d.n_samples == 60000);
    CHECK(d.dim == 784);
}

TEST_SUITE_END();
