#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "quenchlab/observables.hpp"
#include "quenchlab/pspin.hpp"
#include "quenchlab/rng.hpp"

using namespace quenchlab;

TEST_SUITE_BEGIN("observables");

TEST_CASE("log_schedule doubling") {
    const Schedule s = log_schedule(8, 2.0, 1);
    CHECK(s.ticks == std::vector<std::int64_t>{1, 2, 4, 8});
}

TEST_CASE("log_schedule dense small base deduplicates") {
    const Schedule s = log_schedule(10, 1.1, 1);
    REQUIRE(!s.ticks.empty());
    CHECK(s.ticks.front() == 1);
    CHECK(s.ticks.back() == 10);
    for (std::size_t i = 1; i < s.ticks.size(); ++i) CHECK(s.ticks[i] > s.ticks[i - 1]);
    // small times come out dense
    CHECK(s.ticks[1] == 2);
    CHECK(s.ticks[2] == 3);
}

TEST_CASE("log_schedule point count is logarithmic") {
    const Schedule s = log_schedule(1000000, 1.2, 1);
    CHECK(s.ticks.size() <= 80);
    CHECK(s.ticks.back() == 1000000);
}

TEST_CASE("log_schedule rejects bad parameters") {
    CHECK_THROWS_AS(log_schedule(10, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(log_schedule(10, 2.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(log_schedule(0, 2.0, 1), std::invalid_argument);
}

TEST_CASE("msd of a configuration with itself is zero") {
    const SpinState s = random_sphere_config(100, 7);
    CHECK(msd(s.sigma, s.sigma) == 0.0);
}

TEST_CASE("msd of sigma vs -sigma is four on the sphere") {
    const SpinState s = random_sphere_config(1000, 3);
    std::vector<double> flipped = s.sigma;
    for (auto& x : flipped) x = -x;
    CHECK(msd(s.sigma, flipped) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("msd of independent sphere configurations is near two") {
    const SpinState a = random_sphere_config(10000, 11);
    const SpinState b = random_sphere_config(10000, 12);
    CHECK(msd(a.sigma, b.sigma) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("msd length mismatch throws") {
    CHECK_THROWS_AS(msd(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("msd symmetry and quadrilateral bound") {
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(37), b(37), c(37);
        for (int i = 0; i < 37; ++i) {
            a[i] = rng.gaussian();
            b[i] = rng.gaussian();
            c[i] = rng.gaussian();
        }
        CHECK(msd(a, b) == msd(b, a));
        CHECK(msd(a, c) <= 2.0 * (msd(a, b) + msd(b, c)) + 1e-12);
        CHECK(msd(a, b) >= 0.0);
    }
}

TEST_CASE("msd_curves with a single snapshot is empty") {
    SnapshotSeries snaps;
    snaps.times = {0.0};
    snaps.configs = {{1.0, 2.0}};
    const MsdCurveSet set = msd_curves(snaps, {0.0}, "spins");
    CHECK(set.curves.empty());
}

TEST_CASE("msd_curves point counts follow the snapshot combinatorics") {
    SnapshotSeries snaps;
    snaps.times = {0.0, 1.0, 2.0};
    snaps.configs = {{0.0, 0.0}, {1.0, 1.0}, {3.0, 3.0}};
    const MsdCurveSet set = msd_curves(snaps, {0.0, 1.0}, "weights");
    REQUIRE(set.curves.size() == 2);
    CHECK(set.curves[0].points.size() == 2);
    CHECK(set.curves[1].points.size() == 1);
    CHECK(set.curves[0].points[0].t == 1.0);
    CHECK(set.curves[0].points[0].delta == 1.0);
    CHECK(set.curves[0].points[1].delta == 9.0);
    CHECK(set.curves[1].points[0].delta == 4.0);
}

TEST_CASE("msd_curves of a frozen system is identically zero") {
    SnapshotSeries snaps;
    for (int i = 0; i < 5; ++i) {
        snaps.times.push_back(i);
        snaps.configs.push_back({0.5, -0.25, 1.0});
    }
    for (const auto& curve : msd_curves(snaps, {0.0, 1.0, 2.0}, "weights").curves)
        for (const auto& p : curve.points) CHECK(p.delta == 0.0);
}

TEST_CASE("msd_curves rejects unknown tw and lists available stamps") {
    SnapshotSeries snaps;
    snaps.times = {0.0, 1.0};
    snaps.configs = {{0.0}, {1.0}};
    CHECK_THROWS_WITH_AS(msd_curves(snaps, {0.5}, "spins"),
                         doctest::Contains("available"), std::invalid_argument);
}

TEST_SUITE_END();
