#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "energylab/diffusion.hpp"
#include "energylab/errors.hpp"

using namespace energylab;

TEST_CASE("build_noise_schedule: small hand-checked schedules") {
    const auto one = build_noise_schedule(NoiseScheduleKind::linear, 1, 0.1, 0.1);
    REQUIRE(one.beta.size() == 1);
    CHECK(one.beta[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(one.alpha_bar[0] == doctest::Approx(0.9).epsilon(1e-15));

    const auto two = build_noise_schedule(NoiseScheduleKind::linear, 2, 0.1, 0.3);
    CHECK(two.beta[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(two.beta[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(two.alpha_bar[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(two.alpha_bar[1] == doctest::Approx(0.63).epsilon(1e-15));
}

TEST_CASE("build_noise_schedule: default schedule against cumulative-product oracle") {
    const auto s = build_noise_schedule(NoiseScheduleKind::linear, 1000, 1e-4, 0.02);
    // Frozen from a 40-digit product: 4.0358297653756833148e-05.
    constexpr double kFrozen = 4.0358297653756833e-05;
    CHECK(std::abs(s.alpha_bar[999] - kFrozen) / kFrozen < 1e-12);
    for (int t : {0, 1, 250, 500, 998, 999}) {
        const double ref = static_cast<double>(oracle::linear_alpha_bar(1000, t, 1e-4L, 0.02L));
        CHECK(std::abs(s.alpha_bar[t] - ref) / ref < 1e-12);
    }
}

TEST_CASE("build_noise_schedule: invariants hold for assorted ranges") {
    std::mt19937_64 rng(11);
    // Upper beta kept small enough that alpha_bar stays clear of the denormal range.
    std::uniform_real_distribution<double> u(1e-5, 0.05);
    std::uniform_int_distribution<int> n(1, 2000);
    for (int trial = 0; trial < 50; ++trial) {
        double lo = u(rng), hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        const auto s = build_noise_schedule(NoiseScheduleKind::linear, n(rng), lo, hi);
        for (std::size_t t = 0; t < s.beta.size(); ++t) {
            REQUIRE(s.beta[t] > 0.0);
            REQUIRE(s.beta[t] < 1.0);
            REQUIRE(s.alpha_bar[t] > 0.0);
            REQUIRE(s.alpha_bar[t] < 1.0);
            if (t > 0) {
                REQUIRE(s.alpha_bar[t] < s.alpha_bar[t - 1]);
                const double expected = s.alpha_bar[t - 1] * (1.0 - s.beta[t]);
                REQUIRE(std::abs(s.alpha_bar[t] - expected) <= 1e-12 * expected);
            }
        }
    }
}

TEST_CASE("build_noise_schedule: rejects bad ranges") {
    CHECK_THROWS_AS(build_noise_schedule(NoiseScheduleKind::linear, 0, 0.1, 0.2), InvalidRange);
    CHECK_THROWS_AS(build_noise_schedule(NoiseScheduleKind::linear, 10, 0.0, 0.2), InvalidRange);
    CHECK_THROWS_AS(build_noise_schedule(NoiseScheduleKind::linear, 10, 0.3, 0.2), InvalidRange);
    CHECK_THROWS_AS(build_noise_schedule(NoiseScheduleKind::linear, 10, 0.1, 1.0), InvalidRange);
    CHECK_THROWS_AS(parse_noise_schedule_kind("cosine"), InvalidRange);
}

TEST_CASE("alpha_bar_at: clean boundary is exactly one") {
    const auto s = build_noise_schedule(NoiseScheduleKind::linear, 10, 0.01, 0.02);
    CHECK(s.alpha_bar_at(-1) == 1.0);
    CHECK(s.alpha_bar_at(3) == s.alpha_bar[3]);
    CHECK_THROWS_AS(s.alpha_bar_at(10), InvalidRange);
    CHECK_THROWS_AS(s.alpha_bar_at(-2), InvalidRange);
}

TEST_CASE("make_timestep_grid") {
    const auto s = build_noise_schedule(NoiseScheduleKind::linear, 1000, 1e-4, 0.02);

    SUBCASE("identity stride") {
        const auto g = make_timestep_grid(s, 1000);
        REQUIRE(g.indices.size() == 1000);
        for (int k = 0; k < 1000; ++k) CHECK(g.indices[k] == 999 - k);
    }
    SUBCASE("two steps") {
        const auto g = make_timestep_grid(s, 2);
        CHECK(g.indices == std::vector<int>{999, 499});
    }
    SUBCASE("fifty steps, stride 20") {
        const auto g = make_timestep_grid(s, 50);
        REQUIRE(g.indices.size() == 50);
        CHECK(g.indices.front() == 999);
        CHECK(g.indices.back() == 19);
        for (std::size_t k = 1; k < g.indices.size(); ++k) CHECK(g.indices[k - 1] - g.indices[k] == 20);
    }
    SUBCASE("every step count gives a strictly decreasing grid without duplicates") {
        for (int steps = 1; steps <= 1000; ++steps) {
            const auto g = make_timestep_grid(s, steps);
            REQUIRE(g.indices.size() == static_cast<std::size_t>(steps));
            REQUIRE(g.indices.front() == 999);
            REQUIRE(g.indices.back() >= 0);
            for (std::size_t k = 1; k < g.indices.size(); ++k) REQUIRE(g.indices[k] < g.indices[k - 1]);
        }
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(make_timestep_grid(s, 0), InvalidRange);
        CHECK_THROWS_AS(make_timestep_grid(s, 1001), InvalidRange);
    }
}

TEST_CASE("forward_diffuse") {
    NoiseSchedule s;
    s.beta = {0.75, 0.19};  // only alpha_bar is read
    s.alpha_bar = {0.25, 0.81};

    const Vector x0{2.0, -4.0};
    const Vector zero{0.0, 0.0};
    CHECK(forward_diffuse(x0, -1, Vector{5.0, 5.0}, s).x == x0);

    const auto half = forward_diffuse(x0, 0, zero, s);
    CHECK(half.x[0] == doctest::Approx(1.0));
    CHECK(half.x[1] == doctest::Approx(-2.0));
    CHECK(half.t == 0);

    const auto mixed = forward_diffuse(Vector{1.0, 0.0}, 1, Vector{0.0, 1.0}, s);
    CHECK(mixed.x[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(mixed.x[1] == doctest::Approx(std::sqrt(0.19)).epsilon(1e-15));

    CHECK_THROWS_AS(forward_diffuse(x0, 0, Vector{1.0}, s), DimensionMismatch);
}

TEST_CASE("forward_diffuse keeps unit variance for standard normal data") {
    const auto s = build_noise_schedule(NoiseScheduleKind::linear, 1000, 1e-4, 0.02);
    std::mt19937_64 rng(2024);
    constexpr int kDraws = 20000;
    for (int t : {0, 100, 500, 900, 999}) {
        std::vector<double> samples;
        samples.reserve(kDraws);
        for (int i = 0; i < kDraws; ++i) {
            const auto x0 = oracle::normal_vector(rng, 1);
            const auto eps = oracle::normal_vector(rng, 1);
            samples.push_back(forward_diffuse(x0, t, eps, s).x[0]);
        }
        long double sq = 0;
        for (double v : samples) sq += v * v;
        const double var = static_cast<double>(sq / kDraws);
        // Var of the second-moment estimator for N(0,1) is 2 / n.
        const double se = std::sqrt(2.0 / kDraws);
        CHECK(std::abs(var - 1.0) < 3.0 * se);
    }
}
