#include <doctest.h>

#include <cmath>
#include <random>

#include "energylab/errors.hpp"
#include "energylab/guidance.hpp"

using namespace energylab;

namespace {

GuidanceSchedule make(ScheduleKind kind, double s0, double s1) {
    GuidanceSchedule g{kind, s0, s1, std::nullopt, std::nullopt};
    if (kind == ScheduleKind::exponential) g.alpha = 2.0;
    if (kind == ScheduleKind::sigmoid) g.beta_steep = 8.0;
    return g;
}

constexpr ScheduleKind kKinds[] = {ScheduleKind::fixed,       ScheduleKind::linear_decreasing,
                                   ScheduleKind::cosine_ramp, ScheduleKind::step,
                                   ScheduleKind::exponential, ScheduleKind::sigmoid};

}  // namespace

TEST_CASE("schedule endpoint and midpoint values") {
    const auto lin = make(ScheduleKind::linear_decreasing, 3, 10);
    CHECK(evaluate_schedule(lin, 0, 50) == 10.0);
    CHECK(evaluate_schedule(lin, 50, 50) == 3.0);

    const auto cosr = make(ScheduleKind::cosine_ramp, 3, 10);
    CHECK(std::abs(evaluate_schedule(cosr, 0, 50) - 3.0) < 1e-12);
    CHECK(std::abs(evaluate_schedule(cosr, 25, 50) - 6.5) < 1e-12);
    CHECK(std::abs(evaluate_schedule(cosr, 50, 50) - 10.0) < 1e-12);

    const auto step = make(ScheduleKind::step, 3, 10);
    CHECK(evaluate_schedule(step, 24, 50) == 3.0);
    CHECK(evaluate_schedule(step, 25, 50) == 10.0);

    GuidanceSchedule expo{ScheduleKind::exponential, 0, 1, 1.0, std::nullopt};
    CHECK(std::abs(evaluate_schedule(expo, 50, 50) - 0.63212055882855768) < 1e-12);
    CHECK(evaluate_schedule(expo, 0, 50) == 0.0);

    for (double beta : {0.5, 10.0, 200.0}) {
        GuidanceSchedule sig{ScheduleKind::sigmoid, 2.5, 17.0, std::nullopt, beta};
        CHECK(std::abs(evaluate_schedule(sig, 25, 50) - 9.75) < 1e-12);
    }

    for (double t : {0.0, 13.0, 50.0}) CHECK(evaluate_schedule(fixed_schedule(7), t, 50) == 7.0);
}

TEST_CASE("schedules stay within [min(s0,s1), max(s0,s1)] and move monotonically") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> scale(0.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double s0 = scale(rng), s1 = scale(rng);
        const int total = 1 + trial % 97;
        for (ScheduleKind kind : kKinds) {
            const auto g = make(kind, s0, s1);
            const double lo = std::min(s0, s1) - 1e-12, hi = std::max(s0, s1) + 1e-12;
            double prev = evaluate_schedule(g, 0, total);
            for (int t = 0; t <= total; ++t) {
                const double v = evaluate_schedule(g, t, total);
                REQUIRE(v >= lo);
                REQUIRE(v <= hi);
                const double direction = kind == ScheduleKind::linear_decreasing ? (s0 - s1) : (s1 - s0);
                if (kind != ScheduleKind::fixed && kind != ScheduleKind::step) {
                    if (direction >= 0) REQUIRE(v >= prev - 1e-12);
                    else REQUIRE(v <= prev + 1e-12);
                }
                prev = v;
            }
        }
    }
}

TEST_CASE("schedule validation") {
    GuidanceSchedule expo{ScheduleKind::exponential, 0, 1, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(validate(expo), MissingParameter);
    CHECK_THROWS_AS(evaluate_schedule(expo, 0, 50), MissingParameter);
    GuidanceSchedule sig{ScheduleKind::sigmoid, 0, 1, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(evaluate_schedule(sig, 0, 50), MissingParameter);
    sig.beta_steep = 0.0;
    CHECK_THROWS_AS(validate(sig), InvalidRange);
    CHECK_THROWS_AS(validate(fixed_schedule(-1)), InvalidRange);
    CHECK_NOTHROW(validate(fixed_schedule(0)));
    CHECK_THROWS_AS(evaluate_schedule(fixed_schedule(1), 51, 50), InvalidRange);
    CHECK_THROWS_AS(evaluate_schedule(fixed_schedule(1), -1, 50), InvalidRange);
    CHECK_THROWS_AS(evaluate_schedule(fixed_schedule(1), 0, 0), InvalidRange);
}

TEST_CASE("schedule kind names round-trip") {
    for (ScheduleKind kind : kKinds) CHECK(parse_schedule_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_schedule_kind("quadratic"), InvalidRange);
    CHECK(scale_label(fixed_schedule(7)) == "7");
    CHECK(scale_label(make(ScheduleKind::linear_decreasing, 3, 18)) == "18->3");
    CHECK(scale_label(make(ScheduleKind::cosine_ramp, 3, 18)) == "3->18");
}

TEST_CASE("combine_cfg") {
    CHECK(combine_cfg(Vector{0.5}, Vector{0.3}, 7)[0] == doctest::Approx(1.9).epsilon(1e-14));

    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Vector a(6), b(6), c(6);
        for (auto* v : {&a, &b, &c})
            for (auto& x : *v) x = n(rng);
        const double s = std::abs(n(rng)) * 5;
        REQUIRE(combine_cfg(a, b, 0.0) == a);
        REQUIRE(combine_cfg(a, a, s) == a);

        Vector ac(a), bc(b);
        for (std::size_t i = 0; i < 6; ++i) {
            ac[i] += c[i];
            bc[i] += c[i];
        }
        const auto lhs = combine_cfg(ac, bc, s);
        const auto rhs = combine_cfg(a, b, s);
        for (std::size_t i = 0; i < 6; ++i) REQUIRE(std::abs(lhs[i] - (rhs[i] + c[i])) < 1e-10 * (1 + s));
    }
    CHECK_THROWS_AS(combine_cfg(Vector{1, 2}, Vector{1}, 1.0), DimensionMismatch);
}
