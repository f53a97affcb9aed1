#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "energylab/diffusion.hpp"

namespace energylab {

enum class ScheduleKind { fixed, linear_decreasing, cosine_ramp, step, exponential, sigmoid };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Time-indexed guidance scale s_t over a sampling run of T steps.
///
/// Formulas, with u = t / T:
///   fixed              s0
///   linear_decreasing  s1 - (s1 - s0) u
///   cosine_ramp        s0 + (s1 - s0) (1 - cos(pi u)) / 2
///   step               s0 if t < T/2, else s1
///   exponential        s0 + (s1 - s0) (1 - exp(-alpha u))
///   sigmoid            s0 + (s1 - s0) / (1 + exp(-beta_steep (u - 1/2)))
///
/// linear_decreasing runs from s1 down to s0; the other ramps run from s0 to
/// s1, so a decreasing cosine/exponential/sigmoid ramp is written with s0 > s1.
struct GuidanceSchedule {
    ScheduleKind kind = ScheduleKind::fixed;
    double s0 = 0.0;
    double s1 = 0.0;
    std::optional<double> alpha;
    std::optional<double> beta_steep;

    friend bool operator==(const GuidanceSchedule&, const GuidanceSchedule&) = default;
};

inline constexpr double kDefaultAlpha = 3.0;
inline constexpr double kDefaultBetaSteep = 10.0;

GuidanceSchedule fixed_schedule(double scale);

// Throws InvalidRange for negative scales or non-positive steepness,
// MissingParameter when exponential/sigmoid lack their steepness.
void validate(const GuidanceSchedule& schedule);

// Short human label: "7" for fixed, "18->3" for ramps (start and end value).
std::string scale_label(const GuidanceSchedule& schedule);

double evaluate_schedule(const GuidanceSchedule& schedule, double t, int total_steps);

// (1 + s) eps_cond - s eps_uncond
Vector combine_cfg(std::span<const double> eps_cond, std::span<const double> eps_uncond,
                   double scale);

}  // namespace energylab
