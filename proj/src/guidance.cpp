#include "energylab/guidance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "energylab/errors.hpp"

namespace energylab {

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::fixed: return "fixed";
        case ScheduleKind::linear_decreasing: return "linear_decreasing";
        case ScheduleKind::cosine_ramp: return "cosine_ramp";
        case ScheduleKind::step: return "step";
        case ScheduleKind::exponential: return "exponential";
        case ScheduleKind::sigmoid: return "sigmoid";
    }
    return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
    for (auto kind : {ScheduleKind::fixed, ScheduleKind::linear_decreasing,
                      ScheduleKind::cosine_ramp, ScheduleKind::step, ScheduleKind::exponential,
                      ScheduleKind::sigmoid}) {
        if (to_string(kind) == name) return kind;
    }
    throw InvalidRange("unknown guidance schedule kind '" + std::string(name) + "'");
}

GuidanceSchedule fixed_schedule(double scale) {
    return GuidanceSchedule{ScheduleKind::fixed, scale, scale, std::nullopt, std::nullopt};
}

void validate(const GuidanceSchedule& schedule) {
    if (!std::isfinite(schedule.s0) || !std::isfinite(schedule.s1) || schedule.s0 < 0.0 ||
        schedule.s1 < 0.0) {
        throw InvalidRange("guidance scales must be finite and >= 0");
    }
    if (schedule.kind == ScheduleKind::exponential) {
        if (!schedule.alpha) throw MissingParameter("exponential schedule requires alpha");
        if (!(*schedule.alpha > 0.0)) throw InvalidRange("alpha must be positive");
    }
    if (schedule.kind == ScheduleKind::sigmoid) {
        if (!schedule.beta_steep) throw MissingParameter("sigmoid schedule requires beta");
        if (!(*schedule.beta_steep > 0.0)) throw InvalidRange("beta must be positive");
    }
}

namespace {
std::string compact(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

std::string scale_label(const GuidanceSchedule& schedule) {
    switch (schedule.kind) {
        case ScheduleKind::fixed:
            return compact(schedule.s0);
        case ScheduleKind::linear_decreasing:
            return compact(schedule.s1) + "->" + compact(schedule.s0);
        default:
            return compact(schedule.s0) + "->" + compact(schedule.s1);
    }
}

double evaluate_schedule(const GuidanceSchedule& schedule, double t, int total_steps) {
    validate(schedule);
    if (total_steps < 1) throw InvalidRange("total steps must be >= 1");
    const double T = static_cast<double>(total_steps);
    if (!(t >= 0.0 && t <= T)) throw InvalidRange("schedule step outside [0, T]");

    const double s0 = schedule.s0;
    const double s1 = schedule.s1;
    const double u = t / T;
    switch (schedule.kind) {
        case ScheduleKind::fixed:
            return s0;
        case ScheduleKind::linear_decreasing:
            return s1 - (s1 - s0) * u;
        case ScheduleKind::cosine_ramp:
            return s0 + (s1 - s0) * (1.0 - std::cos(std::numbers::pi * u)) / 2.0;
        case ScheduleKind::step:
            return t < T / 2.0 ? s0 : s1;
        case ScheduleKind::exponential:
            return s0 + (s1 - s0) * (1.0 - std::exp(-*schedule.alpha * u));
        case ScheduleKind::sigmoid:
            return s0 + (s1 - s0) / (1.0 + std::exp(-*schedule.beta_steep * (u - 0.5)));
    }
    throw InvalidRange("unknown schedule kind");
}

Vector combine_cfg(std::span<const double> eps_cond, std::span<const double> eps_uncond,
                   double scale) {
    if (eps_cond.size() != eps_uncond.size()) {
        throw DimensionMismatch("combine_cfg: conditional and unconditional predictions differ "
                                "in length");
    }
    if (!std::isfinite(scale)) throw InvalidRange("guidance scale must be finite");
    // Written as cond + s (cond - uncond): equal branches and s = 0 both return cond exactly.
    Vector out(eps_cond.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = eps_cond[i] + scale * (eps_cond[i] - eps_uncond[i]);
    }
    return out;
}

}  // namespace energylab
