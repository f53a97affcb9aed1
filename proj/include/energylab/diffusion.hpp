#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace energylab {

using Vector = std::vector<double>;

enum class NoiseScheduleKind { linear };

std::string to_string(NoiseScheduleKind kind);
NoiseScheduleKind parse_noise_schedule_kind(std::string_view name);

/// Discrete variance-preserving noise schedule.
///
/// `beta[t]` is the per-step noise variance and `alpha_bar[t]` the cumulative
/// product of (1 - beta) up to and including t. Timestep -1 denotes the clean
/// boundary, where alpha_bar is exactly 1.
struct NoiseSchedule {
    NoiseScheduleKind kind = NoiseScheduleKind::linear;
    Vector beta;
    Vector alpha_bar;

    int train_steps() const { return static_cast<int>(beta.size()); }

    // Accepts t in [-1, train_steps()).
    double alpha_bar_at(int t) const;
};

struct NoiseScheduleParams {
    NoiseScheduleKind kind = NoiseScheduleKind::linear;
    int train_steps = 1000;
    double beta_min = 1e-4;
    double beta_max = 0.02;

    friend bool operator==(const NoiseScheduleParams&, const NoiseScheduleParams&) = default;
};

NoiseSchedule build_noise_schedule(NoiseScheduleKind kind, int train_steps, double beta_min,
                                   double beta_max);
NoiseSchedule build_noise_schedule(const NoiseScheduleParams& params);

/// Sampling timesteps, strictly decreasing, starting at train_steps - 1.
struct TimestepGrid {
    int steps = 0;
    std::vector<int> indices;
};

TimestepGrid make_timestep_grid(const NoiseSchedule& schedule, int steps);

struct LatentState {
    Vector x;
    int t = -1;

    std::size_t size() const { return x.size(); }
};

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * noise
LatentState forward_diffuse(std::span<const double> x0, int t, std::span<const double> noise,
                            const NoiseSchedule& schedule);

}  // namespace energylab
