#include "energylab/diffusion.hpp"

#include <cmath>
#include <string>

#include "energylab/errors.hpp"

namespace energylab {

std::string to_string(NoiseScheduleKind kind) {
    switch (kind) {
        case NoiseScheduleKind::linear:
            return "linear";
    }
    return "unknown";
}

NoiseScheduleKind parse_noise_schedule_kind(std::string_view name) {
    if (name == "linear") return NoiseScheduleKind::linear;
    throw InvalidRange("unknown noise schedule kind '" + std::string(name) + "'");
}

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t == -1) return 1.0;
    if (t < -1 || t >= train_steps()) {
        throw InvalidRange("timestep " + std::to_string(t) + " outside [-1, " +
                           std::to_string(train_steps()) + ")");
    }
    return alpha_bar[static_cast<std::size_t>(t)];
}

NoiseSchedule build_noise_schedule(NoiseScheduleKind kind, int train_steps, double beta_min,
                                   double beta_max) {
    if (train_steps < 1) throw InvalidRange("train_steps must be >= 1");
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
        throw InvalidRange("beta range must satisfy 0 < beta_min <= beta_max < 1");
    }

    NoiseSchedule schedule;
    schedule.kind = kind;
    const auto n = static_cast<std::size_t>(train_steps);
    schedule.beta.resize(n);
    schedule.alpha_bar.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        if (n == 1) {
            schedule.beta[i] = beta_min;
        } else {
            const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
            schedule.beta[i] = beta_min + (beta_max - beta_min) * frac;
        }
    }
    schedule.beta.back() = (n == 1) ? beta_min : beta_max;

    double product = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        product *= 1.0 - schedule.beta[i];
        schedule.alpha_bar[i] = product;
    }
    return schedule;
}

NoiseSchedule build_noise_schedule(const NoiseScheduleParams& params) {
    return build_noise_schedule(params.kind, params.train_steps, params.beta_min,
                                params.beta_max);
}

TimestepGrid make_timestep_grid(const NoiseSchedule& schedule, int steps) {
    const int train_steps = schedule.train_steps();
    if (steps < 1 || steps > train_steps) {
        throw InvalidRange("steps must lie in [1, " + std::to_string(train_steps) + "], got " +
                           std::to_string(steps));
    }
    TimestepGrid grid;
    grid.steps = steps;
    grid.indices.reserve(static_cast<std::size_t>(steps));
    const int stride = train_steps / steps;
    for (int k = 0; k < steps; ++k) grid.indices.push_back(train_steps - 1 - k * stride);
    return grid;
}

LatentState forward_diffuse(std::span<const double> x0, int t, std::span<const double> noise,
                            const NoiseSchedule& schedule) {
    if (x0.size() != noise.size()) {
        throw DimensionMismatch("forward_diffuse: x0 has " + std::to_string(x0.size()) +
                                " elements, noise has " + std::to_string(noise.size()));
    }
    const double ab = schedule.alpha_bar_at(t);
    const double signal = std::sqrt(ab);
    const double sigma = std::sqrt(1.0 - ab);

    LatentState state;
    state.t = t;
    state.x.resize(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) state.x[i] = signal * x0[i] + sigma * noise[i];
    return state;
}

}  // namespace energylab
