#include "energylab/energy.hpp"

#include <cmath>
#include <limits>

#include "energylab/errors.hpp"

namespace energylab {

std::string to_string(ClipMode mode) {
    return mode == ClipMode::paper ? "paper" : "sqrt";
}

ClipMode parse_clip_mode(std::string_view name) {
    if (name == "paper") return ClipMode::paper;
    if (name == "sqrt") return ClipMode::sqrt;
    throw InvalidRange("unknown clip mode '" + std::string(name) + "' (expected paper or sqrt)");
}

void EnergyControl::validate() const {
    if (clipping_enabled && !(e_base > 0.0)) throw InvalidRange("e_base must be positive");
    if (!(gamma >= 0.0)) throw InvalidRange("gamma must be >= 0");
    if (adaptive_threshold && !clipping_enabled) {
        throw InvalidRange("adaptive threshold requires clipping to be enabled");
    }
    if (!(refresh_fraction > 0.0 && refresh_fraction < 1.0)) {
        throw InvalidRange("refresh_fraction must lie in (0, 1)");
    }
    if (!(refresh_blend >= 0.0 && refresh_blend <= 1.0)) {
        throw InvalidRange("refresh_blend must lie in [0, 1]");
    }
}

double energy(std::span<const double> x) {
    if (x.empty()) throw DimensionMismatch("energy of an empty latent is undefined");
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return sq / static_cast<double>(x.size());
}

ClipResult clip_energy(std::span<const double> x, double e_max, ClipMode mode) {
    if (!(e_max > 0.0)) throw InvalidRange("E_max must be positive");
    const double e = energy(x);
    ClipResult result{Vector(x.begin(), x.end()), false};
    if (!(e > e_max)) return result;

    double factor = mode == ClipMode::paper ? e_max / e : std::sqrt(e_max / e);
    auto scaled = [&](double f) {
        for (std::size_t i = 0; i < x.size(); ++i) result.x[i] = x[i] * f;
        return energy(result.x);
    };
    // Rounding can leave the result an ulp above E_max; step the factor down until it is not.
    while (scaled(factor) > e_max) factor = std::nextafter(factor, 0.0);
    result.clipped = true;
    return result;
}

double adaptive_threshold(double e_base, double gamma, double t, int total_steps) {
    if (total_steps < 1) throw InvalidRange("total steps must be >= 1");
    return e_base * (1.0 + gamma * t / static_cast<double>(total_steps));
}

Vector noise_refresh(std::span<const double> x, double alpha_bar_t, std::span<const double> z,
                     double blend) {
    if (x.size() != z.size()) throw DimensionMismatch("noise_refresh: x and z differ in length");
    if (!(alpha_bar_t > 0.0 && alpha_bar_t < 1.0)) {
        throw InvalidRange("noise_refresh: alpha_bar_t outside (0, 1)");
    }
    if (!(blend >= 0.0 && blend <= 1.0)) throw InvalidRange("noise_refresh: blend outside [0, 1]");
    if (blend == 0.0) return Vector(x.begin(), x.end());

    const double keep = std::sqrt(1.0 - blend);
    const double fresh = std::sqrt(blend) * std::sqrt(1.0 - alpha_bar_t);
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = keep * x[i] + fresh * z[i];
    return out;
}

StepStatistics aggregate_trajectories(std::span<const EnergyTrajectory> runs) {
    if (runs.empty()) throw InvalidRange("aggregate_trajectories: no runs");
    const std::size_t len = runs.front().energies.size();
    for (const auto& r : runs) {
        if (r.energies.size() != len) {
            throw DimensionMismatch("aggregate_trajectories: trajectories differ in length");
        }
    }

    StepStatistics stats{Vector(len, 0.0), Vector(len, 0.0)};
    const double n = static_cast<double>(runs.size());
    for (std::size_t s = 0; s < len; ++s) {
        // Welford update per step.
        double mean = 0.0;
        double m2 = 0.0;
        double count = 0.0;
        for (const auto& r : runs) {
            count += 1.0;
            const double delta = r.energies[s] - mean;
            mean += delta / count;
            m2 += delta * (r.energies[s] - mean);
        }
        stats.mean[s] = mean;
        stats.variance[s] = m2 / n;
    }
    return stats;
}

}  // namespace energylab
