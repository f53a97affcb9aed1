#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "energylab/diffusion.hpp"

namespace energylab {

// paper: x * min(1, E_max / E), which leaves the clipped energy at E_max^2 / E.
// sqrt:  x * min(1, sqrt(E_max / E)), which lands exactly on E_max.
enum class ClipMode { paper, sqrt };

std::string to_string(ClipMode mode);
ClipMode parse_clip_mode(std::string_view name);

struct EnergyControl {
    bool clipping_enabled = false;
    double e_base = 1.0;
    double gamma = 0.0;
    bool adaptive_threshold = false;
    bool refresh_enabled = false;
    double refresh_fraction = 0.5;
    double refresh_blend = 0.5;
    ClipMode clip_mode = ClipMode::paper;

    // Throws InvalidRange; adaptive_threshold requires clipping_enabled.
    void validate() const;

    friend bool operator==(const EnergyControl&, const EnergyControl&) = default;
};

struct EnergyTrajectory {
    Vector energies;

    std::size_t step_count() const { return energies.empty() ? 0 : energies.size() - 1; }
};

// ||x||^2 / N
double energy(std::span<const double> x);

struct ClipResult {
    Vector x;
    bool clipped = false;
};

ClipResult clip_energy(std::span<const double> x, double e_max, ClipMode mode = ClipMode::paper);

// E_base * (1 + gamma * t / T)
double adaptive_threshold(double e_base, double gamma, double t, int total_steps);

// sqrt(1 - blend) * x + sqrt(blend) * sqrt(1 - alpha_bar_t) * z
Vector noise_refresh(std::span<const double> x, double alpha_bar_t, std::span<const double> z,
                     double blend);

struct StepStatistics {
    Vector mean;
    Vector variance;  // population variance across runs
};

StepStatistics aggregate_trajectories(std::span<const EnergyTrajectory> runs);

}  // namespace energylab
