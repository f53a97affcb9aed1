#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "energylab/diffusion.hpp"
#include "energylab/energy.hpp"
#include "energylab/guidance.hpp"
#include "energylab/score_oracle.hpp"

namespace energylab {

enum class SamplerKind { ddim, euler_ancestral, dpmpp_2m };

inline constexpr SamplerKind kAllSamplers[] = {SamplerKind::ddim, SamplerKind::euler_ancestral,
                                               SamplerKind::dpmpp_2m};

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

// Deterministic DDIM (eta = 0).
Vector ddim_step(std::span<const double> x_t, std::span<const double> eps_hat, double alpha_bar_t,
                 double alpha_bar_next);

// Ancestral DDIM (eta = 1): sigma_up^2 = (1 - ab_next)/(1 - ab_t) * (1 - ab_t/ab_next).
Vector euler_ancestral_step(std::span<const double> x_t, std::span<const double> eps_hat,
                            double alpha_bar_t, double alpha_bar_next,
                            std::span<const double> z);

// Half-log-SNR lambda = ln(alpha / sigma) with alpha = sqrt(ab), sigma = sqrt(1 - ab).
double half_log_snr(double alpha_bar);

struct LambdaTriplet {
    std::optional<double> prev2;  // absent on the first step
    double prev = 0.0;
    double curr = 0.0;
};

/// DPM-Solver++(2M) data-prediction update from the previous time to the
/// current one. `x0_pred_prev` is the data prediction from the step before,
/// absent on the first step (which then reduces to DDIM).
Vector dpmpp_2m_step(std::span<const double> x_prev, std::span<const double> x0_pred_curr,
                     std::optional<std::span<const double>> x0_pred_prev,
                     const LambdaTriplet& lambdas, double alpha_curr, double sigma_prev,
                     double sigma_curr);

struct StepRecord {
    int step = 0;
    int timestep = 0;  // -1 marks the clean boundary after the last step
    double s_effective = 0.0;
    double energy = 0.0;
    bool clipped = false;
    bool refreshed = false;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunRecord {
    SamplerKind sampler = SamplerKind::ddim;
    GuidanceSchedule guidance;
    std::uint64_t seed = 0;
    std::vector<StepRecord> trajectory;  // steps + 1 entries, row 0 is the initial noise
    Vector final_sample;

    EnergyTrajectory energies() const;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Guided reverse diffusion from seeded N(0, I) noise over `grid`.
///
/// Step k (1-based) uses the guidance scale at schedule position k - 1, moves
/// from grid.indices[k-1] to grid.indices[k] (or to the clean boundary), then
/// applies noise refresh and energy clipping, in that order, before recording
/// the energy. The adaptive clipping threshold is evaluated at the number of
/// remaining steps, so it is loosest early in sampling.
RunRecord run_sampler(const ConditionalPair& pair, const NoiseSchedule& schedule,
                      const TimestepGrid& grid, const GuidanceSchedule& guidance,
                      SamplerKind sampler, const EnergyControl& energy_ctrl, std::uint64_t seed);

}  // namespace energylab
