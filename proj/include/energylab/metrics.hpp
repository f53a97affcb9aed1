#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "energylab/guidance.hpp"
#include "energylab/samplers.hpp"

namespace energylab {

/// Trajectory scores, each in (0, 1]:
///   stability    1 / (1 + Var(E))
///   consistency  1 / (1 + Std(E))
///   efficiency   stability / (1 + |E_T - 1|)
///   convergence  1 / (1 + max E - min E)
/// Var is the population variance over the trajectory.
struct EnergyScores {
    double stability = 1.0;
    double consistency = 1.0;
    double efficiency = 1.0;
    double convergence = 1.0;

    friend bool operator==(const EnergyScores&, const EnergyScores&) = default;
};

EnergyScores energy_metrics(std::span<const double> energies);

// With skip_initial, row 0 (the initial noise) is left out.
EnergyScores energy_metrics(const RunRecord& record, bool skip_initial);

struct RunKey {
    SamplerKind sampler = SamplerKind::ddim;
    GuidanceSchedule guidance;

    friend bool operator==(const RunKey&, const RunKey&) = default;
};

// Orders by sampler, then schedule kind, then s0, s1 and steepness.
bool operator<(const RunKey& a, const RunKey& b);

struct ScoredRun {
    RunKey key;
    EnergyScores scores;
};

struct GroupSummary {
    RunKey key;
    std::size_t count = 0;
    EnergyScores mean;
};

struct MetricsReport {
    std::vector<ScoredRun> runs;
    std::vector<GroupSummary> groups;  // sorted by key
};

MetricsReport aggregate_report(std::span<const ScoredRun> runs);

}  // namespace energylab
