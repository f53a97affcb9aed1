#include "energylab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "energylab/errors.hpp"

namespace energylab {

EnergyScores energy_metrics(std::span<const double> energies) {
    if (energies.empty()) throw InvalidRange("energy_metrics: empty trajectory");

    const double n = static_cast<double>(energies.size());
    double mean = 0.0;
    for (double e : energies) mean += e;
    mean /= n;
    double var = 0.0;
    for (double e : energies) var += (e - mean) * (e - mean);
    var /= n;

    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());

    EnergyScores out;
    out.stability = 1.0 / (1.0 + var);
    out.consistency = 1.0 / (1.0 + std::sqrt(var));
    out.efficiency = out.stability / (1.0 + std::abs(energies.back() - 1.0));
    out.convergence = 1.0 / (1.0 + (*hi - *lo));
    return out;
}

EnergyScores energy_metrics(const RunRecord& record, bool skip_initial) {
    const EnergyTrajectory traj = record.energies();
    std::span<const double> view(traj.energies);
    if (skip_initial && view.size() > 1) view = view.subspan(1);
    return energy_metrics(view);
}

bool operator<(const RunKey& a, const RunKey& b) {
    auto tie = [](const RunKey& k) {
        return std::make_tuple(static_cast<int>(k.sampler), static_cast<int>(k.guidance.kind),
                               k.guidance.s0, k.guidance.s1, k.guidance.alpha.value_or(0.0),
                               k.guidance.beta_steep.value_or(0.0));
    };
    return tie(a) < tie(b);
}

MetricsReport aggregate_report(std::span<const ScoredRun> runs) {
    if (runs.empty()) throw InvalidRange("aggregate_report: no runs");

    struct Accum {
        std::size_t count = 0;
        double stab = 0.0, cons = 0.0, eff = 0.0, conv = 0.0;
    };
    std::map<RunKey, Accum> groups;
    for (const auto& run : runs) {
        auto& acc = groups[run.key];
        ++acc.count;
        acc.stab += run.scores.stability;
        acc.cons += run.scores.consistency;
        acc.eff += run.scores.efficiency;
        acc.conv += run.scores.convergence;
    }

    MetricsReport report;
    report.runs.assign(runs.begin(), runs.end());
    for (const auto& [key, acc] : groups) {
        if (acc.count == 0) throw InvalidRange("aggregate_report: empty group");
        const double n = static_cast<double>(acc.count);
        report.groups.push_back(
            {key, acc.count, {acc.stab / n, acc.cons / n, acc.eff / n, acc.conv / n}});
    }
    return report;
}

}  // namespace energylab
