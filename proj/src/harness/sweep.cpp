#include "energylab/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace energylab {

std::vector<RunSpec> expand_grid(const SweepConfig& config) {
    std::vector<RunSpec> grid;
    grid.reserve(config.grid_size());
    for (const auto& scenario : config.scenarios) {
        for (auto sampler : config.samplers) {
            for (const auto& guidance : config.guidance) {
                for (auto seed : config.seeds) {
                    grid.push_back(RunSpec{scenario, sampler, guidance, seed, config.steps,
                                           config.noise, config.energy_ctrl,
                                           config.skip_initial});
                }
            }
        }
    }
    return grid;
}

RunArtifacts execute_run(const RunSpec& spec) {
    const NoiseSchedule schedule = build_noise_schedule(spec.noise);
    const TimestepGrid grid = make_timestep_grid(schedule, spec.steps);
    const ConditionalPair pair = make_conditional_pair(spec.scenario);

    RunArtifacts out;
    out.spec = spec;
    out.record = run_sampler(pair, schedule, grid, spec.guidance, spec.sampler, spec.energy_ctrl,
                             spec.seed);
    out.metrics = energy_metrics(out.record, spec.skip_initial);
    return out;
}

SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options) {
    validate(config);
    const std::vector<RunSpec> grid = expand_grid(config);

    std::vector<std::optional<RunArtifacts>> results(grid.size());
    std::vector<std::optional<std::string>> errors(grid.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            const std::string dir_name = run_dir_name(grid[i]);
            try {
                RunArtifacts run = execute_run(grid[i]);
                if (options.persist) write_run(config.output_dir / dir_name, run);
                results[i] = std::move(run);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                *options.progress << "[" << finished << "/" << grid.size() << "] " << dir_name
                                  << (errors[i] ? " FAILED: " + *errors[i] : std::string(" ok"))
                                  << '\n';
            }
        }
    };

    const unsigned workers =
        std::clamp<unsigned>(options.workers, 1u, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    SweepResult out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (results[i]) {
            out.runs.push_back(std::move(*results[i]));
        } else {
            out.failures.push_back({grid[i], errors[i].value_or("unknown failure")});
        }
    }
    return out;
}

}  // namespace energylab
