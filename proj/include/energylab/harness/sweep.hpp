#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "energylab/harness/config.hpp"
#include "energylab/harness/run_io.hpp"

namespace energylab {

struct SweepOptions {
    unsigned workers = 1;
    std::ostream* progress = nullptr;
    bool persist = true;  // write each run directory under config.output_dir
};

struct RunFailure {
    RunSpec spec;
    std::string message;
};

struct SweepResult {
    std::vector<RunArtifacts> runs;  // grid order, failures omitted
    std::vector<RunFailure> failures;
};

// Cartesian grid in scenario, sampler, guidance, seed order.
std::vector<RunSpec> expand_grid(const SweepConfig& config);

RunArtifacts execute_run(const RunSpec& spec);

SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options = {});

}  // namespace energylab
