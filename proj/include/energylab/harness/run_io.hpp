#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "energylab/metrics.hpp"
#include "energylab/samplers.hpp"
#include "energylab/score_oracle.hpp"

namespace energylab {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce one run: a single point of the sweep grid.
struct RunSpec {
    ScenarioSpec scenario;
    SamplerKind sampler = SamplerKind::ddim;
    GuidanceSchedule guidance;
    std::uint64_t seed = 0;
    int steps = 50;
    NoiseScheduleParams noise;
    EnergyControl energy_ctrl;
    bool skip_initial = false;

    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct RunArtifacts {
    RunSpec spec;
    RunRecord record;
    EnergyScores metrics;

    friend bool operator==(const RunArtifacts&, const RunArtifacts&) = default;
};

inline constexpr const char* kTrajectoryHeader =
    "step,timestep,s_effective,energy,clipped,refreshed";

nlohmann::json to_json(const RunSpec& spec);
RunSpec run_spec_from_json(const nlohmann::json& j);

// 16 hex digits of FNV-1a over the canonical JSON echo of the spec.
std::string run_hash(const RunSpec& spec);
std::string run_dir_name(const RunSpec& spec);

void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& rows);
std::vector<StepRecord> read_trajectory_csv(std::istream& in);

/// Writes config.json, trajectory.csv and metrics.json into `dir`, creating it.
void write_run(const std::filesystem::path& dir, const RunArtifacts& artifacts);
RunArtifacts read_run(const std::filesystem::path& dir);

// Every run_* subdirectory of `root`, sorted by name.
std::vector<std::filesystem::path> list_run_dirs(const std::filesystem::path& root);

}  // namespace energylab
