#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "energylab/diffusion.hpp"
#include "energylab/energy.hpp"
#include "energylab/guidance.hpp"
#include "energylab/samplers.hpp"
#include "energylab/score_oracle.hpp"

namespace energylab {

/// Bad config file: a parse error (line set) or a validation error (key set).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

inline const std::vector<double> kDefaultCfgScales = {3, 5, 7, 10, 12, 15, 18};
inline const std::vector<std::uint64_t> kDefaultSeeds = {0, 1, 2};
inline constexpr int kDefaultSteps = 50;

struct SweepConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<SamplerKind> samplers;
    std::vector<GuidanceSchedule> guidance;
    int steps = kDefaultSteps;
    std::vector<std::uint64_t> seeds;
    EnergyControl energy_ctrl;
    NoiseScheduleParams noise;
    bool skip_initial = false;
    std::filesystem::path output_dir = "runs";

    // Non-fatal notes raised while applying defaults.
    std::vector<std::string> warnings;

    std::size_t grid_size() const {
        return scenarios.size() * samplers.size() * guidance.size() * seeds.size();
    }
};

SweepConfig parse_config_text(std::string_view text);
SweepConfig parse_config(const std::filesystem::path& path);

// Throws ConfigError naming the offending key.
void validate(const SweepConfig& config);

}  // namespace energylab
