#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "energylab/harness/run_io.hpp"

namespace energylab {

enum class GroupBy { sampler, scale, schedule };

std::string to_string(GroupBy group_by);
GroupBy parse_group_by(std::string_view name);

// Legend label of the group a run falls into.
std::string group_label(const RunArtifacts& run, GroupBy group_by);

struct PlotSeries {
    std::string label;
    Vector mean;
    Vector stddev;  // population std across the group's runs
    std::size_t runs = 0;
};

// One series per group, ordered by sampler, schedule kind and scale.
std::vector<PlotSeries> group_series(std::span<const RunArtifacts> runs, GroupBy group_by);

// Standalone SVG: mean energy per step with a +-1 std band for multi-run groups.
std::string render_energy_svg(std::span<const PlotSeries> series, std::string_view title);

void emit_energy_plot(std::span<const RunArtifacts> runs, GroupBy group_by,
                      const std::filesystem::path& out_path, std::string_view title = {});

}  // namespace energylab
