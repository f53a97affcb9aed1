#pragma once

#include <optional>
#include <string>
#include <vector>

#include "energylab/metrics.hpp"

namespace energylab {

// Four decimals, ties to even on the shortest decimal form: 0.99985 -> "0.9998".
std::string format_score(double value);

/// Rows are samplers, columns are guidance settings, cells the mean
/// stability score of the group ("--" where the grid has no runs).
struct SummaryTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<std::optional<double>>> cells;

    std::string text() const;
    std::string csv() const;
};

// Column label used for a guidance setting: "7" for fixed, "kind:18->3" otherwise.
std::string column_label(const GuidanceSchedule& guidance);

SummaryTable summary_table(const MetricsReport& report);

}  // namespace energylab
