#include "energylab/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "energylab/errors.hpp"

namespace energylab {

std::string format_score(double value) {
    if (!std::isfinite(value)) return "nan";
    char buf[400];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::abs(value),
                                   std::chars_format::fixed);
    if (ec != std::errc()) throw InvalidRange("format_score: value out of range");
    std::string s(buf, end);

    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += '.';
        dot = s.size() - 1;
    }
    s.append(4, '0');  // guarantees four fractional digits exist
    std::string kept = s.substr(0, dot + 5);
    const std::string tail = s.substr(dot + 5);

    const bool nonzero_tail = tail.find_first_not_of('0') != std::string::npos;
    bool round_up = false;
    if (nonzero_tail) {
        if (tail[0] > '5') {
            round_up = true;
        } else if (tail[0] == '5') {
            const bool exact_half = tail.find_first_not_of('0', 1) == std::string::npos;
            round_up = !exact_half || ((kept.back() - '0') % 2 == 1);
        }
    }
    if (round_up) {
        int i = static_cast<int>(kept.size()) - 1;
        while (i >= 0) {
            if (kept[i] == '.') {
                --i;
                continue;
            }
            if (kept[i] == '9') {
                kept[i] = '0';
                --i;
            } else {
                ++kept[i];
                break;
            }
        }
        if (i < 0) kept.insert(kept.begin(), '1');
    }
    const bool is_zero = kept.find_first_not_of("0.") == std::string::npos;
    if (value < 0 && !is_zero) kept.insert(kept.begin(), '-');
    return kept;
}

std::string column_label(const GuidanceSchedule& guidance) {
    if (guidance.kind == ScheduleKind::fixed) return scale_label(guidance);
    return to_string(guidance.kind) + ":" + scale_label(guidance);
}

SummaryTable summary_table(const MetricsReport& report) {
    if (report.groups.empty()) throw InvalidRange("summary_table: empty report");

    std::vector<SamplerKind> samplers;
    std::vector<GuidanceSchedule> columns;
    for (const auto& g : report.groups) {
        if (std::find(samplers.begin(), samplers.end(), g.key.sampler) == samplers.end()) {
            samplers.push_back(g.key.sampler);
        }
        if (std::find(columns.begin(), columns.end(), g.key.guidance) == columns.end()) {
            columns.push_back(g.key.guidance);
        }
    }
    std::sort(samplers.begin(), samplers.end());
    std::sort(columns.begin(), columns.end(), [](const auto& a, const auto& b) {
        return RunKey{SamplerKind::ddim, a} < RunKey{SamplerKind::ddim, b};
    });

    SummaryTable table;
    for (auto s : samplers) table.row_labels.push_back(to_string(s));
    for (const auto& c : columns) table.column_labels.push_back(column_label(c));
    table.cells.assign(samplers.size(), std::vector<std::optional<double>>(columns.size()));
    for (const auto& g : report.groups) {
        const auto r = std::find(samplers.begin(), samplers.end(), g.key.sampler) - samplers.begin();
        const auto c = std::find(columns.begin(), columns.end(), g.key.guidance) - columns.begin();
        table.cells[r][c] = g.mean.stability;
    }
    return table;
}

std::string SummaryTable::text() const {
    std::vector<std::string> header{"sampler \\ cfg"};
    header.insert(header.end(), column_labels.begin(), column_labels.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        std::vector<std::string> row{row_labels[r]};
        for (const auto& cell : cells[r]) row.push_back(cell ? format_score(*cell) : "--");
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << "  ";
            if (c == 0) {
                out << row[c] << std::string(widths[c] - row[c].size(), ' ');
            } else {
                out << std::string(widths[c] - row[c].size(), ' ') << row[c];
            }
        }
        out << '\n';
    };
    emit(header);
    std::size_t total = 0;
    for (auto w : widths) total += w;
    out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
    for (const auto& row : rows) emit(row);
    return out.str();
}

std::string SummaryTable::csv() const {
    std::ostringstream out;
    out << "sampler";
    for (const auto& c : column_labels) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        out << row_labels[r];
        for (const auto& cell : cells[r]) out << ',' << (cell ? format_score(*cell) : "");
        out << '\n';
    }
    return out.str();
}

}  // namespace energylab
