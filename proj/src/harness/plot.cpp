#include "energylab/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "energylab/errors.hpp"

namespace energylab {

std::string to_string(GroupBy group_by) {
    switch (group_by) {
        case GroupBy::sampler: return "sampler";
        case GroupBy::scale: return "scale";
        case GroupBy::schedule: return "schedule";
    }
    return "unknown";
}

GroupBy parse_group_by(std::string_view name) {
    if (name == "sampler") return GroupBy::sampler;
    if (name == "scale") return GroupBy::scale;
    if (name == "schedule") return GroupBy::schedule;
    throw InvalidRange("unknown group-by '" + std::string(name) +
                       "' (expected sampler, scale or schedule)");
}

std::string group_label(const RunArtifacts& run, GroupBy group_by) {
    const auto& g = run.spec.guidance;
    switch (group_by) {
        case GroupBy::sampler:
            return to_string(run.spec.sampler);
        case GroupBy::scale:
            if (g.kind == ScheduleKind::fixed) return "s=" + scale_label(g);
            return to_string(g.kind) + " " + scale_label(g);
        case GroupBy::schedule:
            return to_string(g.kind);
    }
    return {};
}

namespace {

using SortKey = std::tuple<int, int, double, double, double, double, std::string>;

SortKey sort_key(const RunArtifacts& run, GroupBy group_by) {
    const auto& g = run.spec.guidance;
    const std::string label = group_label(run, group_by);
    switch (group_by) {
        case GroupBy::sampler:
            return {static_cast<int>(run.spec.sampler), 0, 0, 0, 0, 0, label};
        case GroupBy::scale:
            return {0, static_cast<int>(g.kind), g.s0, g.s1, g.alpha.value_or(0),
                    g.beta_steep.value_or(0), label};
        case GroupBy::schedule:
            return {0, static_cast<int>(g.kind), 0, 0, 0, 0, label};
    }
    return {};
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

std::string tick_text(double v, double step) {
    char buf[32];
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::vector<PlotSeries> group_series(std::span<const RunArtifacts> runs, GroupBy group_by) {
    if (runs.empty()) throw InvalidRange("plot: empty run selection");

    std::map<SortKey, std::vector<EnergyTrajectory>> groups;
    for (const auto& run : runs) groups[sort_key(run, group_by)].push_back(run.record.energies());

    std::vector<PlotSeries> out;
    for (const auto& [key, trajectories] : groups) {
        const StepStatistics stats = aggregate_trajectories(trajectories);
        PlotSeries s;
        s.label = std::get<6>(key);
        s.mean = stats.mean;
        s.stddev.resize(stats.variance.size());
        std::transform(stats.variance.begin(), stats.variance.end(), s.stddev.begin(),
                       [](double v) { return std::sqrt(v); });
        s.runs = trajectories.size();
        out.push_back(std::move(s));
    }
    return out;
}

std::string render_energy_svg(std::span<const PlotSeries> series, std::string_view title) {
    if (series.empty()) throw InvalidRange("plot: no series to draw");

    constexpr double width = 860, height = 520;
    constexpr double left = 70, right = 200, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::size_t max_len = 0;
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    for (const auto& s : series) {
        max_len = std::max(max_len, s.mean.size());
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            const double band = s.runs > 1 ? s.stddev[i] : 0.0;
            y_lo = std::min(y_lo, s.mean[i] - band);
            y_hi = std::max(y_hi, s.mean[i] + band);
        }
    }
    if (max_len == 0) throw InvalidRange("plot: series have no points");
    if (y_hi - y_lo < 1e-12) {
        const double pad = std::max(0.5, std::abs(y_hi) * 0.1);
        y_lo -= pad;
        y_hi += pad;
    }
    const double y_step = nice_step(y_hi - y_lo, 6);
    y_lo = std::floor(y_lo / y_step) * y_step;
    y_hi = std::ceil(y_hi / y_step) * y_step;
    const double x_max = std::max<double>(1.0, static_cast<double>(max_len - 1));

    auto px = [&](double step) { return left + step / x_max * plot_w; };
    auto py = [&](double e) { return top + (1.0 - (e - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
    }

    // grid and ticks
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double y = y_lo; y <= y_hi + y_step * 1e-6; y += y_step) {
        svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\""
            << num(left + plot_w) << "\" y2=\"" << num(py(y))
            << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4)
            << "\" text-anchor=\"end\">" << tick_text(y, y_step) << "</text>\n";
    }
    const double x_step = nice_step(x_max, 10);
    for (double x = 0; x <= x_max + 1e-9; x += x_step) {
        svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
            << num(px(x)) << "\" y2=\"" << num(top + plot_h + 4) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + plot_h + 18)
            << "\" text-anchor=\"middle\">" << tick_text(x, x_step) << "</text>\n";
    }
    svg << "</g>\n";

    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
        << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">step</text>\n";
    svg << "<text x=\"18\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
        << num(top + plot_h / 2) << ")\">energy</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        if (s.runs > 1) {
            svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.15\" "
                << "stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.mean.size(); ++i) {
                svg << num(px(static_cast<double>(i))) << ',' << num(py(s.mean[i] + s.stddev[i]))
                    << ' ';
            }
            for (std::size_t i = s.mean.size(); i-- > 0;) {
                svg << num(px(static_cast<double>(i))) << ',' << num(py(s.mean[i] - s.stddev[i]))
                    << ' ';
            }
            svg << "\"/>\n";
        }
        svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            svg << num(px(static_cast<double>(i))) << ',' << num(py(s.mean[i])) << ' ';
        }
        svg << "\"/>\n";
    }

    svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double y = top + 12 + 20.0 * static_cast<double>(k);
        const double x = left + plot_w + 16;
        svg << "<g class=\"legend-entry\"><line x1=\"" << num(x) << "\" y1=\"" << num(y)
            << "\" x2=\"" << num(x + 24) << "\" y2=\"" << num(y) << "\" stroke=\""
            << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/><text x=\""
            << num(x + 30) << "\" y=\"" << num(y + 4) << "\">" << xml_escape(series[k].label)
            << "</text></g>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void emit_energy_plot(std::span<const RunArtifacts> runs, GroupBy group_by,
                      const std::filesystem::path& out_path, std::string_view title) {
    const auto series = group_series(runs, group_by);
    const std::string text = render_energy_svg(series, title);
    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path.string());
    out << text;
}

}  // namespace energylab
