#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "../support/temp_dir.hpp"
#include "energylab/errors.hpp"
#include "energylab/harness/plot.hpp"
#include "energylab/harness/report.hpp"

using namespace energylab;
namespace pt = boost::property_tree;
using testing_support::TempDir;

namespace {

RunArtifacts fake_run(SamplerKind sampler, GuidanceSchedule guidance, Vector energies, std::uint64_t seed = 0) {
    RunArtifacts a;
    a.spec.sampler = sampler;
    a.spec.guidance = guidance;
    a.spec.seed = seed;
    a.spec.steps = static_cast<int>(energies.size()) - 1;
    a.record.sampler = sampler;
    a.record.guidance = guidance;
    a.record.seed = seed;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        a.record.trajectory.push_back({static_cast<int>(i), 0, guidance.s0, energies[i], false, false});
    }
    a.metrics = energy_metrics(energies);
    return a;
}

pt::ptree parse_xml(const std::string& svg) {
    std::istringstream in(svg);
    pt::ptree tree;
    pt::read_xml(in, tree);
    return tree;
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("constant energy renders as a horizontal line") {
    const std::vector<RunArtifacts> runs{fake_run(SamplerKind::ddim, fixed_schedule(7), Vector(11, 1.3))};
    const auto series = group_series(runs, GroupBy::scale);
    REQUIRE(series.size() == 1);
    CHECK(series[0].label == "s=7");
    CHECK(series[0].mean == Vector(11, 1.3));
    const auto svg = render_energy_svg(series, "constant");
    CHECK_NOTHROW(parse_xml(svg));
    CHECK(count(svg, "class=\"band\"") == 0);

    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("class=\"series\"[^>]*points=\"([^\"]*)\"")));
    std::istringstream pts(m[1].str());
    std::string pair;
    std::set<std::string> ys;
    int n = 0;
    while (pts >> pair) {
        ys.insert(pair.substr(pair.find(',') + 1));
        ++n;
    }
    CHECK(n == 11);
    CHECK(ys.size() == 1);
}

TEST_CASE("legend entries follow the grouping") {
    std::vector<RunArtifacts> runs;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        runs.push_back(fake_run(SamplerKind::ddim, fixed_schedule(3), {1.0, 1.1, 0.9}, seed));
        runs.push_back(fake_run(SamplerKind::ddim, fixed_schedule(18), {1.0, 1.8 + 0.1 * seed, 1.2}, seed));
    }
    const auto svg = render_energy_svg(group_series(runs, GroupBy::scale), "two");
    const auto tree = parse_xml(svg);
    CHECK(tree.get_child("svg").size() > 0);
    CHECK(count(svg, "class=\"legend-entry\"") == 2);
    CHECK(count(svg, "class=\"series\"") == 2);
    CHECK(count(svg, "class=\"band\"") == 2);
    CHECK(svg.find(">step<") != std::string::npos);
    CHECK(svg.find(">energy<") != std::string::npos);
    CHECK(group_series(runs, GroupBy::sampler).size() == 1);
    CHECK(group_series(runs, GroupBy::schedule).size() == 1);

    TempDir tmp("plot");
    emit_energy_plot(runs, GroupBy::scale, tmp.path() / "plots" / "e.svg");
    std::ifstream in(tmp.path() / "plots" / "e.svg");
    pt::ptree from_file;
    CHECK_NOTHROW(pt::read_xml(in, from_file));

    CHECK_THROWS_AS(group_series(std::vector<RunArtifacts>{}, GroupBy::scale), InvalidRange);
    const std::vector<RunArtifacts> ragged{fake_run(SamplerKind::ddim, fixed_schedule(3), {1, 1}),
                                           fake_run(SamplerKind::ddim, fixed_schedule(3), {1, 1, 1})};
    CHECK_THROWS_AS(group_series(ragged, GroupBy::scale), DimensionMismatch);
}

TEST_CASE("labels escape XML metacharacters") {
    const std::vector<RunArtifacts> runs{
        fake_run(SamplerKind::ddim, {ScheduleKind::linear_decreasing, 3, 18, std::nullopt, std::nullopt}, {1, 2})};
    const auto series = group_series(runs, GroupBy::scale);
    CHECK(series[0].label == "linear_decreasing 18->3");
    CHECK_NOTHROW(parse_xml(render_energy_svg(series, "a < b & c")));
}

TEST_CASE("format_score") {
    CHECK(format_score(0.99985) == "0.9998");
    CHECK(format_score(0.99975) == "0.9998");
    CHECK(format_score(0.12345) == "0.1234");
    CHECK(format_score(0.12355) == "0.1236");
    CHECK(format_score(0.123451) == "0.1235");
    CHECK(format_score(1.0) == "1.0000");
    CHECK(format_score(0.5) == "0.5000");
    CHECK(format_score(0.99996) == "1.0000");
}

TEST_CASE("summary table shape and cells") {
    const double scales[] = {3, 5, 7, 10, 12, 15, 18};
    std::vector<ScoredRun> runs;
    for (SamplerKind kind : kAllSamplers) {
        for (double s : scales) {
            runs.push_back({{kind, fixed_schedule(s)}, {0.5, 0.5, 0.5, 0.5}});
            runs.push_back({{kind, fixed_schedule(s)}, {0.6, 0.5, 0.5, 0.5}});
        }
    }
    const auto table = summary_table(aggregate_report(runs));
    CHECK(table.row_labels == std::vector<std::string>{"ddim", "euler_ancestral", "dpmpp_2m"});
    CHECK(table.column_labels == std::vector<std::string>{"3", "5", "7", "10", "12", "15", "18"});
    for (const auto& row : table.cells) {
        REQUIRE(row.size() == 7);
        for (const auto& cell : row) CHECK(*cell == doctest::Approx(0.55));
    }
    const auto csv = table.csv();
    CHECK(csv.rfind("sampler,3,5,7,10,12,15,18\n", 0) == 0);
    CHECK(count(csv, "\n") == 4);
    CHECK(count(csv, "0.5500") == 21);
    CHECK(count(table.text(), "0.5500") == 21);

    const std::vector<ScoredRun> one{{{SamplerKind::dpmpp_2m, fixed_schedule(10)}, {0.9998, 1, 1, 1}}};
    const auto single = summary_table(aggregate_report(one));
    CHECK(single.row_labels.size() == 1);
    CHECK(single.column_labels.size() == 1);
    CHECK(format_score(*single.cells[0][0]) == "0.9998");

    const std::vector<ScoredRun> sparse{{{SamplerKind::ddim, fixed_schedule(3)}, {0.5, 1, 1, 1}},
                                        {{SamplerKind::dpmpp_2m, fixed_schedule(7)}, {0.5, 1, 1, 1}}};
    const auto holes = summary_table(aggregate_report(sparse));
    CHECK(count(holes.text(), " --") == 2);
    CHECK(holes.csv() == "sampler,3,7\nddim,0.5000,\ndpmpp_2m,,0.5000\n");
    CHECK(column_label({ScheduleKind::cosine_ramp, 3, 18, std::nullopt, std::nullopt}) == "cosine_ramp:3->18");
}
