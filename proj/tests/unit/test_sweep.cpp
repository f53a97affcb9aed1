#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/temp_dir.hpp"
#include "energylab/harness/sweep.hpp"

using namespace energylab;
using testing_support::TempDir;

namespace {

ScenarioSpec two_mode(const std::string& name, double mu) {
    return {name, 4, {{0.5, Vector(4, mu), 0.1}, {0.5, Vector(4, -mu), 0.1}}, {0}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("single-point grid writes one run directory") {
    TempDir tmp("sweep1");
    SweepConfig cfg;
    cfg.scenarios = {two_mode("a", 1.0)};
    cfg.samplers = {SamplerKind::ddim};
    cfg.guidance = {fixed_schedule(7)};
    cfg.seeds = {0};
    cfg.steps = 10;
    cfg.output_dir = tmp.path();
    std::ostringstream progress;
    const auto result = run_sweep(cfg, {1, &progress, true});
    CHECK(result.failures.empty());
    REQUIRE(result.runs.size() == 1);
    const auto dirs = list_run_dirs(tmp.path());
    REQUIRE(dirs.size() == 1);
    CHECK(dirs[0].filename() == run_dir_name(result.runs[0].spec));
    CHECK(progress.str().find("[1/1]") != std::string::npos);
    CHECK(read_run(dirs[0]) == result.runs[0]);
}

TEST_CASE("grid cardinality, ordering and byte-identical re-runs") {
    SweepConfig cfg;
    cfg.scenarios = {two_mode("near", 1.0), two_mode("far", 2.0)};
    cfg.samplers.assign(std::begin(kAllSamplers), std::end(kAllSamplers));
    for (double s : kDefaultCfgScales) cfg.guidance.push_back(fixed_schedule(s));
    cfg.seeds = {0, 1, 2};
    cfg.steps = 8;

    const auto grid = expand_grid(cfg);
    REQUIRE(grid.size() == 126);
    CHECK(grid[0].scenario.name == "near");
    CHECK(grid[0].seed == 0);
    CHECK(grid[1].seed == 1);
    CHECK(grid[3].guidance == fixed_schedule(5));
    CHECK(grid[21].sampler == SamplerKind::euler_ancestral);
    CHECK(grid[63].scenario.name == "far");

    TempDir first("sweep_a"), second("sweep_b");
    cfg.output_dir = first.path();
    const auto a = run_sweep(cfg, {4, nullptr, true});
    cfg.output_dir = second.path();
    const auto b = run_sweep(cfg, {1, nullptr, true});
    CHECK(a.failures.empty());
    CHECK(a.runs.size() == 126);
    const auto dirs_a = list_run_dirs(first.path());
    const auto dirs_b = list_run_dirs(second.path());
    REQUIRE(dirs_a.size() == 126);
    REQUIRE(dirs_b.size() == 126);
    for (std::size_t i = 0; i < dirs_a.size(); ++i) {
        REQUIRE(dirs_a[i].filename() == dirs_b[i].filename());
        REQUIRE(slurp(dirs_a[i] / "trajectory.csv") == slurp(dirs_b[i] / "trajectory.csv"));
    }
    for (std::size_t i = 0; i < a.runs.size(); ++i) REQUIRE(a.runs[i] == b.runs[i]);
}

TEST_CASE("failing runs are recorded and skipped") {
    SweepConfig cfg;
    cfg.scenarios = {two_mode("ok", 1.0)};
    // An extreme scale on a sharply peaked mixture overflows the energy.
    cfg.scenarios.push_back({"blowup", 2, {{0.5, Vector(2, 1e200), 1e-3}, {0.5, Vector(2, -1e200), 1e-3}}, {0}});
    cfg.samplers = {SamplerKind::ddim};
    cfg.guidance = {fixed_schedule(3)};
    cfg.seeds = {0};
    cfg.steps = 5;
    const auto result = run_sweep(cfg, {2, nullptr, false});
    CHECK(result.runs.size() + result.failures.size() == 2);
    CHECK(result.runs.size() == 1);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].spec.scenario.name == "blowup");
    CHECK_FALSE(result.failures[0].message.empty());
}
