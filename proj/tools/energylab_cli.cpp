// energylab: guided diffusion sampling sweeps on analytic mixtures, with
// latent-energy trajectories, energy scores, SVG plots and summary tables.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "energylab/harness/config.hpp"
#include "energylab/harness/plot.hpp"
#include "energylab/harness/report.hpp"
#include "energylab/harness/run_io.hpp"
#include "energylab/harness/sweep.hpp"
#include "energylab/metrics.hpp"

namespace fs = std::filesystem;
using namespace energylab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string config;
    std::string out;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::int64_t> seed_override;
    std::string group_by = "scale";
};

SweepConfig load_config(const Options& opt) {
    SweepConfig cfg = parse_config(opt.config);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    if (opt.seed_override) {
        if (*opt.seed_override < 0) throw ConfigError("--seed-override must be >= 0", 0, "seeds");
        cfg.seeds = {static_cast<std::uint64_t>(*opt.seed_override)};
    }
    return cfg;
}

std::vector<RunArtifacts> load_runs(const fs::path& dir) {
    std::vector<RunArtifacts> runs;
    for (const auto& d : list_run_dirs(dir)) runs.push_back(read_run(d));
    if (runs.empty()) throw std::runtime_error("no run_* directories under " + dir.string());
    return runs;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string write_report(const std::vector<RunArtifacts>& runs, const fs::path& dir) {
    std::vector<ScoredRun> scored;
    for (const auto& r : runs) scored.push_back({{r.spec.sampler, r.spec.guidance}, r.metrics});
    const SummaryTable table = summary_table(aggregate_report(scored));
    write_file(dir / "summary.txt", table.text());
    write_file(dir / "summary.csv", table.csv());
    return table.text();
}

void write_plots(const std::vector<RunArtifacts>& runs, const fs::path& dir, GroupBy group_by) {
    const fs::path plots = dir / "plots";
    emit_energy_plot(runs, group_by, plots / ("energy_by_" + to_string(group_by) + ".svg"),
                     "Mean energy per step by " + to_string(group_by));

    std::map<SamplerKind, std::vector<RunArtifacts>> by_sampler;
    for (const auto& r : runs) by_sampler[r.spec.sampler].push_back(r);
    for (const auto& [sampler, subset] : by_sampler) {
        emit_energy_plot(subset, GroupBy::scale,
                         plots / ("energy_by_scale_" + to_string(sampler) + ".svg"),
                         "Energy evolution, " + to_string(sampler));
    }
}

void print_scores(const RunArtifacts& run, const fs::path& dir) {
    const auto& m = run.metrics;
    std::cout << dir.string() << '\n'
              << "  stability   " << format_score(m.stability) << '\n'
              << "  consistency " << format_score(m.consistency) << '\n'
              << "  efficiency  " << format_score(m.efficiency) << '\n'
              << "  convergence " << format_score(m.convergence) << '\n';
}

int cmd_run(const Options& opt) {
    const SweepConfig cfg = load_config(opt);
    const RunSpec spec = expand_grid(cfg).front();
    const RunArtifacts run = execute_run(spec);
    const fs::path dir = cfg.output_dir / run_dir_name(spec);
    write_run(dir, run);
    print_scores(run, dir);
    return kExitOk;
}

int cmd_sweep(const Options& opt) {
    const SweepConfig cfg = load_config(opt);
    const GroupBy group_by = parse_group_by(opt.group_by);
    std::cerr << "sweep: " << cfg.grid_size() << " runs, " << opt.workers << " worker(s) -> "
              << cfg.output_dir.string() << '\n';

    SweepOptions sweep_opt;
    sweep_opt.workers = opt.workers;
    sweep_opt.progress = &std::cerr;
    const SweepResult result = run_sweep(cfg, sweep_opt);

    if (!result.runs.empty()) {
        write_plots(result.runs, cfg.output_dir, group_by);
        std::cout << write_report(result.runs, cfg.output_dir);
    }
    for (const auto& f : result.failures) {
        std::cerr << "failed: " << run_dir_name(f.spec) << ": " << f.message << '\n';
    }
    return result.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_metrics(const Options& opt) {
    int failures = 0;
    for (const auto& dir : list_run_dirs(opt.out)) {
        try {
            RunArtifacts run = read_run(dir);
            run.metrics = energy_metrics(run.record, run.spec.skip_initial);
            write_run(dir, run);
        } catch (const std::exception& e) {
            std::cerr << "failed: " << dir.string() << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_plot(const Options& opt) {
    write_plots(load_runs(opt.out), opt.out, parse_group_by(opt.group_by));
    return kExitOk;
}

int cmd_report(const Options& opt) {
    std::cout << write_report(load_runs(opt.out), opt.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy profiling and guidance-schedule sweeps for diffusion samplers"};
    app.require_subcommand(1);
    Options opt;

    auto add_group_by = [&](CLI::App* sub) {
        sub->add_option("--group-by", opt.group_by, "Plot grouping")
            ->check(CLI::IsMember({"sampler", "scale", "schedule"}));
    };

    auto* run = app.add_subcommand("run", "Execute the first grid point of a config");
    run->add_option("--config", opt.config, "Sweep config file")->required();
    run->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    run->add_option("--seed-override", opt.seed_override, "Use this seed only");

    auto* sweep = app.add_subcommand("sweep", "Execute the full config grid");
    sweep->add_option("--config", opt.config, "Sweep config file")->required();
    sweep->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    sweep->add_option("--workers", opt.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    sweep->add_option("--seed-override", opt.seed_override, "Use this seed only");
    add_group_by(sweep);

    auto* metrics = app.add_subcommand("metrics", "Recompute metrics.json from trajectories");
    metrics->add_option("--out", opt.out, "Sweep output directory")->required();

    auto* plot = app.add_subcommand("plot", "Write SVG energy plots for stored runs");
    plot->add_option("--out", opt.out, "Sweep output directory")->required();
    add_group_by(plot);

    auto* report = app.add_subcommand("report", "Print and write the summary table");
    report->add_option("--out", opt.out, "Sweep output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(opt);
        if (*sweep) return cmd_sweep(opt);
        if (*metrics) return cmd_metrics(opt);
        if (*plot) return cmd_plot(opt);
        if (*report) return cmd_report(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
    return kExitOk;
}
