#include "energylab/harness/run_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace energylab {

using nlohmann::json;

namespace {

json scenario_json(const ScenarioSpec& sc) {
    json comps = json::array();
    for (const auto& c : sc.components) {
        comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    }
    return {{"name", sc.name}, {"dim", sc.dim}, {"components", comps}, {"target", sc.target}};
}

json guidance_json(const GuidanceSchedule& g) {
    json j = {{"kind", to_string(g.kind)}, {"s0", g.s0}, {"s1", g.s1}};
    if (g.alpha) j["alpha"] = *g.alpha;
    if (g.beta_steep) j["beta"] = *g.beta_steep;
    return j;
}

GuidanceSchedule guidance_from_json(const json& j) {
    GuidanceSchedule g;
    g.kind = parse_schedule_kind(j.at("kind").get<std::string>());
    g.s0 = j.at("s0").get<double>();
    g.s1 = j.at("s1").get<double>();
    if (j.contains("alpha")) g.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) g.beta_steep = j.at("beta").get<double>();
    return g;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <class T>
T parse_field(std::string_view field, const char* name, std::size_t line) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [p, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || p != last) {
        throw SchemaError("trajectory.csv line " + std::to_string(line) + ": bad " + name +
                          " value '" + std::string(field) + "'");
    }
    return value;
}

bool parse_flag(std::string_view field, const char* name, std::size_t line) {
    if (field == "0") return false;
    if (field == "1") return true;
    throw SchemaError("trajectory.csv line " + std::to_string(line) + ": " + name +
                      " must be 0 or 1");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

json to_json(const RunSpec& spec) {
    const auto& e = spec.energy_ctrl;
    return {
        {"scenario", scenario_json(spec.scenario)},
        {"sampler", to_string(spec.sampler)},
        {"guidance", guidance_json(spec.guidance)},
        {"seed", spec.seed},
        {"steps", spec.steps},
        {"noise",
         {{"kind", to_string(spec.noise.kind)},
          {"train_steps", spec.noise.train_steps},
          {"beta_min", spec.noise.beta_min},
          {"beta_max", spec.noise.beta_max}}},
        {"energy",
         {{"clipping", e.clipping_enabled},
          {"e_base", e.e_base},
          {"gamma", e.gamma},
          {"adaptive", e.adaptive_threshold},
          {"refresh", e.refresh_enabled},
          {"refresh_fraction", e.refresh_fraction},
          {"refresh_blend", e.refresh_blend},
          {"clip_mode", to_string(e.clip_mode)}}},
        {"metrics", {{"skip_initial", spec.skip_initial}}},
    };
}

RunSpec run_spec_from_json(const json& j) {
    try {
        RunSpec spec;
        const auto& sc = j.at("scenario");
        spec.scenario.name = sc.at("name").get<std::string>();
        spec.scenario.dim = sc.at("dim").get<std::size_t>();
        spec.scenario.target = sc.at("target").get<std::vector<std::size_t>>();
        for (const auto& c : sc.at("components")) {
            spec.scenario.components.push_back({c.at("weight").get<double>(),
                                                c.at("mean").get<Vector>(),
                                                c.at("variance").get<double>()});
        }
        spec.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
        spec.guidance = guidance_from_json(j.at("guidance"));
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.steps = j.at("steps").get<int>();

        const auto& n = j.at("noise");
        spec.noise.kind = parse_noise_schedule_kind(n.at("kind").get<std::string>());
        spec.noise.train_steps = n.at("train_steps").get<int>();
        spec.noise.beta_min = n.at("beta_min").get<double>();
        spec.noise.beta_max = n.at("beta_max").get<double>();

        const auto& e = j.at("energy");
        spec.energy_ctrl.clipping_enabled = e.at("clipping").get<bool>();
        spec.energy_ctrl.e_base = e.at("e_base").get<double>();
        spec.energy_ctrl.gamma = e.at("gamma").get<double>();
        spec.energy_ctrl.adaptive_threshold = e.at("adaptive").get<bool>();
        spec.energy_ctrl.refresh_enabled = e.at("refresh").get<bool>();
        spec.energy_ctrl.refresh_fraction = e.at("refresh_fraction").get<double>();
        spec.energy_ctrl.refresh_blend = e.at("refresh_blend").get<double>();
        spec.energy_ctrl.clip_mode = parse_clip_mode(e.at("clip_mode").get<std::string>());

        spec.skip_initial = j.at("metrics").at("skip_initial").get<bool>();
        return spec;
    } catch (const json::exception& ex) {
        throw SchemaError(std::string("run config echo: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw SchemaError(std::string("run config echo: ") + ex.what());
    }
}

std::string run_hash(const RunSpec& spec) {
    const std::string canonical = to_json(spec).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string run_dir_name(const RunSpec& spec) { return "run_" + run_hash(spec); }

void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& rows) {
    out << kTrajectoryHeader << '\n';
    for (const auto& r : rows) {
        out << r.step << ',' << r.timestep << ',' << format_double(r.s_effective) << ','
            << format_double(r.energy) << ',' << (r.clipped ? 1 : 0) << ','
            << (r.refreshed ? 1 : 0) << '\n';
    }
}

std::vector<StepRecord> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("trajectory.csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader) {
        throw SchemaError("trajectory.csv header mismatch: expected '" +
                          std::string(kTrajectoryHeader) + "', got '" + line + "'");
    }

    std::vector<StepRecord> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 6) {
            throw SchemaError("trajectory.csv line " + std::to_string(line_no) + ": expected 6 "
                              "columns, got " + std::to_string(fields.size()));
        }
        StepRecord r;
        r.step = parse_field<int>(fields[0], "step", line_no);
        r.timestep = parse_field<int>(fields[1], "timestep", line_no);
        r.s_effective = parse_field<double>(fields[2], "s_effective", line_no);
        r.energy = parse_field<double>(fields[3], "energy", line_no);
        r.clipped = parse_flag(fields[4], "clipped", line_no);
        r.refreshed = parse_flag(fields[5], "refreshed", line_no);
        if (r.step != static_cast<int>(rows.size())) {
            throw SchemaError("trajectory.csv line " + std::to_string(line_no) +
                              ": steps must count up from 0");
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw SchemaError("trajectory.csv has no rows");
    return rows;
}

void write_run(const std::filesystem::path& dir, const RunArtifacts& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    write_text_file(dir / "config.json", to_json(artifacts.spec).dump(2) + "\n");

    std::ostringstream csv;
    write_trajectory_csv(csv, artifacts.record.trajectory);
    write_text_file(dir / "trajectory.csv", csv.str());

    const auto& m = artifacts.metrics;
    const json metrics = {{"stability", m.stability},
                          {"consistency", m.consistency},
                          {"efficiency", m.efficiency},
                          {"convergence", m.convergence},
                          {"skip_initial", artifacts.spec.skip_initial},
                          {"final_sample", artifacts.record.final_sample}};
    write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");
}

RunArtifacts read_run(const std::filesystem::path& dir) {
    RunArtifacts out;
    out.spec = run_spec_from_json(read_json_file(dir / "config.json"));

    std::ifstream csv(dir / "trajectory.csv");
    if (!csv) throw IoError("cannot open " + (dir / "trajectory.csv").string());
    out.record.trajectory = read_trajectory_csv(csv);
    if (out.record.trajectory.size() != static_cast<std::size_t>(out.spec.steps) + 1) {
        throw SchemaError(dir.string() + ": trajectory has " +
                          std::to_string(out.record.trajectory.size()) + " rows, expected " +
                          std::to_string(out.spec.steps + 1));
    }
    out.record.sampler = out.spec.sampler;
    out.record.guidance = out.spec.guidance;
    out.record.seed = out.spec.seed;

    const json metrics = read_json_file(dir / "metrics.json");
    try {
        out.metrics = {metrics.at("stability").get<double>(),
                       metrics.at("consistency").get<double>(),
                       metrics.at("efficiency").get<double>(),
                       metrics.at("convergence").get<double>()};
        out.record.final_sample = metrics.at("final_sample").get<Vector>();
    } catch (const json::exception& e) {
        throw SchemaError((dir / "metrics.json").string() + ": " + e.what());
    }
    return out;
}

std::vector<std::filesystem::path> list_run_dirs(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(root, ec)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("run_", 0) == 0) {
            dirs.push_back(entry.path());
        }
    }
    if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

}  // namespace energylab
