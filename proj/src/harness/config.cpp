#include "energylab/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "energylab/errors.hpp"
#include "energylab/harness/toml_lite.hpp"

namespace energylab {

namespace {

using toml::Table;
using toml::Value;

[[noreturn]] void invalid(const std::string& key, const std::string& what, int line = 0) {
    std::string msg = "invalid '" + key + "': " + what;
    if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
    throw ConfigError(msg, line, key);
}

void reject_unknown(const Table& table, const std::string& prefix,
                    const std::set<std::string>& allowed_keys,
                    const std::set<std::string>& allowed_tables = {}) {
    for (const auto& [key, value] : table.entries) {
        if (!allowed_keys.count(key)) {
            throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + prefix +
                                  key + "'",
                              value.line, prefix + key);
        }
    }
    for (const auto& [name, sub] : table.tables) {
        if (!allowed_tables.count(name)) {
            throw ConfigError("line " + std::to_string(sub.line) + ": unknown table '" + prefix +
                                  name + "'",
                              sub.line, prefix + name);
        }
    }
    for (const auto& [name, subs] : table.arrays) {
        if (!allowed_tables.count(name)) {
            const int line = subs.empty() ? 0 : subs.front().line;
            throw ConfigError("line " + std::to_string(line) + ": unknown table array '" +
                                  prefix + name + "'",
                              line, prefix + name);
        }
    }
}

double number(const Value& v, const std::string& key) {
    if (!v.is_number()) invalid(key, "expected a number", v.line);
    return v.as_number();
}

std::int64_t integer(const Value& v, const std::string& key) {
    if (!v.is_integer()) invalid(key, "expected an integer", v.line);
    return std::get<std::int64_t>(v.data);
}

bool boolean(const Value& v, const std::string& key) {
    if (!v.is_bool()) invalid(key, "expected true or false", v.line);
    return v.as_bool();
}

const std::string& string(const Value& v, const std::string& key) {
    if (!v.is_string()) invalid(key, "expected a string", v.line);
    return v.as_string();
}

const Value::Array& array(const Value& v, const std::string& key) {
    if (!v.is_array()) invalid(key, "expected an array", v.line);
    return v.as_array();
}

template <class Fn>
void with(const Table& t, const char* key, Fn&& fn) {
    if (const Value* v = t.find(key)) fn(*v);
}

ScenarioSpec parse_scenario(const Table& t, std::size_t index) {
    const std::string prefix = "scenario[" + std::to_string(index) + "].";
    reject_unknown(t, prefix, {"name", "dim", "target"}, {"component"});

    ScenarioSpec sc;
    sc.name = "scenario_" + std::to_string(index);
    with(t, "name", [&](const Value& v) { sc.name = string(v, prefix + "name"); });

    const Value* dim = t.find("dim");
    if (!dim) invalid(prefix + "dim", "required key is missing", t.line);
    const auto d = integer(*dim, prefix + "dim");
    if (d < 1) invalid(prefix + "dim", "must be >= 1", dim->line);
    sc.dim = static_cast<std::size_t>(d);

    const Value* target = t.find("target");
    if (!target) invalid(prefix + "target", "required key is missing", t.line);
    if (target->is_integer()) {
        const auto idx = integer(*target, prefix + "target");
        if (idx < 0) invalid(prefix + "target", "must be >= 0", target->line);
        sc.target.push_back(static_cast<std::size_t>(idx));
    } else {
        for (const auto& item : array(*target, prefix + "target")) {
            const auto idx = integer(item, prefix + "target");
            if (idx < 0) invalid(prefix + "target", "must be >= 0", item.line);
            sc.target.push_back(static_cast<std::size_t>(idx));
        }
    }

    auto comps = t.arrays.find("component");
    if (comps == t.arrays.end() || comps->second.empty()) {
        invalid(prefix + "component", "scenario needs at least one [[scenario.component]]",
                t.line);
    }
    std::size_t ci = 0;
    for (const auto& ct : comps->second) {
        const std::string cp = prefix + "component[" + std::to_string(ci++) + "].";
        reject_unknown(ct, cp, {"weight", "mean", "variance"});
        MixtureComponent c;
        with(ct, "weight", [&](const Value& v) { c.weight = number(v, cp + "weight"); });
        if (!(c.weight > 0.0)) invalid(cp + "weight", "must be positive", ct.line);
        with(ct, "variance", [&](const Value& v) { c.variance = number(v, cp + "variance"); });
        if (!(c.variance > 0.0)) invalid(cp + "variance", "must be positive", ct.line);

        const Value* mean = ct.find("mean");
        if (!mean) invalid(cp + "mean", "required key is missing", ct.line);
        if (mean->is_number()) {
            c.mean.assign(sc.dim, mean->as_number());
        } else {
            for (const auto& item : array(*mean, cp + "mean")) c.mean.push_back(number(item, cp + "mean"));
            if (c.mean.size() != sc.dim) {
                invalid(cp + "mean", "has " + std::to_string(c.mean.size()) +
                                         " entries, expected dim = " + std::to_string(sc.dim),
                        mean->line);
            }
        }
        sc.components.push_back(std::move(c));
    }
    for (std::size_t idx : sc.target) {
        if (idx >= sc.components.size()) {
            invalid(prefix + "target", "unknown component " + std::to_string(idx), target->line);
        }
    }
    return sc;
}

GuidanceSchedule parse_schedule(const Table& t, std::size_t index,
                                std::vector<std::string>& warnings) {
    const std::string prefix = "schedule[" + std::to_string(index) + "].";
    reject_unknown(t, prefix, {"kind", "s0", "s1", "alpha", "beta"});
    GuidanceSchedule g;
    const Value* kind = t.find("kind");
    if (!kind) invalid(prefix + "kind", "required key is missing", t.line);
    try {
        g.kind = parse_schedule_kind(string(*kind, prefix + "kind"));
    } catch (const InvalidRange& e) {
        invalid(prefix + "kind", e.what(), kind->line);
    }
    const Value* s0 = t.find("s0");
    if (!s0) invalid(prefix + "s0", "required key is missing", t.line);
    g.s0 = number(*s0, prefix + "s0");
    g.s1 = g.s0;
    if (const Value* s1 = t.find("s1")) {
        g.s1 = number(*s1, prefix + "s1");
    } else if (g.kind != ScheduleKind::fixed) {
        invalid(prefix + "s1", "required for kind " + to_string(g.kind), t.line);
    }
    with(t, "alpha", [&](const Value& v) { g.alpha = number(v, prefix + "alpha"); });
    with(t, "beta", [&](const Value& v) { g.beta_steep = number(v, prefix + "beta"); });

    if (g.kind == ScheduleKind::exponential && !g.alpha) {
        g.alpha = kDefaultAlpha;
        warnings.push_back(prefix + "alpha not given; using default " +
                           std::to_string(kDefaultAlpha));
    }
    if (g.kind == ScheduleKind::sigmoid && !g.beta_steep) {
        g.beta_steep = kDefaultBetaSteep;
        warnings.push_back(prefix + "beta not given; using default " +
                           std::to_string(kDefaultBetaSteep));
    }
    try {
        validate(g);
    } catch (const std::invalid_argument& e) {
        invalid(prefix.substr(0, prefix.size() - 1), e.what(), t.line);
    }
    return g;
}

}  // namespace

void validate(const SweepConfig& config) {
    if (config.scenarios.empty()) invalid("scenario", "at least one [[scenario]] is required");
    if (config.samplers.empty()) invalid("samplers", "must not be empty");
    if (config.guidance.empty()) invalid("cfg_scales", "no guidance scales or schedules");
    if (config.seeds.empty()) invalid("seeds", "must not be empty");
    if (config.steps < 1 || config.steps > config.noise.train_steps) {
        invalid("steps", "must lie in [1, noise.train_steps]");
    }
    try {
        build_noise_schedule(config.noise);
    } catch (const InvalidRange& e) {
        invalid("noise", e.what());
    }
    try {
        config.energy_ctrl.validate();
    } catch (const InvalidRange& e) {
        invalid("energy", e.what());
    }
    for (const auto& sc : config.scenarios) {
        try {
            make_conditional_pair(sc);
        } catch (const std::invalid_argument& e) {
            invalid("scenario", e.what());
        }
    }
}

SweepConfig parse_config_text(std::string_view text) {
    Table root;
    try {
        root = toml::parse(text);
    } catch (const toml::ParseError& e) {
        throw ConfigError(e.what(), e.line());
    }

    reject_unknown(root, "",
                   {"steps", "seeds", "samplers", "cfg_scales", "output_dir"},
                   {"noise", "energy", "metrics", "schedule", "scenario"});

    SweepConfig cfg;

    with(root, "steps", [&](const Value& v) {
        const auto steps = integer(v, "steps");
        if (steps < 1) invalid("steps", "must be >= 1", v.line);
        cfg.steps = static_cast<int>(steps);
    });
    if (const Value* v = root.find("seeds")) {
        for (const auto& item : array(*v, "seeds")) {
            const auto seed = integer(item, "seeds");
            if (seed < 0) invalid("seeds", "seeds must be non-negative", item.line);
            cfg.seeds.push_back(static_cast<std::uint64_t>(seed));
        }
        if (cfg.seeds.empty()) invalid("seeds", "must not be empty", v->line);
    } else {
        cfg.seeds = kDefaultSeeds;
    }
    if (const Value* v = root.find("samplers")) {
        for (const auto& item : array(*v, "samplers")) {
            try {
                cfg.samplers.push_back(parse_sampler_kind(string(item, "samplers")));
            } catch (const InvalidRange& e) {
                invalid("samplers", e.what(), item.line);
            }
        }
        if (cfg.samplers.empty()) invalid("samplers", "must not be empty", v->line);
    } else {
        cfg.samplers.assign(std::begin(kAllSamplers), std::end(kAllSamplers));
    }
    with(root, "output_dir", [&](const Value& v) { cfg.output_dir = string(v, "output_dir"); });

    const Value* scales = root.find("cfg_scales");
    if (scales) {
        for (const auto& item : array(*scales, "cfg_scales")) {
            const double s = number(item, "cfg_scales");
            if (!(s >= 0.0)) invalid("cfg_scales", "scales must be >= 0", item.line);
            cfg.guidance.push_back(fixed_schedule(s));
        }
    }
    if (auto it = root.arrays.find("schedule"); it != root.arrays.end()) {
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            cfg.guidance.push_back(parse_schedule(it->second[i], i, cfg.warnings));
        }
    }
    if (!scales && !root.arrays.count("schedule")) {
        for (double s : kDefaultCfgScales) cfg.guidance.push_back(fixed_schedule(s));
    }

    if (auto it = root.tables.find("noise"); it != root.tables.end()) {
        const Table& t = it->second;
        reject_unknown(t, "noise.", {"kind", "train_steps", "beta_min", "beta_max"});
        with(t, "kind", [&](const Value& v) {
            try {
                cfg.noise.kind = parse_noise_schedule_kind(string(v, "noise.kind"));
            } catch (const InvalidRange& e) {
                invalid("noise.kind", e.what(), v.line);
            }
        });
        with(t, "train_steps", [&](const Value& v) {
            cfg.noise.train_steps = static_cast<int>(integer(v, "noise.train_steps"));
        });
        with(t, "beta_min", [&](const Value& v) { cfg.noise.beta_min = number(v, "noise.beta_min"); });
        with(t, "beta_max", [&](const Value& v) { cfg.noise.beta_max = number(v, "noise.beta_max"); });
    }

    if (auto it = root.tables.find("energy"); it != root.tables.end()) {
        const Table& t = it->second;
        reject_unknown(t, "energy.",
                       {"clipping", "e_base", "gamma", "adaptive", "refresh", "refresh_fraction",
                        "refresh_blend", "clip_mode"});
        auto& e = cfg.energy_ctrl;
        with(t, "clipping", [&](const Value& v) { e.clipping_enabled = boolean(v, "energy.clipping"); });
        with(t, "e_base", [&](const Value& v) { e.e_base = number(v, "energy.e_base"); });
        with(t, "gamma", [&](const Value& v) { e.gamma = number(v, "energy.gamma"); });
        with(t, "adaptive", [&](const Value& v) { e.adaptive_threshold = boolean(v, "energy.adaptive"); });
        with(t, "refresh", [&](const Value& v) { e.refresh_enabled = boolean(v, "energy.refresh"); });
        with(t, "refresh_fraction", [&](const Value& v) { e.refresh_fraction = number(v, "energy.refresh_fraction"); });
        with(t, "refresh_blend", [&](const Value& v) { e.refresh_blend = number(v, "energy.refresh_blend"); });
        with(t, "clip_mode", [&](const Value& v) {
            try {
                e.clip_mode = parse_clip_mode(string(v, "energy.clip_mode"));
            } catch (const InvalidRange& ex) {
                invalid("energy.clip_mode", ex.what(), v.line);
            }
        });
        if (e.adaptive_threshold && !e.clipping_enabled) {
            const Value* v = t.find("adaptive");
            invalid("energy.adaptive", "requires energy.clipping = true", v ? v->line : t.line);
        }
    }

    if (auto it = root.tables.find("metrics"); it != root.tables.end()) {
        reject_unknown(it->second, "metrics.", {"skip_initial"});
        with(it->second, "skip_initial",
             [&](const Value& v) { cfg.skip_initial = boolean(v, "metrics.skip_initial"); });
    }

    if (auto it = root.arrays.find("scenario"); it != root.arrays.end()) {
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            cfg.scenarios.push_back(parse_scenario(it->second[i], i));
        }
    }

    validate(cfg);
    return cfg;
}

SweepConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace energylab
