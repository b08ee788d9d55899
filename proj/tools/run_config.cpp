#include "run_config.hpp"

#include <cmath>
#include <set>

#include "scnd/error.hpp"
#include "scnd/rng.hpp"

namespace scnd::cli {

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

struct RangeField {
    const char* name;
    Range GenerationRanges::*member;
};

constexpr RangeField kRangeFields[] = {
    {"demand_mu", &GenerationRanges::demand_mu}, {"demand_cv", &GenerationRanges::demand_cv},
    {"p_upper", &GenerationRanges::p_upper},     {"p_lower_fraction", &GenerationRanges::p_lower_fraction},
    {"q_upper_ij", &GenerationRanges::q_upper_ij}, {"q_upper_jk", &GenerationRanges::q_upper_jk},
    {"w_upper", &GenerationRanges::w_upper},     {"inventory", &GenerationRanges::inventory},
    {"a", &GenerationRanges::a},                 {"beta", &GenerationRanges::beta},
    {"gamma", &GenerationRanges::gamma},         {"h", &GenerationRanges::h},
    {"t_lower", &GenerationRanges::t_lower},     {"t_upper", &GenerationRanges::t_upper},
    {"c_prod", &GenerationRanges::c_prod},       {"c_var_ij", &GenerationRanges::c_var_ij},
    {"c_fix_ij", &GenerationRanges::c_fix_ij},   {"c_var_jk", &GenerationRanges::c_var_jk},
    {"c_fix_jk", &GenerationRanges::c_fix_jk},   {"c_install", &GenerationRanges::c_install},
    {"c_po", &GenerationRanges::c_po},           {"c_pu", &GenerationRanges::c_pu},
};

void read_ranges(const json& obj, GenerationRanges& r) {
    if (!obj.is_object()) throw ConfigError("instance.ranges: expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (key == "stocked_fraction") {
            read(obj, "stocked_fraction", r.stocked_fraction, "instance.ranges");
            continue;
        }
        const RangeField* f = nullptr;
        for (const auto& rf : kRangeFields)
            if (key == rf.name) f = &rf;
        if (!f) throw ConfigError("instance.ranges: unknown key '" + key + "'");
        if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number())
            throw ConfigError("instance.ranges." + key + ": expected [lo, hi]");
        r.*(f->member) = Range{value[0].get<double>(), value[1].get<double>()};
    }
}

DemandMode parse_demand_mode(const std::string& s) {
    if (s == "sampled") return DemandMode::Sampled;
    if (s == "mean") return DemandMode::Mean;
    throw ConfigError("stage2.demand: expected 'sampled' or 'mean', got '" + s + "'");
}

}  // namespace

RegimeRule parse_rule(const std::string& s) {
    if (s == "midpoint") return RegimeRule::Midpoint;
    if (s == "mean") return RegimeRule::Mean;
    throw ConfigError("stage2.rule: expected 'midpoint' or 'mean', got '" + s + "'");
}

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    only_keys(doc, "config", {"instance", "solver", "stage2", "noise", "threads", "output"});

    if (doc.contains("instance")) {
        const json& in = doc["instance"];
        only_keys(in, "instance", {"path", "seed", "size", "plants", "warehouses", "customers", "ranges"});
        if (in.contains("path") && !in["path"].is_null()) cfg.instance.path = in["path"].get<std::string>();
        read(in, "seed", cfg.instance.seed, "instance");
        if (in.contains("size")) {
            std::size_t n = 0;
            read(in, "size", n, "instance");
            cfg.instance.plants = cfg.instance.warehouses = cfg.instance.customers = n;
        }
        read(in, "plants", cfg.instance.plants, "instance");
        read(in, "warehouses", cfg.instance.warehouses, "instance");
        read(in, "customers", cfg.instance.customers, "instance");
        if (in.contains("ranges")) read_ranges(in["ranges"], cfg.instance.ranges);
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        only_keys(s, "solver", {"gap", "time_limit", "node_limit", "feasibility_tolerance", "integrality_tolerance"});
        read(s, "gap", cfg.solver.gap_tolerance, "solver");
        read(s, "time_limit", cfg.solver.time_limit_seconds, "solver");
        read(s, "node_limit", cfg.solver.node_limit, "solver");
        read(s, "feasibility_tolerance", cfg.solver.feasibility_tolerance, "solver");
        read(s, "integrality_tolerance", cfg.solver.integrality_tolerance, "solver");
    }

    if (doc.contains("stage2")) {
        const json& s = doc["stage2"];
        only_keys(s, "stage2", {"rule", "demand", "seed", "safety_factor"});
        std::string text;
        if (s.contains("rule")) {
            read(s, "rule", text, "stage2");
            cfg.stage2.rule = parse_rule(text);
        }
        if (s.contains("demand")) {
            read(s, "demand", text, "stage2");
            cfg.stage2.demand_mode = parse_demand_mode(text);
        }
        read(s, "seed", cfg.stage2.seed, "stage2");
        read(s, "safety_factor", cfg.safety_factor, "stage2");
    }

    if (doc.contains("noise")) {
        const json& s = doc["noise"];
        only_keys(s, "noise",
                  {"suite", "scale", "calibration_fraction", "n", "tolerance", "include_infeasible", "seed"});
        if (s.contains("suite")) {
            if (!s["suite"].is_array()) throw ConfigError("noise.suite: expected an array");
            cfg.noise.suite.clear();
            for (const auto& entry : s["suite"]) cfg.noise.suite.push_back(noise_from_json(entry));
        }
        if (s.contains("scale")) {
            const json& sc = s["scale"];
            if (sc.is_string() && sc.get<std::string>() == "auto") cfg.noise.scale_mode = ScaleMode::Auto;
            else if (sc.is_string() && sc.get<std::string>() == "per-spec") cfg.noise.scale_mode = ScaleMode::PerSpec;
            else if (sc.is_number()) {
                cfg.noise.scale_mode = ScaleMode::Fixed;
                cfg.noise.scale = sc.get<double>();
            } else {
                throw ConfigError("noise.scale: expected a number, \"auto\" or \"per-spec\"");
            }
        }
        read(s, "calibration_fraction", cfg.noise.calibration_fraction, "noise");
        read(s, "n", cfg.noise.n, "noise");
        read(s, "tolerance", cfg.noise.tolerance, "noise");
        read(s, "include_infeasible", cfg.noise.include_infeasible, "noise");
        read(s, "seed", cfg.noise.seed, "noise");
    }

    read(doc, "threads", cfg.threads, "config");
    if (doc.contains("output")) cfg.output = doc["output"].get<std::string>();
    return cfg;
}

json canonical_json(const RunConfig& cfg) {
    json d;
    json in;
    if (cfg.instance.path) {
        in["path"] = cfg.instance.path->generic_string();
    } else {
        in["seed"] = cfg.instance.seed;
        in["plants"] = cfg.instance.plants;
        in["warehouses"] = cfg.instance.warehouses;
        in["customers"] = cfg.instance.customers;
        json r;
        for (const auto& f : kRangeFields) {
            const Range& v = cfg.instance.ranges.*(f.member);
            r[f.name] = json::array({v.lo, v.hi});
        }
        r["stocked_fraction"] = cfg.instance.ranges.stocked_fraction;
        in["ranges"] = std::move(r);
    }
    d["instance"] = std::move(in);
    d["solver"] = {{"gap", cfg.solver.gap_tolerance},
                   {"time_limit", cfg.solver.time_limit_seconds},
                   {"node_limit", cfg.solver.node_limit},
                   {"feasibility_tolerance", cfg.solver.feasibility_tolerance},
                   {"integrality_tolerance", cfg.solver.integrality_tolerance}};
    d["stage2"] = {{"rule", to_string(cfg.stage2.rule)},
                   {"demand", to_string(cfg.stage2.demand_mode)},
                   {"seed", cfg.stage2.seed},
                   {"safety_factor", cfg.safety_factor}};
    json suite = json::array();
    for (const auto& s : cfg.noise.suite) suite.push_back(to_json(s));
    json scale;
    switch (cfg.noise.scale_mode) {
        case ScaleMode::Auto: scale = "auto"; break;
        case ScaleMode::PerSpec: scale = "per-spec"; break;
        case ScaleMode::Fixed: scale = cfg.noise.scale; break;
    }
    d["noise"] = {{"suite", std::move(suite)},
                  {"scale", std::move(scale)},
                  {"calibration_fraction", cfg.noise.calibration_fraction},
                  {"n", cfg.noise.n},
                  {"tolerance", cfg.noise.tolerance},
                  {"include_infeasible", cfg.noise.include_infeasible},
                  {"seed", cfg.noise.seed}};
    return d;
}

void validate(const RunConfig& cfg) {
    validate(cfg.solver);
    if (cfg.noise.suite.empty()) throw ConfigError("noise.suite: at least one noise specification is required");
    std::set<std::string> labels;
    for (const auto& s : cfg.noise.suite) {
        validate(s);
        if (s.label.empty()) throw ConfigError("noise.suite: every specification needs a label");
        if (s.label.find_first_of("/\\,\"\n") != std::string::npos)
            throw ConfigError("noise.suite: label '" + s.label + "' is not usable in a file name");
        if (!labels.insert(s.label).second) throw ConfigError("noise.suite: duplicate label '" + s.label + "'");
    }
    if (cfg.noise.n == 0) throw ConfigError("noise.n must be at least 1");
    if (!(cfg.noise.tolerance >= 0.0)) throw ConfigError("noise.tolerance must be nonnegative");
    if (cfg.noise.scale_mode == ScaleMode::Fixed && !(cfg.noise.scale >= 0.0 && std::isfinite(cfg.noise.scale)))
        throw ConfigError("noise.scale must be a finite nonnegative number");
    if (!(cfg.noise.calibration_fraction > 0.0 && cfg.noise.calibration_fraction <= 1.0))
        throw ConfigError("noise.calibration_fraction must lie in (0, 1]");
    if (cfg.threads < 0) throw ConfigError("threads must be nonnegative");
    if (!std::isfinite(cfg.safety_factor)) throw ConfigError("stage2.safety_factor must be finite");
}

std::uint64_t noise_seed(const RunConfig& cfg, const NoiseSpec& spec) {
    return derive_key(cfg.noise.seed, hash_name(spec.label));
}

EnsembleOptions ensemble_options(const RunConfig& cfg, const NoiseSpec& spec) {
    EnsembleOptions o;
    o.n = cfg.noise.n;
    o.seed = noise_seed(cfg, spec);
    o.feasibility_tolerance = cfg.noise.tolerance;
    o.safety_factor = cfg.safety_factor;
    o.include_infeasible = cfg.noise.include_infeasible;
    o.threads = cfg.threads;
    return o;
}

}  // namespace scnd::cli
