#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "run_config.hpp"
#include "scnd/error.hpp"
#include "scnd/format.hpp"
#include "scnd/report.hpp"

namespace scnd::cli {

namespace fs = std::filesystem;

namespace {

// Command-line values that override the config file when given.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> size;
    std::optional<std::string> out_dir;
    std::optional<double> time_limit;
    std::optional<double> gap;
    std::optional<long> node_limit;
    std::optional<std::string> rule;
    std::optional<std::uint64_t> stage2_seed;
    std::optional<std::string> scale;
    std::optional<std::size_t> n;
    std::optional<double> tolerance;
    std::optional<int> threads;
    std::optional<std::uint64_t> noise_seed;
    bool include_infeasible = false;
};

RunConfig load_config(const Overrides& o) {
    json doc = json::object();
    if (!o.config.empty()) {
        try {
            doc = load_json(o.config);
        } catch (const IoFailure& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    RunConfig cfg = parse_run_config(doc);
    if (o.seed) cfg.instance.seed = *o.seed;
    if (o.size) cfg.instance.plants = cfg.instance.warehouses = cfg.instance.customers = *o.size;
    if (o.out_dir) cfg.output = *o.out_dir;
    if (o.time_limit) cfg.solver.time_limit_seconds = *o.time_limit;
    if (o.gap) cfg.solver.gap_tolerance = *o.gap;
    if (o.node_limit) cfg.solver.node_limit = *o.node_limit;
    if (o.rule) cfg.stage2.rule = parse_rule(*o.rule);
    if (o.stage2_seed) cfg.stage2.seed = *o.stage2_seed;
    if (o.scale) {
        if (*o.scale == "auto") {
            cfg.noise.scale_mode = ScaleMode::Auto;
        } else if (*o.scale == "per-spec") {
            cfg.noise.scale_mode = ScaleMode::PerSpec;
        } else {
            const auto v = parse_double(*o.scale);
            if (!v) throw ConfigError("--scale: expected a number, 'auto' or 'per-spec'");
            cfg.noise.scale_mode = ScaleMode::Fixed;
            cfg.noise.scale = *v;
        }
    }
    if (o.n) cfg.noise.n = *o.n;
    if (o.tolerance) cfg.noise.tolerance = *o.tolerance;
    if (o.threads) cfg.threads = *o.threads;
    if (o.noise_seed) cfg.noise.seed = *o.noise_seed;
    if (o.include_infeasible) cfg.noise.include_infeasible = true;
    validate(cfg);
    return cfg;
}

InstanceSpec checked_instance(InstanceSpec spec) {
    const auto report = validate_instance(spec);
    for (const auto& w : report.warnings) spdlog::warn("instance: {}: {}", w.field, w.message);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "instance has " << report.violations.size() << " violation(s)";
        for (const auto& v : report.violations) msg << "\n  " << v.field << ": " << v.message;
        throw InvalidInstance(msg.str());
    }
    return spec;
}

InstanceSpec load_instance(const fs::path& path) { return checked_instance(instance_from_json(load_json(path))); }

InstanceSpec make_instance(const RunConfig& cfg) {
    if (cfg.instance.path) return load_instance(*cfg.instance.path);
    return checked_instance(generate_instance(cfg.instance.seed, cfg.instance.plants, cfg.instance.warehouses,
                                              cfg.instance.customers, cfg.instance.ranges));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw IoFailure("write to " + path.string() + " failed");
}

std::string summary_text(const Stage1Solution& sol, const MilpSolution& milp, const Stage2Report& r) {
    std::ostringstream os;
    os << "status       " << to_string(sol.status) << '\n'
       << "gap          " << format_double(sol.gap) << '\n'
       << "nodes        " << milp.nodes_explored << '\n'
       << "tc           " << format_double(r.cost.tc) << '\n'
       << "overstock    " << format_double(r.cost.overstock) << '\n'
       << "understock   " << format_double(r.cost.understock) << '\n'
       << "lead_time    " << format_double(r.cost.lead_time) << '\n'
       << "tc1          " << format_double(r.cost.tc1) << '\n'
       << "open         ";
    for (std::size_t j = 0; j < sol.y.size(); ++j)
        if (sol.y[j]) os << ' ' << j;
    os << "\n\nk  eld\n";
    for (std::size_t k = 0; k < r.eld.size(); ++k) os << k << "  " << format_double(r.eld[k]) << '\n';
    return os.str();
}

// Solves stage 1 and runs stage 2, writing both into `dir`. Returns the exit code.
int solve_into(const InstanceSpec& spec, const RunConfig& cfg, const fs::path& dir, bool echo) {
    ensure_dir(dir);
    BuildOptions build;
    build.safety_factor = cfg.safety_factor;
    const Stage1Run run = solve_stage1(spec, cfg.solver, build);
    if (!run.solution) {
        if (run.milp.status == MilpStatus::Infeasible) {
            std::cerr << "scnd: stage-1 model is infeasible\n";
            return kInfeasible;
        }
        std::cerr << "scnd: time limit reached without a feasible design\n";
        return kTimeout;
    }
    const Stage1Solution& sol = *run.solution;
    if (sol.status == MilpStatus::TimeLimit)
        spdlog::warn("time limit reached; keeping the incumbent at gap {:.4g}", sol.gap);
    const Stage2Report r = run_stage2(spec, sol, cfg.stage2);
    save_json(dir / "stage1.json", to_json(sol));
    save_json(dir / "stage2.json", to_json(r));
    export_csv(r, dir / "stage2.csv");
    const std::string summary = summary_text(sol, run.milp, r);
    write_text(dir / "summary.txt", summary);
    if (echo) std::cout << summary;
    return kOk;
}

std::string file_label(VariableGroup g) {
    switch (g) {
        case VariableGroup::P: return "p";
        case VariableGroup::Qij: return "qij";
        case VariableGroup::Qjk: return "qjk";
    }
    return "?";
}

// Diff matrices, deviation table, production series and plot script for the
// ensembles that have at least one contributing replicate.
void write_reports(const Stage1Solution& det, const std::vector<NoiseEnsemble>& ensembles, const fs::path& dir) {
    std::vector<NoiseEnsemble> usable;
    for (const auto& e : ensembles)
        if (e.contributing() >= 1) usable.push_back(e);
    std::vector<std::string> labels;
    for (const auto& e : usable) {
        labels.push_back(e.noise.label);
        for (auto g : {VariableGroup::P, VariableGroup::Qij, VariableGroup::Qjk})
            export_csv(diff_matrix(det, e, g), dir / ("diff_" + file_label(g) + "_" + e.noise.label + ".csv"));
    }
    export_csv(deviation_table(det, usable), dir / "deviation_table.csv");
    std::ostringstream series, plot;
    write_production_series(series, det, usable);
    write_text(dir / "production_series.csv", series.str());
    write_plot_script(plot, labels);
    write_text(dir / "plot.py", plot.str());
}

NoiseSpec resolve_scale(const InstanceSpec& spec, const Stage1Solution& sol, const RunConfig& cfg, NoiseSpec noise) {
    switch (cfg.noise.scale_mode) {
        case ScaleMode::PerSpec: return noise;
        case ScaleMode::Fixed:
            noise.scale = cfg.noise.scale;
            noise.log_scale.reset();
            return noise;
        case ScaleMode::Auto:
            return calibrate_scale(spec, sol, noise, ensemble_options(cfg, noise), cfg.noise.calibration_fraction);
    }
    return noise;
}

int perturb_into(const InstanceSpec& spec, const Stage1Solution& sol, const RunConfig& cfg, const fs::path& dir) {
    ensure_dir(dir);
    std::vector<NoiseEnsemble> ensembles;
    bool degenerate = false;
    json summaries = json::array();
    for (const auto& base : cfg.noise.suite) {
        const NoiseSpec noise = resolve_scale(spec, sol, cfg, base);
        NoiseEnsemble ens;
        try {
            ens = run_ensemble(spec, sol, noise, ensemble_options(cfg, noise));
        } catch (const TooFewFeasible& e) {
            ens = e.ensemble();
            degenerate = true;
            spdlog::error("noise '{}': {} of {} replicates feasible, RMS undefined", noise.label, ens.feasible_count,
                          ens.n);
        }
        spdlog::info("noise '{}': {}/{} feasible, RMS Qij {:.6g}", noise.label, ens.feasible_count, ens.n,
                     ens.rms[static_cast<int>(VariableGroup::Qij)].value);
        const std::uint64_t dims[] = {ens.n, ens.cells()};
        write_tensor(dir / ("means_" + noise.label + ".bin"), dims, ens.means);
        summaries.push_back(summary_json(ens));
        ensembles.push_back(std::move(ens));
    }
    save_json(dir / "ensembles.json", summaries);
    write_reports(sol, ensembles, dir);
    return degenerate ? kDegenerate : kOk;
}

std::vector<NoiseEnsemble> load_ensembles(const fs::path& dir) {
    const json doc = load_json(dir / "ensembles.json");
    if (!doc.is_array()) throw ConfigError("ensembles.json: expected an array");
    std::vector<NoiseEnsemble> out;
    for (const auto& e : doc) out.push_back(ensemble_from_summary(e));
    return out;
}

void write_manifest(const RunConfig& cfg, const fs::path& dir) {
    const json canonical = canonical_json(cfg);
    json m;
    m["config_hash"] = fnv_hex(canonical.dump());
    m["config"] = canonical;
    json seeds;
    seeds["instance"] = cfg.instance.seed;
    seeds["stage2"] = cfg.stage2.seed;
    json noise = json::object();
    for (const auto& s : cfg.noise.suite) noise[s.label] = noise_seed(cfg, s);
    seeds["noise"] = std::move(noise);
    m["seeds"] = std::move(seeds);
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name != "manifest.json" && name.rfind(".", 0) != 0)
            files[name] = file_hash(entry.path());
    }
    json f = json::object();
    for (const auto& [name, hash] : files) f[name] = hash;
    m["files"] = std::move(f);
    save_json(dir / "manifest.json", m);
}

void add_config_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("-c,--config", o.config, "Run configuration (JSON)");
}

void add_solve_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--time-limit", o.time_limit, "Branch-and-bound time limit in seconds");
    cmd.add_option("--gap", o.gap, "Relative optimality gap");
    cmd.add_option("--node-limit", o.node_limit, "Maximum number of branch-and-bound nodes");
    cmd.add_option("--rule", o.rule, "Regime threshold rule: midpoint or mean");
    cmd.add_option("--stage2-seed", o.stage2_seed, "Seed for realized demand");
}

void add_noise_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--scale", o.scale, "Noise scale: a number, 'auto' or 'per-spec'");
    cmd.add_option("-n,--n", o.n, "Outer replicates (and inner repetitions) per noise specification");
    cmd.add_option("--tolerance", o.tolerance, "Feasibility tolerance in product units");
    cmd.add_option("--threads", o.threads, "Worker threads, 0 for the runtime default");
    cmd.add_option("--noise-seed", o.noise_seed, "Base seed of the noise ensembles");
    cmd.add_flag("--include-infeasible", o.include_infeasible, "Let infeasible replicates enter the means");
}

void configure_logging() {
    if (!spdlog::get("scnd")) {
        auto logger = spdlog::stderr_color_mt("scnd");
        logger->set_pattern("%^[%l]%$ %v");
        spdlog::set_default_logger(logger);
    }
    const char* env = std::getenv("SCND_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

}  // namespace

int run(const std::vector<std::string>& args) {
    configure_logging();
    CLI::App app{"Two-stage supply chain network design under demand uncertainty"};
    app.require_subcommand(1);
    Overrides o;
    std::string instance_path, out_path = "instance.json", dir;
    bool write_lp = false;

    auto* generate = app.add_subcommand("generate", "Draw a synthetic instance");
    add_config_options(*generate, o);
    generate->add_option("--seed", o.seed, "Generator seed");
    generate->add_option("--size", o.size, "Plants, warehouses and customers");
    generate->add_option("-o,--out", out_path, "Instance file to write")->capture_default_str();

    auto* validate_cmd = app.add_subcommand("validate", "Check an instance file");
    validate_cmd->add_option("instance", instance_path, "Instance file")->required();

    auto* solve = app.add_subcommand("solve", "Solve the network design and run the recovery analysis");
    add_config_options(*solve, o);
    solve->add_option("-i,--instance", instance_path, "Instance file (default: generate from the config)");
    solve->add_flag("--write-lp", write_lp, "Also write the stage-1 model as model.lp");
    solve->add_option("--seed", o.seed, "Instance generator seed");
    solve->add_option("--size", o.size, "Plants, warehouses and customers");
    solve->add_option("-d,--out-dir", o.out_dir, "Output directory");
    add_solve_options(*solve, o);

    auto* perturb = app.add_subcommand("perturb", "Run the noise ensembles against a solved design");
    add_config_options(*perturb, o);
    perturb->add_option("-d,--dir", o.out_dir, "Directory holding instance.json and stage1.json");
    add_noise_options(*perturb, o);

    auto* report = app.add_subcommand("report", "Rewrite the CSV reports from saved ensemble summaries");
    report->add_option("-d,--dir", dir, "Run directory")->required();

    auto* pipeline = app.add_subcommand("pipeline", "Generate, solve, perturb and report in one run");
    add_config_options(*pipeline, o);
    pipeline->add_option("--seed", o.seed, "Instance generator seed");
    pipeline->add_option("--size", o.size, "Plants, warehouses and customers");
    pipeline->add_option("-d,--out-dir", o.out_dir, "Output directory");
    add_solve_options(*pipeline, o);
    add_noise_options(*pipeline, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (generate->parsed()) {
            const RunConfig cfg = load_config(o);
            const InstanceSpec spec = make_instance(cfg);
            save_json(out_path, to_json(spec));
            spdlog::info("wrote {}x{}x{} instance to {}", spec.n_plants, spec.n_warehouses, spec.n_customers,
                         out_path);
            return kOk;
        }
        if (validate_cmd->parsed()) {
            const auto spec = instance_from_json(load_json(instance_path));
            const auto rep = validate_instance(spec);
            for (const auto& w : rep.warnings) std::cout << "warning  " << w.field << ": " << w.message << '\n';
            for (const auto& v : rep.violations) std::cout << "error    " << v.field << ": " << v.message << '\n';
            if (!rep.ok()) return kConfig;
            std::cout << "ok\n";
            return kOk;
        }
        if (solve->parsed()) {
            const RunConfig cfg = load_config(o);
            const InstanceSpec spec = instance_path.empty() ? make_instance(cfg) : load_instance(instance_path);
            ensure_dir(cfg.output);
            save_json(cfg.output / "instance.json", to_json(spec));
            if (write_lp) {
                BuildOptions build;
                build.safety_factor = cfg.safety_factor;
                std::ostringstream lp;
                write_lp_format(lp, build_stage1(spec, build));
                write_text(cfg.output / "model.lp", lp.str());
            }
            return solve_into(spec, cfg, cfg.output, true);
        }
        if (perturb->parsed()) {
            const RunConfig cfg = load_config(o);
            const InstanceSpec spec = load_instance(cfg.output / "instance.json");
            const Stage1Solution sol = stage1_from_json(load_json(cfg.output / "stage1.json"));
            return perturb_into(spec, sol, cfg, cfg.output);
        }
        if (report->parsed()) {
            const Stage1Solution sol = stage1_from_json(load_json(fs::path(dir) / "stage1.json"));
            write_reports(sol, load_ensembles(dir), dir);
            return kOk;
        }
        if (pipeline->parsed()) {
            const RunConfig cfg = load_config(o);
            const InstanceSpec spec = make_instance(cfg);
            ensure_dir(cfg.output);
            save_json(cfg.output / "instance.json", to_json(spec));
            const int solved = solve_into(spec, cfg, cfg.output, false);
            if (solved != kOk) return solved;
            const Stage1Solution sol = stage1_from_json(load_json(cfg.output / "stage1.json"));
            const int perturbed = perturb_into(spec, sol, cfg, cfg.output);
            write_manifest(cfg, cfg.output);
            return perturbed;
        }
    } catch (const TooFewFeasible& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kDegenerate;
    } catch (const ConfigError& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidInstance& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kConfig;
    } catch (const InfeasibleRanges& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kConfig;
    } catch (const IoFailure& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "scnd: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace scnd::cli
