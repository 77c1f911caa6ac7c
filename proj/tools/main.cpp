#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "mctune/promela.hpp"
#include "mctune/report.hpp"

namespace {

using namespace mctune;

struct CliArgs {
    std::string config_path;
    int size = 0;
    int wg = 0;
    int ts = 0;
    int gmt = 0;
    std::string kernel;
    std::string input_path;
    Tick T = -1;
    int workers = 4;
    std::uint64_t seed = 1;
    long long max_depth = 0;
    double budget_secs = 0.0;
    std::string out_dir = "out";
    bool full_hierarchy = false;
};

RunConfig resolve_config(const CliArgs& a) {
    RunConfig cfg;
    if (!a.config_path.empty()) cfg = load_config_file(a.config_path);
    if (a.gmt > 0) cfg.platform.gmt = a.gmt;

    int size = a.size > 0 ? a.size : cfg.problem.size;
    KernelKind kind = a.kernel.empty() ? cfg.problem.kernel : kernel_kind_from_string(a.kernel);
    if (kind == KernelKind::Minimum) {
        std::vector<std::int64_t> input;
        if (!a.input_path.empty())
            input = read_input_file(a.input_path, size);
        else if (cfg.problem.kernel == KernelKind::Minimum &&
                 cfg.problem.size == size)
            input = cfg.problem.input;
        cfg.problem = ProblemSpec::minimum(size, std::move(input));
    } else {
        cfg.problem = ProblemSpec::abstract(size);
    }

    cfg.workers = a.workers;
    cfg.seed = a.seed;
    cfg.output_dir = a.out_dir;
    if (a.max_depth > 0) cfg.limits.max_depth = a.max_depth;
    if (a.budget_secs > 0) cfg.limits.wall_budget_secs = a.budget_secs;
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

TuningParams pick_params(const CliArgs& a, const RunConfig& cfg) {
    if (a.wg > 0 && a.ts > 0) {
        TuningParams p{a.wg, a.ts};
        validate_params(cfg.problem.size, p);
        if (!config_feasible(cfg.problem, p))
            throw ConfigError("infeasible (wg, ts) for the minimum kernel: wg*ts > size");
        return p;
    }
    if (a.wg > 0 || a.ts > 0) throw ConfigError("give both --wg and --ts, or neither");
    std::vector<TuningParams> configs;
    for (const auto& c : enumerate_configs(cfg.problem.size))
        if (config_feasible(cfg.problem, c)) configs.push_back(c);
    std::mt19937_64 rng(cfg.seed);
    return configs[static_cast<std::size_t>(rng() % configs.size())];
}

int cmd_simulate(const CliArgs& a) {
    RunConfig cfg = resolve_config(a);
    const TuningParams params = pick_params(a, cfg);
    Machine m(cfg.platform, cfg.problem, params);
    Trace trace;
    trace.params = params;
    const RunOutcome out = m.run(SchedPolicy::RoundRobin, cfg.seed, &trace.transitions);
    trace.final_time = out.time;
    trace.steps = out.steps;

    write_text_file(out_path(cfg, "sim_trace.txt"),
                    trace_to_text(cfg.platform, cfg.problem, trace));
    std::cout << "time=" << out.time << "\n";
    if (out.result) std::cout << "result=" << *out.result << "\n";
    std::cout << "transitions=" << out.steps << "\n";
    return 0;
}

int cmd_check(const CliArgs& a) {
    if (a.T < 0) throw ConfigError("check needs -T <ticks>");
    RunConfig cfg = resolve_config(a);
    const Verdict v = check_overtime(cfg.platform, cfg.problem, a.T, cfg.limits);

    std::string trace_path;
    if (v.violated && v.trace) {
        trace_path = out_path(cfg, "check_trace.txt");
        write_text_file(trace_path, trace_to_text(cfg.platform, cfg.problem, *v.trace));
    }
    write_text_file(out_path(cfg, "check.json"), verdict_to_json(v, a.T, trace_path));

    if (v.violated) {
        std::cout << "VIOLATED time=" << v.trace->final_time << " wg=" << v.trace->params.wg
                  << " ts=" << v.trace->params.ts << "\n";
        return 0;
    }
    std::cout << (v.exhaustive ? "HOLDS (exhaustive)" : "HOLDS (not exhaustive)") << "\n";
    return v.exhaustive ? 0 : 1;
}

int cmd_tune(const CliArgs& a) {
    RunConfig cfg = resolve_config(a);
    const Tick t_ini = estimate_initial_time(cfg.platform, cfg.problem, cfg.seed);
    const TuneResult r = bisect_min_time(cfg.platform, cfg.problem, t_ini, cfg.limits);

    const std::string trace_path = out_path(cfg, "tune_trace.txt");
    write_text_file(trace_path, trace_to_text(cfg.platform, cfg.problem, r.trace));
    write_text_file(out_path(cfg, "tune.json"), tune_result_to_json(r, trace_path));
    write_text_file(out_path(cfg, "tune.csv"), tune_result_to_csv(cfg.problem.size, r));

    std::cout << "T_min=" << r.t_min << " WG=" << r.params.wg << " TS=" << r.params.ts;
    if (!r.proven) std::cout << " (not exhaustive)";
    std::cout << "\n";
    return r.proven ? 0 : 1;
}

int cmd_tune_swarm(const CliArgs& a) {
    RunConfig cfg = resolve_config(a);
    std::vector<Trace> trails;
    const TuneResult r =
        swarm_min_time(cfg.platform, cfg.problem, cfg.workers, cfg.limits, cfg.seed, &trails);

    const std::string trace_path = out_path(cfg, "tune_swarm_trace.txt");
    write_text_file(trace_path, trace_to_text(cfg.platform, cfg.problem, r.trace));
    write_text_file(out_path(cfg, "tune_swarm.json"), tune_result_to_json(r, trace_path));
    write_text_file(out_path(cfg, "trails.csv"),
                    trails_to_csv(cfg.problem.size, rank_trails(trails)));

    std::cout << "T_min=" << r.t_min << " WG=" << r.params.wg << " TS=" << r.params.ts
              << " (heuristic)\n";
    return 0;
}

int cmd_sweep(const CliArgs& a) {
    RunConfig cfg = resolve_config(a);
    const auto rows = exhaustive_sweep(cfg.platform, cfg.problem);
    write_text_file(out_path(cfg, "sweep.csv"), sweep_to_csv(rows));
    write_text_file(out_path(cfg, "sweep.json"), sweep_to_json(rows));
    for (const auto& r : rows) {
        if (!r.ok) continue;
        std::cout << "best time=" << r.time << " wg=" << r.wg << " ts=" << r.ts << "\n";
        break;
    }
    std::cout << "rows=" << rows.size() << " csv=" << out_path(cfg, "sweep.csv") << "\n";
    return 0;
}

int cmd_export(const CliArgs& a) {
    RunConfig cfg = resolve_config(a);
    const std::string text = export_promela(cfg.platform, cfg.problem, a.full_hierarchy);
    const std::string path = out_path(cfg, "model.pml");
    write_text_file(path, text);
    std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-checking auto-tuner for abstract OpenCL-style kernels"};
    app.require_subcommand(1);

    CliArgs a;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", a.config_path, "JSON config file");
        cmd->add_option("--size", a.size, "input size (power of two, >= 4)");
        cmd->add_option("--gmt", a.gmt, "global-memory cost factor");
        cmd->add_option("--kernel", a.kernel, "kernel kind: abstract | minimum");
        cmd->add_option("--input", a.input_path, "input array file (minimum kernel)");
        cmd->add_option("--seed", a.seed, "random seed");
        cmd->add_option("--workers", a.workers, "swarm worker count");
        cmd->add_option("--max-depth", a.max_depth, "exploration depth limit");
        cmd->add_option("--budget-secs", a.budget_secs, "wall-clock budget in seconds");
        cmd->add_option("--out", a.out_dir, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "one deterministic run of a configuration");
    add_common(sim);
    sim->add_option("--wg", a.wg, "workgroup size");
    sim->add_option("--ts", a.ts, "tile size");

    auto* chk = app.add_subcommand("check", "verify the over-time property at bound T");
    add_common(chk);
    chk->add_option("-T", a.T, "time bound in ticks");

    auto* tune = app.add_subcommand("tune", "bisection search for the minimal time");
    add_common(tune);

    auto* swarm = app.add_subcommand("tune-swarm", "randomized swarm search for the minimal time");
    add_common(swarm);

    auto* sweep = app.add_subcommand("sweep", "simulate every configuration, report a table");
    add_common(sweep);

    auto* exp = app.add_subcommand("export-promela", "write the model as Promela source");
    add_common(exp);
    exp->add_flag("--full-hierarchy", a.full_hierarchy,
                  "emit the configured nd/nu instead of the 1-device/1-unit abstraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(a);
        if (chk->parsed()) return cmd_check(a);
        if (tune->parsed()) return cmd_tune(a);
        if (swarm->parsed()) return cmd_tune_swarm(a);
        if (sweep->parsed()) return cmd_sweep(a);
        if (exp->parsed()) return cmd_export(a);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ModelBug& e) {
        std::cerr << "model bug: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
