#include "mctune/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mctune {

using nlohmann::json;

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad config JSON in " + path + ": " + e.what());
    }

    RunConfig cfg;
    try {
        if (j.contains("platform")) {
            const auto& p = j.at("platform");
            cfg.platform.nd = p.value("nd", cfg.platform.nd);
            cfg.platform.nu = p.value("nu", cfg.platform.nu);
            cfg.platform.np = p.value("np", cfg.platform.np);
            cfg.platform.gmt = p.value("gmt", cfg.platform.gmt);
        }
        if (j.contains("problem")) {
            const auto& p = j.at("problem");
            const int size = p.value("size", 8);
            const KernelKind kind = kernel_kind_from_string(p.value("kernel", "abstract"));
            if (kind == KernelKind::Minimum) {
                std::vector<std::int64_t> input;
                if (p.contains("input_path")) {
                    auto ipath = std::filesystem::path(path).parent_path() /
                                 p.at("input_path").get<std::string>();
                    input = read_input_file(ipath.string(), size);
                }
                cfg.problem = ProblemSpec::minimum(size, std::move(input));
            } else {
                cfg.problem = ProblemSpec::abstract(size);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad config value in " + path + ": " + e.what());
    }
    cfg.platform.validate();
    return cfg;
}

std::vector<std::int64_t> read_input_file(const std::string& path, int expected) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    std::vector<std::int64_t> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            values.push_back(std::stoll(line));
        } catch (const std::exception&) {
            throw ConfigError("bad integer '" + line + "' in " + path);
        }
    }
    if (values.size() != static_cast<std::size_t>(expected))
        throw ConfigError("input file " + path + " holds " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(expected));
    return values;
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

std::string trace_to_text(const PlatformConfig& platform, const ProblemSpec& problem,
                          const Trace& trace) {
    Machine m(platform, problem, trace.params);
    MachineState s = m.initial_state();
    std::ostringstream os;
    for (std::size_t i = 0; i < trace.transitions.size(); ++i) {
        const Transition& t = trace.transitions[i];
        s = m.apply(s, t);
        os << i << ' ' << t.actor << ' ' << to_string(m.role_of(t.actor)) << ' '
           << m.label(t) << " time=" << s.time << '\n';
    }
    os << "FINAL time=" << s.time << " wg=" << trace.params.wg << " ts=" << trace.params.ts;
    if (problem.kernel == KernelKind::Minimum) os << " result=" << s.glob[0];
    os << '\n';
    return os.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "size,wg,ts,time,transitions\n";
    for (const auto& r : rows) {
        os << r.size << ',' << r.wg << ',' << r.ts << ',';
        if (r.ok)
            os << r.time << ',' << r.transitions;
        else
            os << ',';
        os << '\n';
    }
    return os.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json row;
        row["size"] = r.size;
        row["wg"] = r.wg;
        row["ts"] = r.ts;
        if (r.ok) {
            row["time"] = r.time;
            row["transitions"] = r.transitions;
        } else {
            row["note"] = r.note;
        }
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

std::string trails_to_csv(int size, const std::vector<RankedTrail>& trails) {
    std::ostringstream os;
    os << "size,wg,ts,time,transitions\n";
    for (const auto& t : trails)
        os << size << ',' << t.wg << ',' << t.ts << ',' << t.time << ',' << t.transitions
           << '\n';
    return os.str();
}

std::string verdict_to_json(const Verdict& v, Tick T, const std::string& trace_path) {
    json j;
    j["verdict"] = v.violated ? "violated" : "holds";
    j["exhaustive"] = v.exhaustive;
    j["T"] = T;
    j["states_visited"] = v.stats.states_visited;
    j["max_depth_reached"] = v.stats.max_depth_reached;
    j["wall_seconds"] = v.stats.wall_seconds;
    if (v.violated && v.trace) {
        j["final_time"] = v.trace->final_time;
        j["wg"] = v.trace->params.wg;
        j["ts"] = v.trace->params.ts;
    }
    if (!trace_path.empty()) j["trace_path"] = trace_path;
    return j.dump(2) + "\n";
}

std::string tune_result_to_json(const TuneResult& r, const std::string& trace_path) {
    json j;
    j["method"] = to_string(r.method);
    j["t_min"] = r.t_min;
    j["wg"] = r.params.wg;
    j["ts"] = r.params.ts;
    j["t_ini"] = r.t_ini;
    j["proven"] = r.proven;
    j["first_trail_time"] = r.first_trail_time;
    j["first_trail_optimality"] = r.first_trail_optimality();
    j["stats"]["checks_run"] = r.stats.checks_run;
    j["stats"]["states_visited_total"] = r.stats.states_visited_total;
    j["stats"]["wall_seconds"] = r.stats.wall_seconds;
    if (!trace_path.empty()) j["trace_path"] = trace_path;
    return j.dump(2) + "\n";
}

std::string tune_result_to_csv(int size, const TuneResult& r) {
    std::ostringstream os;
    os << "size,wg,ts,time,transitions\n"
       << size << ',' << r.params.wg << ',' << r.params.ts << ',' << r.t_min << ','
       << r.trace.steps << '\n';
    return os.str();
}

}  // namespace mctune
