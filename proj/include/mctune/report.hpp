#ifndef MCTUNE_REPORT_HPP
#define MCTUNE_REPORT_HPP

#include <string>
#include <vector>

#include "mctune/explore.hpp"
#include "mctune/search.hpp"

namespace mctune {

/// Everything a command needs to run.
struct RunConfig {
    PlatformConfig platform;
    ProblemSpec problem;
    ExploreLimits limits;
    int workers = 4;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
};

/// Reads platform/problem settings from a JSON config file:
///   { "platform": {"nd":1,"nu":1,"np":4,"gmt":4},
///     "problem":  {"size":8,"kernel":"abstract","input_path":"data.txt"} }
/// input_path is resolved relative to the config file's directory.
RunConfig load_config_file(const std::string& path);

/// One decimal integer per line; must contain exactly `expected` values.
std::vector<std::int64_t> read_input_file(const std::string& path, int expected);

void write_text_file(const std::string& path, const std::string& content);

/// Replays the trace and renders it one line per transition:
///   <index> <pid> <role> <label> time=<t>
/// with a terminal FINAL line carrying time, parameters and, for the
/// minimum kernel, the computed result.
std::string trace_to_text(const PlatformConfig& platform, const ProblemSpec& problem,
                          const Trace& trace);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string trails_to_csv(int size, const std::vector<RankedTrail>& trails);

std::string verdict_to_json(const Verdict& v, Tick T, const std::string& trace_path);
std::string tune_result_to_json(const TuneResult& r, const std::string& trace_path);
/// The tuning optimum as a single table row in the sweep CSV shape.
std::string tune_result_to_csv(int size, const TuneResult& r);

}  // namespace mctune

#endif  // MCTUNE_REPORT_HPP
