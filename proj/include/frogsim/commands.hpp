#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frogsim/config.hpp"
#include "frogsim/observables.hpp"

namespace frogsim {

using Json = nlohmann::ordered_json;

struct CommandResult {
    Json summary;
    std::vector<std::filesystem::path> files; // written, in creation order
    std::string headline;                     // one-line human summary
    bool check_failed = false;                // oracle-check only
};

/// Runs the command of `spec`, writing the requested outputs below
/// spec.output_dir. Replica r uses replica_seed(config.seed, r). Outputs do
/// not depend on the thread count.
/// Throws ConfigError for settings the command cannot use, std::runtime_error
/// for failures while running.
CommandResult run_experiment(const ExperimentSpec& spec);

CommandResult run_simulate(const ExperimentSpec& spec);
CommandResult run_shape(const ExperimentSpec& spec);
CommandResult run_coexist(const ExperimentSpec& spec);
CommandResult run_passage(const ExperimentSpec& spec);
CommandResult run_sweep(const ExperimentSpec& spec);
CommandResult run_oracle_check(const ExperimentSpec& spec);

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). The first exception thrown is rethrown after all workers stop.
void parallel_for(std::int64_t n, unsigned threads, const std::function<void(std::int64_t)>& fn);

/// Discovered cells of a 2-d run, coloured by type.
std::string trace_svg(const RunSummary& summary);
/// Rescaled shape with the unit diamond and its inner/outer radii overlaid.
std::string shape_svg(const ShapeEstimate& shape);

} // namespace frogsim
