// frogsim command-line driver.
//
//   frogsim <command> --config <file> [--seed N] [--replicas N] [--out DIR]
//           [--emit csv,json,svg] [--threads N]
//
// Exit status: 0 success, 1 configuration error, 2 runtime error,
// 3 oracle-check failed its acceptance threshold.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "frogsim/commands.hpp"
#include "frogsim/config.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheckFailed = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw frogsim::ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator for lazy frog models on Z^d"};
    std::string command_name;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<std::string> out_dir;
    std::optional<std::string> emit;
    std::optional<unsigned> threads;
    bool quiet = false;

    app.add_option("command", command_name, "simulate | shape | coexist | passage | sweep | oracle-check")->required();
    app.add_option("--config,-c", config_path, "experiment configuration file")->required();
    app.add_option("--seed", seed, "base seed (replica r uses a seed derived from it)");
    app.add_option("--replicas", replicas, "number of replicas (samples for oracle-check)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--emit", emit, "comma list of csv, json, svg");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_flag("--quiet,-q", quiet, "do not print the summary line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    frogsim::ExperimentSpec spec;
    try {
        const auto command = frogsim::parse_command(command_name);
        spec = frogsim::parse_config(read_file(config_path));
        spec.command = command;
        if (seed) spec.config.seed = *seed;
        if (replicas) {
            if (*replicas < 1) throw frogsim::ConfigError(0, "--replicas must be >= 1");
            spec.replicas = *replicas;
            spec.oracle.samples = *replicas;
        }
        if (out_dir) frogsim::apply_sim_key(spec, "out", *out_dir);
        if (emit) frogsim::apply_sim_key(spec, "emit", *emit);
        if (threads) spec.threads = *threads;
    } catch (const frogsim::ConfigError& e) {
        std::cerr << "frogsim: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "frogsim: config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto result = frogsim::run_experiment(spec);
        if (!quiet) {
            std::cout << result.headline << '\n';
            std::cout << "wrote " << result.files.size() << " file(s) to " << spec.output_dir.string() << '\n';
        }
        return result.check_failed ? kExitCheckFailed : 0;
    } catch (const frogsim::ConfigError& e) {
        std::cerr << "frogsim: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "frogsim: runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
