#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frogsim/engine.hpp"

namespace frogsim {

enum class Command { Simulate, Shape, Coexist, Passage, Sweep, OracleCheck };

std::string to_string(Command c);
/// Throws std::invalid_argument for unknown names.
Command parse_command(std::string_view name);

/// Malformed or out-of-range configuration. `line()` is 0 when the problem
/// is not tied to a single line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message);
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct EmitSet {
    bool csv = true;
    bool json = true;
    bool svg = true;
    friend bool operator==(const EmitSet&, const EmitSet&) = default;
};

/// Parses "csv,json,svg" (any subset). Throws std::invalid_argument.
EmitSet parse_emit(std::string_view text);

struct ShapeOptions {
    std::vector<std::int32_t> checkpoints; // empty: the horizon only
    double coverage_rho = 0.9;
};

struct CoexistOptions {
    std::int64_t k = 50;
};

struct PassageOptions {
    std::vector<Site> targets;            // empty: (10, 0, ..., 0)
    std::vector<double> p_values;         // empty: p1 only
    std::vector<std::int64_t> mu_n = {50, 100};
    std::optional<Site> mu_direction;     // default e1
    std::int64_t audit_triples = 1000;
    std::int32_t audit_radius = 10;
};

struct OracleOptions {
    std::int64_t samples = 100000;
    double threshold = 0.02;
};

/// One swept parameter: a simulation key and its candidate values (raw text).
struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
    int line = 0;
};

struct SweepOptions {
    Command command = Command::Coexist;
    std::vector<SweepAxis> axes;
};

struct ExperimentSpec {
    Command command = Command::Simulate;
    SimConfig config;
    int replicas = 1;
    std::filesystem::path output_dir = "out";
    EmitSet emit;
    unsigned threads = 0; // 0: hardware concurrency

    ShapeOptions shape;
    CoexistOptions coexist;
    PassageOptions passage;
    OracleOptions oracle;
    SweepOptions sweep;
};

/// Parses `key = value` lines with optional `[section]` headers
/// (shape, coexist, passage, oracle, sweep). `#` starts a comment.
/// Unknown keys and malformed values throw ConfigError with the line number.
ExperimentSpec parse_config(std::string_view text);

/// Applies one simulation-level key (as found before any section) to `spec`.
/// Throws std::invalid_argument for malformed values, std::out_of_range for
/// unknown keys.
void apply_sim_key(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// Defaults that depend on other keys (start site dimension)
/// and the cross-field validation. Throws ConfigError.
void finalize(ExperimentSpec& spec);

/// Splits on commas that are not nested inside parentheses.
std::vector<std::string> split_top_level(std::string_view text);

} // namespace frogsim
