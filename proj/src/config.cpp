#include "frogsim/config.hpp"

#include <charconv>
#include <cctype>

namespace frogsim {

namespace {

std::string_view trim(std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
}

template <typename T>
T parse_integer(std::string_view text, std::string_view key) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view text, std::string_view key) {
    text = trim(text);
    double value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_probability(std::string_view text, std::string_view key) {
    const double p = parse_real(text, key);
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(key) + " = " + std::string(trim(text)) + " is outside (0,1]");
    }
    return p;
}

bool parse_bool(std::string_view text, std::string_view key) {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw std::invalid_argument(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view text, F&& parse_one) {
    std::vector<T> out;
    for (const auto& item : split_top_level(text)) out.push_back(parse_one(item));
    return out;
}

enum class Section { Sim, Shape, Coexist, Passage, Oracle, Sweep };

Section parse_section(std::string_view name) {
    if (name == "sim" || name == "run") return Section::Sim;
    if (name == "shape") return Section::Shape;
    if (name == "coexist") return Section::Coexist;
    if (name == "passage") return Section::Passage;
    if (name == "oracle") return Section::Oracle;
    if (name == "sweep") return Section::Sweep;
    throw std::invalid_argument("unknown section [" + std::string(name) + "]");
}

void apply_section_key(ExperimentSpec& spec, Section section, std::string_view key, std::string_view value) {
    switch (section) {
    case Section::Sim: apply_sim_key(spec, key, value); return;
    case Section::Shape:
        if (key == "checkpoints") {
            spec.shape.checkpoints = parse_list<std::int32_t>(value, [&](std::string_view v) {
                const auto n = parse_integer<std::int32_t>(v, key);
                if (n < 1) throw std::invalid_argument("checkpoints must be >= 1");
                return n;
            });
            return;
        }
        if (key == "coverage_rho") {
            spec.shape.coverage_rho = parse_probability(value, key);
            return;
        }
        break;
    case Section::Coexist:
        if (key == "k") {
            spec.coexist.k = parse_integer<std::int64_t>(value, key);
            if (spec.coexist.k < 0) throw std::invalid_argument("k must be >= 0");
            return;
        }
        break;
    case Section::Passage:
        if (key == "targets") {
            spec.passage.targets = parse_list<Site>(value, [](std::string_view v) { return parse_site(v); });
            return;
        }
        if (key == "p_values") {
            spec.passage.p_values = parse_list<double>(value, [&](std::string_view v) { return parse_probability(v, key); });
            return;
        }
        if (key == "mu_n") {
            spec.passage.mu_n = parse_list<std::int64_t>(value, [&](std::string_view v) {
                const auto n = parse_integer<std::int64_t>(v, key);
                if (n < 1) throw std::invalid_argument("mu_n entries must be >= 1");
                return n;
            });
            return;
        }
        if (key == "mu_direction") {
            spec.passage.mu_direction = parse_site(value);
            return;
        }
        if (key == "audit_triples") {
            spec.passage.audit_triples = parse_integer<std::int64_t>(value, key);
            if (spec.passage.audit_triples < 0) throw std::invalid_argument("audit_triples must be >= 0");
            return;
        }
        if (key == "audit_radius") {
            spec.passage.audit_radius = parse_integer<std::int32_t>(value, key);
            if (spec.passage.audit_radius < 0) throw std::invalid_argument("audit_radius must be >= 0");
            return;
        }
        break;
    case Section::Oracle:
        if (key == "samples") {
            spec.oracle.samples = parse_integer<std::int64_t>(value, key);
            if (spec.oracle.samples < 1) throw std::invalid_argument("samples must be >= 1");
            return;
        }
        if (key == "threshold") {
            spec.oracle.threshold = parse_real(value, key);
            if (!(spec.oracle.threshold >= 0.0 && spec.oracle.threshold <= 1.0)) {
                throw std::invalid_argument("threshold must lie in [0,1]");
            }
            return;
        }
        break;
    case Section::Sweep:
        if (key == "command") {
            spec.sweep.command = parse_command(trim(value));
            if (spec.sweep.command == Command::Sweep) throw std::invalid_argument("a sweep cannot sweep sweeps");
            return;
        }
        {
            // Every value must be acceptable on its own; errors surface per grid point later.
            ExperimentSpec probe = spec;
            apply_sim_key(probe, key, split_top_level(value).front());
            SweepAxis axis{std::string(key), split_top_level(value), 0};
            spec.sweep.axes.push_back(std::move(axis));
        }
        return;
    }
    throw std::out_of_range("unknown key '" + std::string(key) + "'");
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Shape: return "shape";
    case Command::Coexist: return "coexist";
    case Command::Passage: return "passage";
    case Command::Sweep: return "sweep";
    case Command::OracleCheck: return "oracle-check";
    }
    return {};
}

Command parse_command(std::string_view name) {
    for (const auto c : {Command::Simulate, Command::Shape, Command::Coexist, Command::Passage, Command::Sweep,
                         Command::OracleCheck}) {
        if (name == to_string(c)) return c;
    }
    throw std::invalid_argument("unknown command '" + std::string(name) +
                                "' (expected simulate, shape, coexist, passage, sweep or oracle-check)");
}

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

EmitSet parse_emit(std::string_view text) {
    EmitSet e{false, false, false};
    for (const auto& item : split_top_level(text)) {
        if (item == "csv") {
            e.csv = true;
        } else if (item == "json") {
            e.json = true;
        } else if (item == "svg") {
            e.svg = true;
        } else {
            throw std::invalid_argument("emit: unknown format '" + item + "' (expected csv, json, svg)");
        }
    }
    return e;
}

std::vector<std::string> split_top_level(std::string_view text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string current;
    for (const char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.emplace_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    out.emplace_back(trim(current));
    if (out.size() == 1 && out.front().empty()) throw std::invalid_argument("empty value");
    for (const auto& item : out) {
        if (item.empty()) throw std::invalid_argument("empty list element in '" + std::string(trim(text)) + "'");
    }
    return out;
}

void apply_sim_key(ExperimentSpec& spec, std::string_view key, std::string_view value) {
    auto& c = spec.config;
    value = trim(value);
    if (key == "seed") {
        c.seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "d") {
        c.dim = parse_integer<int>(value, key);
        if (c.dim < 1 || c.dim > kMaxDim) {
            throw std::invalid_argument("d must lie in [1, " + std::to_string(kMaxDim) + "]");
        }
    } else if (key == "eta") {
        c.eta = parse_distribution(value);
    } else if (key == "p1") {
        c.p1 = parse_probability(value, key);
    } else if (key == "p2") {
        c.p2 = parse_probability(value, key);
    } else if (key == "p") {
        c.p1 = c.p2 = parse_probability(value, key);
    } else if (key == "start1") {
        c.start1 = parse_site(value);
    } else if (key == "start2") {
        if (value == "none") {
            c.start2.reset();
        } else {
            c.start2 = parse_site(value);
        }
    } else if (key == "tie") {
        c.tie_rule = parse_tie_rule(value);
    } else if (key == "laziness") {
        if (value == "independent") {
            c.laziness = LazinessMode::Independent;
        } else if (value == "collective") {
            c.laziness = LazinessMode::Collective;
        } else {
            throw std::invalid_argument("laziness must be independent or collective");
        }
    } else if (key == "engine") {
        if (value == "particles") {
            c.representation = Representation::Particles;
        } else if (value == "occupation") {
            c.representation = Representation::Occupation;
        } else {
            throw std::invalid_argument("engine must be particles or occupation");
        }
    } else if (key == "condition_start") {
        c.condition_start_nonempty = parse_bool(value, key);
    } else if (key == "horizon") {
        c.horizon = parse_integer<int>(value, key);
        if (c.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    } else if (key == "replicas") {
        spec.replicas = parse_integer<int>(value, key);
        if (spec.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    } else if (key == "emit") {
        spec.emit = parse_emit(value);
    } else if (key == "out") {
        if (value.empty()) throw std::invalid_argument("out must name a directory");
        spec.output_dir = std::filesystem::path(std::string(value));
    } else if (key == "threads") {
        spec.threads = parse_integer<unsigned>(value, key);
    } else if (key == "command") {
        spec.command = parse_command(value);
    } else {
        throw std::out_of_range("unknown key '" + std::string(key) + "'");
    }
}

void finalize(ExperimentSpec& spec) {
    auto& c = spec.config;
    const bool start1_is_origin = l1_norm(c.start1) == 0;
    if (start1_is_origin && c.start1.dim() != c.dim) c.start1 = Site::origin(c.dim);
    try {
        c.validate();
        for (const auto& t : spec.passage.targets) {
            if (t.dim() != c.dim) throw std::invalid_argument("passage target " + t.to_string() + " does not match d");
        }
        if (spec.passage.mu_direction && spec.passage.mu_direction->dim() != c.dim) {
            throw std::invalid_argument("mu_direction does not match d");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
}

ExperimentSpec parse_config(std::string_view text) {
    ExperimentSpec spec;
    Section section = Section::Sim;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw std::invalid_argument("malformed section header");
                section = parse_section(trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw std::invalid_argument("expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key.empty()) throw std::invalid_argument("missing key before '='");
            apply_section_key(spec, section, key, value);
            if (section == Section::Sweep && !spec.sweep.axes.empty() && spec.sweep.axes.back().line == 0) {
                spec.sweep.axes.back().line = line_no;
            }
        } catch (const std::out_of_range& e) {
            throw ConfigError(line_no, e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line_no, e.what());
        } catch (const std::domain_error& e) {
            throw ConfigError(line_no, e.what());
        }
    }
    finalize(spec);
    return spec;
}

} // namespace frogsim
