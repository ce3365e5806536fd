#include "frogsim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "frogsim/csv.hpp"
#include "frogsim/oracle.hpp"

namespace frogsim {

namespace {

using csv::format_double;

std::string replica_tag(std::int64_t r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%04lld", static_cast<long long>(r));
    return buf;
}

class OutputWriter {
public:
    OutputWriter(const ExperimentSpec& spec, CommandResult& result) : dir_(spec.output_dir), result_(result) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw std::runtime_error("cannot write " + path.string());
        result_.files.push_back(path);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

private:
    std::filesystem::path dir_;
    CommandResult& result_;
};

std::uint64_t seed_of(const ExperimentSpec& spec, std::int64_t r) {
    return replica_seed(spec.config.seed, static_cast<std::uint64_t>(r));
}

Json config_json(const ExperimentSpec& spec) {
    const auto& c = spec.config;
    Json j;
    j["command"] = to_string(spec.command);
    j["seed"] = c.seed;
    j["d"] = c.dim;
    j["eta"] = c.eta.to_string();
    j["p1"] = c.p1;
    j["p2"] = c.p2;
    j["start1"] = c.start1.to_string();
    j["start2"] = c.start2 ? Json(c.start2->to_string()) : Json(nullptr);
    j["tie"] = c.tie_rule.to_string();
    j["laziness"] = c.laziness == LazinessMode::Independent ? "independent" : "collective";
    j["condition_start"] = c.condition_start_nonempty;
    j["engine"] = c.representation == Representation::Particles ? "particles" : "occupation";
    j["horizon"] = c.horizon;
    j["replicas"] = spec.replicas;
    return j;
}

Json stat_json(const MeanStat& s) {
    Json j;
    j["mean"] = s.mean;
    j["std_error"] = s.std_error;
    j["count"] = s.count;
    return j;
}

Json proportion_json(std::int64_t hits, std::int64_t total) {
    const double f = total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
    Json j;
    j["frequency"] = f;
    j["std_error"] = total > 0 ? std::sqrt(f * (1.0 - f) / static_cast<double>(total)) : 0.0;
    j["count"] = hits;
    return j;
}

// ------------------------------------------------------------------- svg

std::string svg_header(const std::string& view_box) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + view_box +
           "\" width=\"640\" height=\"640\">\n";
}

const char* type_colour(ParticleType t) { return t == ParticleType::Type1 ? "#1f5fbf" : "#c8322d"; }

} // namespace

void parallel_for(std::int64_t n, unsigned threads, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n));
    if (threads <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (!stop.load()) {
            const auto i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string trace_svg(const RunSummary& summary) {
    if (summary.dim != 2) throw std::invalid_argument("trace_svg needs d = 2");
    std::int32_t lo_x = summary.start1[0], hi_x = lo_x, lo_y = summary.start1[1], hi_y = lo_y;
    for (const auto& e : summary.discoveries) {
        lo_x = std::min(lo_x, e.site[0]);
        hi_x = std::max(hi_x, e.site[0]);
        lo_y = std::min(lo_y, e.site[1]);
        hi_y = std::max(hi_y, e.site[1]);
    }
    // lattice y grows upwards, svg y downwards
    const auto vb = std::to_string(lo_x - 1) + " " + std::to_string(-hi_y - 1) + " " +
                    std::to_string(hi_x - lo_x + 3) + " " + std::to_string(hi_y - lo_y + 3);
    std::string out = svg_header(vb);
    out += "<rect x=\"" + std::to_string(lo_x - 1) + "\" y=\"" + std::to_string(-hi_y - 1) + "\" width=\"" +
           std::to_string(hi_x - lo_x + 3) + "\" height=\"" + std::to_string(hi_y - lo_y + 3) +
           "\" fill=\"white\"/>\n";
    for (const auto& e : summary.discoveries) {
        out += "<rect x=\"" + std::to_string(e.site[0]) + "\" y=\"" + std::to_string(-e.site[1]) +
               "\" width=\"1\" height=\"1\" fill=\"" + type_colour(e.owner) + "\"/>\n";
    }
    auto marker = [&](const Site& s) {
        out += "<circle cx=\"" + format_double(s[0] + 0.5) + "\" cy=\"" + format_double(-s[1] + 0.5) +
               "\" r=\"0.35\" fill=\"black\"/>\n";
    };
    marker(summary.start1);
    if (summary.start2) marker(*summary.start2);
    out += "</svg>\n";
    return out;
}

std::string shape_svg(const ShapeEstimate& shape) {
    if (shape.center().dim() != 2) throw std::invalid_argument("shape_svg needs d = 2");
    const double s = shape.n() > 0 ? 1.0 / shape.n() : 1.0;
    std::string out = svg_header("-1.1 -1.1 2.2 2.2");
    out += "<rect x=\"-1.1\" y=\"-1.1\" width=\"2.2\" height=\"2.2\" fill=\"white\"/>\n";
    const auto& c = shape.center();
    for (const auto& cell : shape.cells()) {
        const double x = (cell[0] - c[0] - 0.5) * s;
        const double y = (-(cell[1] - c[1]) - 0.5) * s;
        out += "<rect x=\"" + format_double(x) + "\" y=\"" + format_double(y) + "\" width=\"" + format_double(s) +
               "\" height=\"" + format_double(s) + "\" fill=\"#1f5fbf\"/>\n";
    }
    auto diamond = [&](double r, const char* colour) {
        const auto a = format_double(r);
        const auto b = format_double(-r);
        out += "<polygon points=\"" + a + ",0 0," + a + " " + b + ",0 0," + b + "\" fill=\"none\" stroke=\"" +
               colour + "\" stroke-width=\"0.006\"/>\n";
    };
    diamond(1.0, "black");
    if (shape.inner_radius() >= 0) diamond(static_cast<double>(shape.inner_radius()) * s, "#2a9d3a");
    diamond(static_cast<double>(shape.outer_radius()) * s, "#e08a00");
    out += "</svg>\n";
    return out;
}

// -------------------------------------------------------------- simulate

CommandResult run_simulate(const ExperimentSpec& spec) {
    CommandResult result;
    OutputWriter out(spec, result);
    std::vector<RunSummary> runs(static_cast<std::size_t>(spec.replicas));
    parallel_for(spec.replicas, spec.threads, [&](std::int64_t r) {
        runs[static_cast<std::size_t>(r)] = run(spec.config, RandomnessSource(seed_of(spec, r)), spec.config.horizon);
    });

    Json replicas = Json::array();
    std::vector<double> discovered;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& s = runs[r];
        std::array<std::int64_t, 2> sites{};
        for (const auto& e : s.discoveries) ++sites[static_cast<std::size_t>(type_index(e.owner))];
        Json j;
        j["replica"] = r;
        j["seed"] = seed_of(spec, static_cast<std::int64_t>(r));
        j["time"] = s.time;
        j["discovered"] = s.discoveries.size();
        j["sites_type1"] = sites[0];
        j["sites_type2"] = sites[1];
        j["activated_type1"] = s.activated[0];
        j["activated_type2"] = s.activated[1];
        replicas.push_back(j);
        discovered.push_back(static_cast<double>(s.discoveries.size()));

        const auto tag = replica_tag(static_cast<std::int64_t>(r));
        if (spec.emit.csv) out.write("trace_" + tag + ".csv", csv::trace_table(csv::trace_rows(s)).write());
        if (spec.emit.svg && s.dim == 2) out.write("simulate_" + tag + ".svg", trace_svg(s));
    }
    const auto stat = mean_stat(discovered);
    result.summary["config"] = config_json(spec);
    result.summary["replicas"] = replicas;
    result.summary["metrics"] = {{"mean_discovered", stat.mean}};
    if (spec.emit.json) out.write_json("simulate.json", result.summary);
    result.headline = "simulate: " + std::to_string(spec.replicas) + " replica(s), mean discovered sites " +
                      format_double(stat.mean);
    return result;
}

// ----------------------------------------------------------------- shape

CommandResult run_shape(const ExperimentSpec& spec) {
    auto checkpoints = spec.shape.checkpoints;
    if (checkpoints.empty()) checkpoints.push_back(spec.config.horizon);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    if (checkpoints.back() > spec.config.horizon) {
        throw ConfigError(0, "shape checkpoint " + std::to_string(checkpoints.back()) + " exceeds horizon " +
                                 std::to_string(spec.config.horizon));
    }
    if (spec.config.two_type()) throw ConfigError(0, "shape is a one-type observable; remove start2");

    CommandResult result;
    OutputWriter out(spec, result);
    const double rho = spec.shape.coverage_rho;
    std::vector<std::vector<ShapeEstimate>> shapes(static_cast<std::size_t>(spec.replicas));
    parallel_for(spec.replicas, spec.threads, [&](std::int64_t r) {
        const auto s = run(spec.config, RandomnessSource(seed_of(spec, r)), checkpoints.back());
        auto& mine = shapes[static_cast<std::size_t>(r)];
        for (const auto n : checkpoints) mine.push_back(shape_estimate(s, n));
    });

    Json per_checkpoint = Json::array();
    Json metrics;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        const double n = checkpoints[k];
        std::vector<double> inner, outer, coverage;
        for (const auto& mine : shapes) {
            inner.push_back(static_cast<double>(mine[k].inner_radius()) / n);
            outer.push_back(static_cast<double>(mine[k].outer_radius()) / n);
            coverage.push_back(diamond_coverage(mine[k], rho));
        }
        Json j;
        j["n"] = checkpoints[k];
        j["inner_ratio"] = stat_json(mean_stat(inner));
        j["outer_ratio"] = stat_json(mean_stat(outer));
        j["coverage_rho"] = rho;
        j["coverage"] = stat_json(mean_stat(coverage));
        per_checkpoint.push_back(j);
        if (k + 1 == checkpoints.size()) {
            metrics["inner_ratio"] = mean_stat(inner).mean;
            metrics["outer_ratio"] = mean_stat(outer).mean;
            metrics["coverage"] = mean_stat(coverage).mean;
        }
    }

    Json replicas = Json::array();
    for (std::size_t r = 0; r < shapes.size(); ++r) {
        const auto tag = replica_tag(static_cast<std::int64_t>(r));
        Json rj;
        rj["replica"] = r;
        rj["seed"] = seed_of(spec, static_cast<std::int64_t>(r));
        Json cps = Json::array();
        std::vector<csv::ShapeRow> rows;
        for (const auto& sh : shapes[r]) {
            Json cj;
            cj["n"] = sh.n();
            cj["cells"] = sh.cells().size();
            cj["inner_radius"] = sh.inner_radius();
            cj["outer_radius"] = sh.outer_radius();
            cj["coverage"] = diamond_coverage(sh, rho);
            cps.push_back(cj);
            for (const auto& cell : sh.cells()) rows.push_back(csv::ShapeRow{sh.n(), cell});
        }
        rj["checkpoints"] = cps;
        replicas.push_back(rj);
        if (spec.emit.csv) out.write("shape_" + tag + ".csv", csv::shape_table(spec.config.dim, rows).write());
        if (spec.emit.svg && spec.config.dim == 2) out.write("shape_" + tag + ".svg", shape_svg(shapes[r].back()));
    }

    result.summary["config"] = config_json(spec);
    result.summary["checkpoints"] = per_checkpoint;
    result.summary["replicas"] = replicas;
    result.summary["metrics"] = metrics;
    if (spec.emit.json) out.write_json("shape.json", result.summary);
    result.headline = "shape: n=" + std::to_string(checkpoints.back()) + " inner/n " +
                      format_double(metrics["inner_ratio"].get<double>()) + " outer/n " +
                      format_double(metrics["outer_ratio"].get<double>());
    return result;
}

// --------------------------------------------------------------- coexist

CommandResult run_coexist(const ExperimentSpec& spec) {
    if (!spec.config.two_type()) throw ConfigError(0, "coexist needs a second start site (start2)");
    CommandResult result;
    OutputWriter out(spec, result);
    const auto k = spec.coexist.k;
    std::vector<OutcomeSummary> outcomes(static_cast<std::size_t>(spec.replicas));
    parallel_for(spec.replicas, spec.threads, [&](std::int64_t r) {
        const auto s = run(spec.config, RandomnessSource(seed_of(spec, r)), spec.config.horizon);
        outcomes[static_cast<std::size_t>(r)] = outcome_summary(s, k);
    });

    std::vector<csv::OutcomeRow> rows;
    std::int64_t coexist = 0, lead1 = 0, lead2 = 0, ties = 0;
    std::vector<double> count1, count2;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        const auto& o = outcomes[r];
        rows.push_back(csv::OutcomeRow{seed_of(spec, static_cast<std::int64_t>(r)), o.count1, o.count2, o.leader,
                                       o.coexist});
        coexist += o.coexist ? 1 : 0;
        lead1 += o.leader == Leader::Type1 ? 1 : 0;
        lead2 += o.leader == Leader::Type2 ? 1 : 0;
        ties += o.leader == Leader::Tie ? 1 : 0;
        count1.push_back(static_cast<double>(o.count1));
        count2.push_back(static_cast<double>(o.count2));
    }
    const auto n = static_cast<std::int64_t>(outcomes.size());
    result.summary["config"] = config_json(spec);
    result.summary["k"] = k;
    result.summary["coexistence"] = proportion_json(coexist, n);
    result.summary["leader_type1"] = proportion_json(lead1, n);
    result.summary["leader_type2"] = proportion_json(lead2, n);
    result.summary["leader_tie"] = proportion_json(ties, n);
    result.summary["count_type1"] = stat_json(mean_stat(count1));
    result.summary["count_type2"] = stat_json(mean_stat(count2));
    result.summary["metrics"] = {{"coexistence", result.summary["coexistence"]["frequency"]},
                                 {"leader_type1", result.summary["leader_type1"]["frequency"]},
                                 {"leader_type2", result.summary["leader_type2"]["frequency"]}};
    if (spec.emit.csv) out.write("outcomes.csv", csv::outcome_table(k, rows).write());
    if (spec.emit.json) out.write_json("coexist.json", result.summary);
    result.headline = "coexist: K=" + std::to_string(k) + " frequency " +
                      format_double(result.summary["coexistence"]["frequency"].get<double>()) + ", leader 1/2 " +
                      format_double(result.summary["leader_type1"]["frequency"].get<double>()) + "/" +
                      format_double(result.summary["leader_type2"]["frequency"].get<double>());
    return result;
}

// --------------------------------------------------------------- passage

namespace {

/// Deterministic site with |s|_1 <= radius drawn from the Aux stream.
Site audit_site(const SimConfig& config, std::int64_t triple, int which, std::int32_t radius) {
    const auto origin = Site::origin(config.dim);
    const auto span = static_cast<std::uint64_t>(2 * radius + 1);
    for (std::uint64_t attempt = 0;; ++attempt) {
        Site s = origin;
        for (int i = 0; i < config.dim; ++i) {
            const StreamKey key{config.seed, Stream::Aux, origin, static_cast<std::uint64_t>(which + 10),
                                static_cast<std::uint64_t>(triple), attempt * kMaxDim + static_cast<std::uint64_t>(i)};
            s[i] = static_cast<std::int32_t>(raw_bits(key) % span) - radius;
        }
        if (l1_norm(s) <= radius) return s;
    }
}

} // namespace

CommandResult run_passage(const ExperimentSpec& spec) {
    const auto& c = spec.config;
    if (c.two_type()) throw ConfigError(0, "passage times are one-type observables; remove start2");
    auto p_values = spec.passage.p_values;
    if (p_values.empty()) p_values.push_back(c.p1);
    const auto targets = spec.passage.targets.empty() ? std::vector<Site>{Site::axis_point(c.dim, 10)}
                                                      : spec.passage.targets;

    CommandResult result;
    OutputWriter out(spec, result);

    // T(start1, y) for every replica, p and target; coupled across p on each realization.
    const auto per_replica = p_values.size() * targets.size();
    std::vector<PassageTime> times(static_cast<std::size_t>(spec.replicas) * per_replica);
    parallel_for(spec.replicas, spec.threads, [&](std::int64_t r) {
        const RandomnessSource source(seed_of(spec, r));
        for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
            const auto t = passage_times(c, source, c.start1, targets, p_values[pi], c.horizon);
            std::copy(t.begin(), t.end(),
                      times.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * per_replica +
                                                                  pi * targets.size()));
        }
    });

    std::vector<csv::PassageRow> rows;
    std::int64_t monotone_violations = 0;
    for (std::int64_t r = 0; r < spec.replicas; ++r) {
        const auto base = static_cast<std::size_t>(r) * per_replica;
        for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
            for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                rows.push_back(csv::PassageRow{r, c.start1, targets[ti], p_values[pi], times[base + pi * targets.size() + ti]});
            }
        }
        // larger p can only discover earlier on the same realization
        for (std::size_t a = 0; a < p_values.size(); ++a) {
            for (std::size_t b = 0; b < p_values.size(); ++b) {
                if (!(p_values[a] < p_values[b])) continue;
                for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                    const auto& slow = times[base + a * targets.size() + ti];
                    const auto& fast = times[base + b * targets.size() + ti];
                    if (slow.resolved && (!fast.resolved || fast.time > slow.time)) ++monotone_violations;
                }
            }
        }
    }

    Json per_target = Json::array();
    for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
            std::vector<double> resolved;
            std::int64_t unresolved = 0;
            for (std::int64_t r = 0; r < spec.replicas; ++r) {
                const auto& t = times[static_cast<std::size_t>(r) * per_replica + pi * targets.size() + ti];
                if (t.resolved) {
                    resolved.push_back(t.time);
                } else {
                    ++unresolved;
                }
            }
            Json j;
            j["p"] = p_values[pi];
            j["target"] = targets[ti].to_string();
            j["time"] = stat_json(mean_stat(resolved));
            j["unresolved"] = unresolved;
            per_target.push_back(j);
        }
    }

    // time constant along the chosen direction
    const Site direction = spec.passage.mu_direction.value_or(Site::axis_point(c.dim, 1));
    const auto mu = estimate_mu(c, spec.passage.mu_n, spec.replicas, direction);
    Json mu_json = Json::array();
    for (const auto& m : mu) {
        Json j;
        j["n"] = m.n;
        j["ratio"] = stat_json(m.ratio);
        j["unresolved"] = m.unresolved;
        mu_json.push_back(j);
    }

    // subadditivity on random triples, each on its own realization
    std::int64_t checked = 0, violated = 0, skipped = 0;
    const auto triples = spec.passage.audit_triples;
    const auto radius = spec.passage.audit_radius;
    for (std::size_t pi = 0; pi < p_values.size() && triples > 0; ++pi) {
        std::vector<Subadditivity> verdicts(static_cast<std::size_t>(triples));
        parallel_for(triples, spec.threads, [&](std::int64_t i) {
            const auto x = audit_site(c, i, 0, radius);
            const auto w = audit_site(c, i, 1, radius);
            const auto y = audit_site(c, i, 2, radius);
            const RandomnessSource source(seed_of(spec, i));
            verdicts[static_cast<std::size_t>(i)] = check_subadditivity(c, source, x, w, y, p_values[pi], c.horizon).verdict;
        });
        for (const auto v : verdicts) {
            checked += v != Subadditivity::Inapplicable ? 1 : 0;
            violated += v == Subadditivity::Violated ? 1 : 0;
            skipped += v == Subadditivity::Inapplicable ? 1 : 0;
        }
    }

    result.summary["config"] = config_json(spec);
    result.summary["passage"] = per_target;
    result.summary["mu"] = mu_json;
    result.summary["mu_direction"] = direction.to_string();
    result.summary["coupling_monotonicity_violations"] = monotone_violations;
    result.summary["subadditivity"] = {{"triples_checked", checked},
                                       {"violations", violated},
                                       {"unresolved_triples", skipped},
                                       {"radius", radius}};
    Json metrics;
    if (!mu.empty()) metrics["mu"] = mu.back().ratio.mean;
    metrics["subadditivity_violations"] = violated;
    metrics["coupling_monotonicity_violations"] = monotone_violations;
    result.summary["metrics"] = metrics;
    if (spec.emit.csv) out.write("passage.csv", csv::passage_table(rows).write());
    if (spec.emit.json) out.write_json("passage.json", result.summary);
    result.headline = "passage: mu(" + std::to_string(mu.empty() ? 0 : mu.back().n) + ") " +
                      format_double(mu.empty() ? 0.0 : mu.back().ratio.mean) + ", subadditivity violations " +
                      std::to_string(violated) + "/" + std::to_string(checked);
    return result;
}

// ---------------------------------------------------------- oracle-check

CommandResult run_oracle_check(const ExperimentSpec& spec) {
    const auto& c = spec.config;
    if (c.eta.kind != InitDistribution::Kind::Degenerate) {
        throw ConfigError(0, "oracle-check needs a degenerate eta, got " + c.eta.to_string());
    }
    CommandResult result;
    OutputWriter out(spec, result);

    OutcomeDistribution exact;
    try {
        exact = enumerate_exact(c, c.horizon);
    } catch (const BudgetExceeded& e) {
        throw std::runtime_error(std::string(e.what()) + "; lower the horizon");
    }

    const auto samples = spec.oracle.samples;
    std::vector<std::string> digests(static_cast<std::size_t>(samples));
    parallel_for(samples, spec.threads, [&](std::int64_t r) {
        digests[static_cast<std::size_t>(r)] = outcome_digest(run(c, RandomnessSource(seed_of(spec, r)), c.horizon));
    });
    std::map<std::string, std::int64_t> counts;
    for (const auto& d : digests) ++counts[d];
    std::map<std::string, double> empirical;
    for (const auto& [d, n] : counts) empirical[d] = static_cast<double>(n) / static_cast<double>(samples);

    const double tv = total_variation(empirical, exact);
    const bool passed = tv <= spec.oracle.threshold;

    std::vector<csv::OracleRow> rows;
    Json atoms = Json::array();
    for (const auto& [digest, prob] : exact.atoms) {
        rows.push_back(csv::OracleRow{digest, numerator(prob).str(), denominator(prob).str()});
        const auto it = empirical.find(digest);
        Json a;
        a["digest"] = digest;
        a["exact"] = static_cast<double>(prob);
        a["empirical"] = it == empirical.end() ? 0.0 : it->second;
        atoms.push_back(a);
    }
    std::int64_t outside = 0;
    for (const auto& [d, n] : counts) {
        if (!exact.atoms.contains(d)) outside += n;
    }

    result.summary["config"] = config_json(spec);
    result.summary["samples"] = samples;
    result.summary["branches"] = exact.branches;
    result.summary["exact_atoms"] = exact.atoms.size();
    result.summary["empirical_atoms"] = empirical.size();
    result.summary["samples_outside_support"] = outside;
    result.summary["total_variation"] = tv;
    result.summary["threshold"] = spec.oracle.threshold;
    result.summary["passed"] = passed;
    result.summary["atoms"] = atoms;
    result.summary["metrics"] = {{"total_variation", tv}, {"passed", passed ? 1 : 0}};
    if (spec.emit.csv) out.write("oracle.csv", csv::oracle_table(rows).write());
    if (spec.emit.json) out.write_json("oracle_check.json", result.summary);
    result.check_failed = !passed;
    result.headline = std::string("oracle-check: ") + (passed ? "PASS" : "FAIL") + " total variation " +
                      format_double(tv) + " (threshold " + format_double(spec.oracle.threshold) + ", " +
                      std::to_string(exact.atoms.size()) + " exact outcomes)";
    return result;
}

// ----------------------------------------------------------------- sweep

CommandResult run_sweep(const ExperimentSpec& spec) {
    const auto& axes = spec.sweep.axes;
    if (axes.empty()) throw ConfigError(0, "sweep needs at least one swept key in [sweep]");
    CommandResult result;
    OutputWriter out(spec, result);

    std::size_t points = 1;
    for (const auto& a : axes) points *= a.values.size();

    csv::Table table;
    table.header = {"point"};
    for (const auto& a : axes) table.header.push_back(a.key);
    table.header.insert(table.header.end(), {"status", "metric", "value"});

    Json grid = Json::array();
    std::int64_t failures = 0;
    for (std::size_t i = 0; i < points; ++i) {
        ExperimentSpec point = spec;
        point.command = spec.sweep.command;
        point.sweep = {};
        char name[32];
        std::snprintf(name, sizeof name, "point_%04zu", i);
        point.output_dir = spec.output_dir / name;

        std::vector<std::string> values;
        Json pj;
        pj["point"] = i;
        Json params;
        std::size_t rest = i;
        // last axis varies fastest
        std::vector<std::size_t> idx(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            idx[a] = rest % axes[a].values.size();
            rest /= axes[a].values.size();
        }
        for (std::size_t a = 0; a < axes.size(); ++a) {
            values.push_back(axes[a].values[idx[a]]);
            params[axes[a].key] = axes[a].values[idx[a]];
        }
        pj["parameters"] = params;

        std::vector<std::string> prefix{std::to_string(i)};
        prefix.insert(prefix.end(), values.begin(), values.end());
        try {
            for (std::size_t a = 0; a < axes.size(); ++a) {
                try {
                    apply_sim_key(point, axes[a].key, values[a]);
                } catch (const std::exception& e) {
                    throw ConfigError(axes[a].line, e.what());
                }
            }
            finalize(point);
            const auto sub = run_experiment(point);
            result.files.insert(result.files.end(), sub.files.begin(), sub.files.end());
            pj["status"] = sub.check_failed ? "check_failed" : "ok";
            pj["metrics"] = sub.summary["metrics"];
            for (const auto& [metric, value] : sub.summary["metrics"].items()) {
                auto row = prefix;
                row.insert(row.end(), {pj["status"].get<std::string>(), metric,
                                       value.is_number_float() ? format_double(value.get<double>()) : value.dump()});
                table.rows.push_back(std::move(row));
            }
        } catch (const std::exception& e) {
            ++failures;
            pj["status"] = "error";
            pj["error"] = e.what();
            auto row = prefix;
            row.insert(row.end(), {"error", "message", e.what()});
            table.rows.push_back(std::move(row));
        }
        grid.push_back(pj);
    }

    result.summary["config"] = config_json(spec);
    result.summary["swept_command"] = to_string(spec.sweep.command);
    result.summary["points"] = grid;
    result.summary["failures"] = failures;
    result.summary["metrics"] = {{"points", points}, {"failures", failures}};
    if (spec.emit.csv) out.write("sweep.csv", table.write());
    if (spec.emit.json) out.write_json("sweep.json", result.summary);
    result.headline = "sweep: " + std::to_string(points) + " point(s) of " + to_string(spec.sweep.command) + ", " +
                      std::to_string(failures) + " failed";
    return result;
}

CommandResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.command) {
    case Command::Simulate: return run_simulate(spec);
    case Command::Shape: return run_shape(spec);
    case Command::Coexist: return run_coexist(spec);
    case Command::Passage: return run_passage(spec);
    case Command::Sweep: return run_sweep(spec);
    case Command::OracleCheck: return run_oracle_check(spec);
    }
    throw std::logic_error("unhandled command");
}

} // namespace frogsim
