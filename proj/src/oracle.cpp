#include "frogsim/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

namespace frogsim {

namespace {

std::string format_discovery(const Site& site, std::int32_t time, Arrival arrival, ParticleType owner) {
    return site.to_string() + "@" + std::to_string(time) + ":" + to_string(arrival) + ">" + to_string(owner);
}

struct Discovery {
    std::int32_t time;
    Arrival arrival;
    ParticleType owner;
};

/// Exchangeable particles: only position and type matter to the law.
struct OracleState {
    std::vector<std::pair<Site, ParticleType>> particles; // kept sorted
    std::map<Site, Discovery> discovered;

    std::string digest() const {
        std::string out;
        for (const auto& [site, d] : discovered) {
            if (!out.empty()) out += ';';
            out += format_discovery(site, d.time, d.arrival, d.owner);
        }
        return out;
    }

    std::string key() const {
        std::string out;
        for (const auto& [site, type] : particles) out += site.to_string() + to_string(type) + ',';
        return out + '|' + digest();
    }
};

using Frontier = std::map<std::string, std::pair<OracleState, Rational>>;

void accumulate(Frontier& into, OracleState state, const Rational& prob) {
    std::sort(state.particles.begin(), state.particles.end());
    auto key = state.key();
    auto it = into.find(key);
    if (it == into.end()) {
        into.emplace(std::move(key), std::make_pair(std::move(state), prob));
    } else {
        it->second.second += prob;
    }
}

class Enumerator {
public:
    Enumerator(const SimConfig& config, std::uint64_t budget)
        : config_(config), budget_(budget), eta_(config.eta.count), dirs_(2 * config.dim) {
        p_[0] = to_rational(config.p1);
        p_[1] = to_rational(config.p2);
        tie_q_ = config.tie_rule.kind == TieRule::Kind::BiasedCoin ? to_rational(config.tie_rule.q) : Rational(1, 2);
    }

    std::uint64_t branches() const noexcept { return branches_; }

    OracleState initial() const {
        OracleState s;
        auto seed_site = [&](const Site& site, ParticleType type) {
            s.discovered[site] = Discovery{0, type == ParticleType::Type1 ? Arrival::Type1 : Arrival::Type2, type};
            for (std::int64_t j = 0; j < eta_; ++j) s.particles.emplace_back(site, type);
        };
        seed_site(config_.start1, ParticleType::Type1);
        if (config_.start2) seed_site(*config_.start2, ParticleType::Type2);
        std::sort(s.particles.begin(), s.particles.end());
        return s;
    }

    void advance(const OracleState& state, const Rational& prob, std::int32_t t, Frontier& next) {
        std::vector<std::pair<Site, ParticleType>> moved(state.particles.size());
        if (config_.laziness == LazinessMode::Independent) {
            assign_independent(state, 0, prob, moved, t, next);
            return;
        }
        // Collective: one coin per type.
        for (int m1 = 0; m1 < 2; ++m1) {
            for (int m2 = 0; m2 < 2; ++m2) {
                Rational q = prob;
                q *= m1 ? p_[0] : Rational(1) - p_[0];
                q *= m2 ? p_[1] : Rational(1) - p_[1];
                if (q == 0) continue;
                assign_collective(state, 0, q, {m1 == 1, m2 == 1}, moved, t, next);
            }
        }
    }

private:
    void assign_independent(const OracleState& state, std::size_t i, const Rational& prob,
                            std::vector<std::pair<Site, ParticleType>>& moved, std::int32_t t, Frontier& next) {
        if (i == state.particles.size()) {
            resolve(state, moved, prob, t, next);
            return;
        }
        const auto& [site, type] = state.particles[i];
        const Rational& p = p_[static_cast<std::size_t>(type_index(type))];
        if (p < 1) {
            moved[i] = {site, type};
            assign_independent(state, i + 1, prob * (Rational(1) - p), moved, t, next);
        }
        const Rational per_dir = prob * p / dirs_;
        for (int k = 0; k < dirs_; ++k) {
            moved[i] = {shifted(site, Direction::from_index(k)), type};
            assign_independent(state, i + 1, per_dir, moved, t, next);
        }
    }

    void assign_collective(const OracleState& state, std::size_t i, const Rational& prob, std::array<bool, 2> moving,
                           std::vector<std::pair<Site, ParticleType>>& moved, std::int32_t t, Frontier& next) {
        if (i == state.particles.size()) {
            resolve(state, moved, prob, t, next);
            return;
        }
        const auto& [site, type] = state.particles[i];
        if (!moving[static_cast<std::size_t>(type_index(type))]) {
            moved[i] = {site, type};
            assign_collective(state, i + 1, prob, moving, moved, t, next);
            return;
        }
        const Rational per_dir = prob / dirs_;
        for (int k = 0; k < dirs_; ++k) {
            moved[i] = {shifted(site, Direction::from_index(k)), type};
            assign_collective(state, i + 1, per_dir, moving, moved, t, next);
        }
    }

    void resolve(const OracleState& state, const std::vector<std::pair<Site, ParticleType>>& moved,
                 const Rational& prob, std::int32_t t, Frontier& next) {
        // Arrivals at undiscovered sites, by type.
        std::map<Site, std::array<std::int64_t, 2>> arrivals;
        for (const auto& [site, type] : moved) {
            if (!state.discovered.contains(site)) ++arrivals[site][static_cast<std::size_t>(type_index(type))];
        }
        struct Choice {
            Site site;
            Arrival arrival;
            std::vector<std::pair<ParticleType, Rational>> outcomes;
        };
        std::vector<Choice> choices;
        for (const auto& [site, counts] : arrivals) {
            Choice c{site, Arrival::None, {}};
            if (counts[0] > 0 && counts[1] > 0) {
                c.arrival = Arrival::Both;
                c.outcomes = tie_outcomes(counts);
            } else {
                c.arrival = counts[0] > 0 ? Arrival::Type1 : Arrival::Type2;
                c.outcomes = {{counts[0] > 0 ? ParticleType::Type1 : ParticleType::Type2, Rational(1)}};
            }
            choices.push_back(std::move(c));
        }
        std::vector<ParticleType> owners(choices.size());
        std::function<void(std::size_t, const Rational&)> branch = [&](std::size_t i, const Rational& q) {
            if (i == choices.size()) {
                if (++branches_ > budget_) throw BudgetExceeded(branches_, budget_);
                OracleState s;
                s.particles = moved;
                s.discovered = state.discovered;
                for (std::size_t k = 0; k < choices.size(); ++k) {
                    s.discovered[choices[k].site] = Discovery{t, choices[k].arrival, owners[k]};
                    for (std::int64_t j = 0; j < eta_; ++j) s.particles.emplace_back(choices[k].site, owners[k]);
                }
                accumulate(next, std::move(s), q);
                return;
            }
            for (const auto& [owner, w] : choices[i].outcomes) {
                owners[i] = owner;
                branch(i + 1, q * w);
            }
        };
        branch(0, prob);
    }

    std::vector<std::pair<ParticleType, Rational>> tie_outcomes(const std::array<std::int64_t, 2>& counts) const {
        const Rational half(1, 2);
        switch (config_.tie_rule.kind) {
        case TieRule::Kind::AlwaysType1: return {{ParticleType::Type1, Rational(1)}};
        case TieRule::Kind::AlwaysType2: return {{ParticleType::Type2, Rational(1)}};
        case TieRule::Kind::MajorityCount:
            if (counts[0] != counts[1]) {
                return {{counts[0] > counts[1] ? ParticleType::Type1 : ParticleType::Type2, Rational(1)}};
            }
            return {{ParticleType::Type1, half}, {ParticleType::Type2, half}};
        case TieRule::Kind::FairCoin: return {{ParticleType::Type1, half}, {ParticleType::Type2, half}};
        case TieRule::Kind::BiasedCoin: {
            std::vector<std::pair<ParticleType, Rational>> out;
            if (tie_q_ > 0) out.emplace_back(ParticleType::Type1, tie_q_);
            if (tie_q_ < 1) out.emplace_back(ParticleType::Type2, Rational(1) - tie_q_);
            return out;
        }
        }
        return {};
    }

    const SimConfig& config_;
    std::uint64_t budget_;
    std::int64_t eta_;
    int dirs_;
    std::array<Rational, 2> p_;
    Rational tie_q_;
    std::uint64_t branches_ = 0;
};

} // namespace

Rational OutcomeDistribution::total() const {
    Rational sum = 0;
    for (const auto& [digest, p] : atoms) sum += p;
    return sum;
}

BudgetExceeded::BudgetExceeded(std::uint64_t branches, std::uint64_t budget)
    : std::runtime_error("oracle enumeration budget exceeded: more than " + std::to_string(budget) +
                         " branches (reached " + std::to_string(branches) + ")"),
      branches_(branches) {}

std::string outcome_digest(const RunSummary& summary) {
    auto events = summary.discoveries;
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.site < b.site; });
    std::string out;
    for (const auto& e : events) {
        if (!out.empty()) out += ';';
        out += format_discovery(e.site, e.time, e.arrivals, e.owner);
    }
    return out;
}

Rational to_rational(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot represent a non-finite value as a rational");
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    const std::string text(buf, end);
    // d.ddddde[+-]xx
    const auto e = text.find('e');
    std::string mantissa = text.substr(0, e);
    const int exponent = std::stoi(text.substr(e + 1));
    bool negative = false;
    if (!mantissa.empty() && mantissa.front() == '-') {
        negative = true;
        mantissa.erase(0, 1);
    }
    int fraction_digits = 0;
    if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
        fraction_digits = static_cast<int>(mantissa.size() - dot - 1);
        mantissa.erase(dot, 1);
    }
    Rational r{boost::multiprecision::cpp_int(mantissa)};
    const int scale = exponent - fraction_digits;
    const boost::multiprecision::cpp_int ten_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                              static_cast<unsigned>(std::abs(scale)));
    if (scale >= 0) {
        r *= ten_pow;
    } else {
        r /= ten_pow;
    }
    return negative ? -r : r;
}

OutcomeDistribution enumerate_exact(const SimConfig& config, int horizon, std::uint64_t budget) {
    config.validate();
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (config.eta.kind != InitDistribution::Kind::Degenerate) {
        throw std::invalid_argument("exact enumeration requires a degenerate initial distribution");
    }
    if (config.condition_start_nonempty && config.eta.count == 0) {
        throw std::domain_error("cannot condition on a non-empty site: P(eta >= 1) = 0 under " + config.eta.to_string());
    }

    Enumerator en(config, budget);
    Frontier frontier;
    accumulate(frontier, en.initial(), Rational(1));
    for (std::int32_t t = 1; t <= horizon; ++t) {
        Frontier next;
        for (const auto& [key, entry] : frontier) en.advance(entry.first, entry.second, t, next);
        frontier = std::move(next);
    }

    OutcomeDistribution out;
    for (const auto& [key, entry] : frontier) out.atoms[entry.first.digest()] += entry.second;
    out.branches = std::max<std::uint64_t>(en.branches(), 1);
    return out;
}

double total_variation(const std::map<std::string, double>& empirical, const OutcomeDistribution& exact) {
    double sum = 0.0;
    for (const auto& [digest, p] : exact.atoms) {
        const auto it = empirical.find(digest);
        const double q = it == empirical.end() ? 0.0 : it->second;
        sum += std::abs(q - static_cast<double>(p));
    }
    for (const auto& [digest, q] : empirical) {
        if (!exact.atoms.contains(digest)) sum += std::abs(q);
    }
    return 0.5 * sum;
}

std::map<std::string, double> empirical_distribution(const SimConfig& config, int horizon, std::int64_t samples) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::map<std::string, std::int64_t> counts;
    for (std::int64_t r = 0; r < samples; ++r) {
        const RandomnessSource source(replica_seed(config.seed, static_cast<std::uint64_t>(r)));
        ++counts[outcome_digest(run(config, source, horizon))];
    }
    std::map<std::string, double> out;
    for (const auto& [digest, n] : counts) out[digest] = static_cast<double>(n) / static_cast<double>(samples);
    return out;
}

OracleCheckReport oracle_check(const SimConfig& config, int horizon, std::int64_t samples, double threshold,
                               std::uint64_t budget) {
    const auto exact = enumerate_exact(config, horizon, budget);
    const auto empirical = empirical_distribution(config, horizon, samples);
    OracleCheckReport r;
    r.total_variation = total_variation(empirical, exact);
    r.threshold = threshold;
    r.samples = samples;
    r.exact_atoms = exact.atoms.size();
    r.empirical_atoms = empirical.size();
    r.branches = exact.branches;
    r.passed = r.total_variation <= threshold;
    return r;
}

} // namespace frogsim
