#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the engine beyond the keyed random numbers and the config types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "frogsim/engine.hpp"
#include "frogsim/init_dist.hpp"
#include "frogsim/rng.hpp"

namespace frogsim::reference {

struct NaiveDiscovery {
    std::int32_t time = 0;
    ParticleType owner = ParticleType::Type1;
    Arrival arrivals = Arrival::None;
    std::int64_t activated = 0;

    friend bool operator==(const NaiveDiscovery&, const NaiveDiscovery&) = default;
};

struct NaiveParticle {
    Site birth;
    std::uint64_t j = 0;
    Site pos;
    std::uint64_t n = 0; // jumps made
    std::uint64_t k = 1; // next delay sub-counter
    ParticleType type = ParticleType::Type1;
    std::int32_t last_discovery = -1;
};

struct NaiveRun {
    std::map<Site, NaiveDiscovery> discovered;
    std::vector<NaiveParticle> particles;
    /// discovered[t] = number of sites discovered by time t
    std::vector<std::size_t> discovered_by_time;
};

/// Straightforward map-based simulation of the particle representation,
/// reading the same keyed randomness as the engine.
inline NaiveRun naive_run(const SimConfig& config, const RandomnessSource& source, int horizon) {
    std::vector<Site> conditioned = config.conditioned_sites;
    if (config.condition_start_nonempty) {
        conditioned.push_back(config.start1);
        if (config.start2) conditioned.push_back(*config.start2);
    }
    const EtaField eta(config.eta, source, conditioned);
    NaiveRun r;

    auto wake = [&](const Site& site, std::int32_t t, ParticleType owner, Arrival arrivals) {
        const auto n = eta.at(site);
        r.discovered[site] = NaiveDiscovery{t, owner, arrivals, n};
        for (std::int64_t j = 0; j < n; ++j) {
            NaiveParticle p;
            p.birth = site;
            p.j = static_cast<std::uint64_t>(j);
            p.pos = site;
            p.type = owner;
            p.last_discovery = t == 0 ? 0 : -1;
            r.particles.push_back(p);
        }
    };
    wake(config.start1, 0, ParticleType::Type1, Arrival::Type1);
    if (config.start2) wake(*config.start2, 0, ParticleType::Type2, Arrival::Type2);
    r.discovered_by_time.push_back(r.discovered.size());

    const auto origin = Site::origin(config.dim);
    for (std::int32_t t = 1; t <= horizon; ++t) {
        std::map<Site, std::array<std::int64_t, 2>> arrivals;
        std::vector<std::size_t> arrived_particles;
        const std::size_t count = r.particles.size();
        for (std::size_t i = 0; i < count; ++i) {
            auto& p = r.particles[i];
            const double prob = p.type == ParticleType::Type1 ? config.p1 : config.p2;
            bool jump;
            if (config.laziness == LazinessMode::Collective) {
                jump = source.uniform(Stream::Aux, origin, static_cast<std::uint64_t>(type_number(p.type)),
                                      static_cast<std::uint64_t>(t)) <= prob;
            } else if (prob >= 1.0) {
                jump = true;
            } else {
                jump = source.uniform(Stream::Delay, p.birth, p.j, p.n, p.k) <= prob;
            }
            if (!jump) {
                ++p.k;
                continue;
            }
            const auto dir = source.jump_direction(p.birth, p.j, p.n);
            p.pos[dir.axis] += dir.sign;
            ++p.n;
            p.k = 1;
            if (!r.discovered.contains(p.pos)) {
                ++arrivals[p.pos][static_cast<std::size_t>(type_index(p.type))];
                arrived_particles.push_back(i);
            }
        }
        for (const auto& [site, c] : arrivals) {
            Arrival a = c[0] > 0 && c[1] > 0 ? Arrival::Both : (c[0] > 0 ? Arrival::Type1 : Arrival::Type2);
            ParticleType owner = a == Arrival::Type2 ? ParticleType::Type2 : ParticleType::Type1;
            if (a == Arrival::Both) {
                const double u = source.uniform(Stream::TieBreak, site, 0, static_cast<std::uint64_t>(t));
                const auto& rule = config.tie_rule;
                switch (rule.kind) {
                case TieRule::Kind::AlwaysType1: owner = ParticleType::Type1; break;
                case TieRule::Kind::AlwaysType2: owner = ParticleType::Type2; break;
                case TieRule::Kind::BiasedCoin: owner = u < rule.q ? ParticleType::Type1 : ParticleType::Type2; break;
                case TieRule::Kind::MajorityCount:
                    if (c[0] != c[1]) {
                        owner = c[0] > c[1] ? ParticleType::Type1 : ParticleType::Type2;
                        break;
                    }
                    [[fallthrough]];
                case TieRule::Kind::FairCoin: owner = u < 0.5 ? ParticleType::Type1 : ParticleType::Type2; break;
                }
            }
            wake(site, t, owner, a);
        }
        for (const auto i : arrived_particles) r.particles[i].last_discovery = t;
        r.discovered_by_time.push_back(r.discovered.size());
    }
    return r;
}

inline std::map<Site, NaiveDiscovery> engine_discoveries(const RunSummary& s) {
    std::map<Site, NaiveDiscovery> out;
    for (const auto& e : s.discoveries) out[e.site] = NaiveDiscovery{e.time, e.owner, e.arrivals, e.activated};
    return out;
}

using ExactRational = boost::multiprecision::cpp_rational;

/// Brute-force law of the outcome digest: every particle's every choice is a
/// separate branch (no state merging). Degenerate eta only; tiny cases only.
class BruteForce {
public:
    BruteForce(const SimConfig& config, int horizon, ExactRational p1, ExactRational p2, ExactRational tie_q = {1, 2})
        : config_(config), horizon_(horizon), p_{p1, p2}, tie_q_(tie_q) {}

    std::map<std::string, ExactRational> distribution() {
        State s;
        wake(s, config_.start1, 0, ParticleType::Type1, Arrival::Type1);
        if (config_.start2) wake(s, *config_.start2, 0, ParticleType::Type2, Arrival::Type2);
        out_.clear();
        recurse(s, 1, ExactRational(1));
        return out_;
    }

private:
    struct Found {
        std::int32_t time;
        Arrival arrival;
        ParticleType owner;
    };
    struct State {
        std::vector<std::pair<Site, ParticleType>> particles;
        std::map<Site, Found> found;
    };

    void wake(State& s, const Site& site, std::int32_t t, ParticleType owner, Arrival a) const {
        s.found[site] = Found{t, a, owner};
        for (std::int64_t j = 0; j < config_.eta.count; ++j) s.particles.emplace_back(site, owner);
    }

    static std::string digest(const State& s) {
        std::string out;
        for (const auto& [site, f] : s.found) {
            if (!out.empty()) out += ';';
            out += site.to_string() + "@" + std::to_string(f.time) + ":" + to_string(f.arrival) + ">" +
                   to_string(f.owner);
        }
        return out;
    }

    void recurse(const State& s, std::int32_t t, const ExactRational& prob) {
        if (t > horizon_) {
            out_[digest(s)] += prob;
            return;
        }
        if (config_.laziness == LazinessMode::Collective) {
            // one coin per type
            for (int m1 = 0; m1 < 2; ++m1) {
                for (int m2 = 0; m2 < 2; ++m2) {
                    const ExactRational w = coin(0, m1 == 1) * coin(1, m2 == 1);
                    if (w == 0) continue;
                    std::vector<int> moving;
                    for (const auto& [site, type] : s.particles) {
                        moving.push_back(type == ParticleType::Type1 ? m1 : m2);
                    }
                    moves(s, t, prob * w, moving, 0, s.particles);
                }
            }
            return;
        }
        std::vector<int> moving(s.particles.size(), -1);
        moves(s, t, prob, moving, 0, s.particles);
    }

    ExactRational coin(int type, bool move) const {
        const auto& p = p_[static_cast<std::size_t>(type)];
        return move ? p : ExactRational(1) - p;
    }

    // moving[i]: -1 undecided (independent coins), 0 stays, 1 jumps
    void moves(const State& s, std::int32_t t, const ExactRational& prob, const std::vector<int>& moving, std::size_t i,
               std::vector<std::pair<Site, ParticleType>> placed) {
        if (i == s.particles.size()) {
            discoveries(s, t, prob, placed);
            return;
        }
        const auto [site, type] = s.particles[i];
        const int ti = type_index(type);
        const int dirs = 2 * config_.dim;
        if (moving[i] != 1) {
            const ExactRational stay = moving[i] == 0 ? ExactRational(1) : coin(ti, false);
            if (stay != 0) moves(s, t, prob * stay, moving, i + 1, placed);
        }
        if (moving[i] != 0) {
            const ExactRational go = (moving[i] == 1 ? ExactRational(1) : coin(ti, true)) / dirs;
            if (go == 0) return;
            for (int d = 0; d < dirs; ++d) {
                auto next = placed;
                next[i].first = shifted(site, Direction::from_index(d));
                moves(s, t, prob * go, moving, i + 1, next);
            }
        }
    }

    void discoveries(const State& s, std::int32_t t, const ExactRational& prob,
                     const std::vector<std::pair<Site, ParticleType>>& placed) {
        std::map<Site, std::array<int, 2>> arrivals;
        for (const auto& [site, type] : placed) {
            if (!s.found.contains(site)) ++arrivals[site][static_cast<std::size_t>(type_index(type))];
        }
        State next = s;
        next.particles = placed;
        std::vector<std::pair<Site, std::array<int, 2>>> list(arrivals.begin(), arrivals.end());
        resolve(next, t, prob, list, 0);
    }

    void resolve(State s, std::int32_t t, const ExactRational& prob,
                 const std::vector<std::pair<Site, std::array<int, 2>>>& list, std::size_t i) {
        if (i == list.size()) {
            recurse(s, t + 1, prob);
            return;
        }
        const auto& [site, c] = list[i];
        if (c[0] > 0 && c[1] > 0) {
            ExactRational q1;
            switch (config_.tie_rule.kind) {
            case TieRule::Kind::AlwaysType1: q1 = 1; break;
            case TieRule::Kind::AlwaysType2: q1 = 0; break;
            case TieRule::Kind::BiasedCoin: q1 = tie_q_; break;
            case TieRule::Kind::MajorityCount: q1 = c[0] == c[1] ? ExactRational(1, 2) : ExactRational(c[0] > c[1] ? 1 : 0); break;
            case TieRule::Kind::FairCoin: q1 = ExactRational(1, 2); break;
            }
            for (const auto owner : {ParticleType::Type1, ParticleType::Type2}) {
                const ExactRational w = owner == ParticleType::Type1 ? q1 : ExactRational(1) - q1;
                if (w == 0) continue;
                State n = s;
                wake(n, site, t, owner, Arrival::Both);
                resolve(n, t, prob * w, list, i + 1);
            }
            return;
        }
        const auto owner = c[0] > 0 ? ParticleType::Type1 : ParticleType::Type2;
        wake(s, site, t, owner, c[0] > 0 ? Arrival::Type1 : Arrival::Type2);
        resolve(s, t, prob, list, i + 1);
    }

    SimConfig config_;
    int horizon_;
    std::array<ExactRational, 2> p_;
    ExactRational tie_q_;
    std::map<std::string, ExactRational> out_;
};

/// Simple chi-square statistic of observed counts against equal expectations.
inline double chi_square_uniform(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (const auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi = 0.0;
    for (const auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    return chi;
}

} // namespace frogsim::reference
