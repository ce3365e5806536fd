#include "frogsim/engine.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <stdexcept>

namespace frogsim {

namespace {

std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
}

bool valid_probability(double p) { return p > 0.0 && p <= 1.0; }

} // namespace

TieRule TieRule::biased_coin(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("biased(q) requires q in [0,1]");
    return {Kind::BiasedCoin, q};
}

std::string TieRule::to_string() const {
    switch (kind) {
    case Kind::FairCoin: return "faircoin";
    case Kind::BiasedCoin: {
        char buf[32];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, q);
        return "biased(" + std::string(buf, ptr) + ")";
    }
    case Kind::MajorityCount: return "majority";
    case Kind::AlwaysType1: return "type1";
    case Kind::AlwaysType2: return "type2";
    }
    return {};
}

TieRule parse_tie_rule(std::string_view text) {
    text = trim(text);
    if (text == "faircoin" || text == "fair") return TieRule::fair_coin();
    if (text == "majority") return TieRule::majority_count();
    if (text == "type1") return TieRule::always_type1();
    if (text == "type2") return TieRule::always_type2();
    if (text.starts_with("biased(") && text.ends_with(")")) {
        const auto body = trim(text.substr(7, text.size() - 8));
        double q = 0.0;
        const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), q);
        if (body.empty() || ec != std::errc{} || ptr != body.data() + body.size()) {
            throw std::invalid_argument("malformed biased coin probability '" + std::string(body) + "'");
        }
        return TieRule::biased_coin(q);
    }
    throw std::invalid_argument("unknown tie rule '" + std::string(text) +
                                "' (expected faircoin, biased(q), majority, type1 or type2)");
}

void SimConfig::validate() const {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("d must be in [1, " + std::to_string(kMaxDim) + "]");
    if (!valid_probability(p1)) throw std::invalid_argument("p1 must lie in (0,1]");
    if (!valid_probability(p2)) throw std::invalid_argument("p2 must lie in (0,1]");
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (start1.dim() != dim) throw std::invalid_argument("start1 dimension does not match d");
    if (start2) {
        if (start2->dim() != dim) throw std::invalid_argument("start2 dimension does not match d");
        if (*start2 == start1) throw std::invalid_argument("start1 and start2 must differ");
    }
    for (const auto& s : conditioned_sites) {
        if (s.dim() != dim) throw std::invalid_argument("conditioned site dimension does not match d");
    }
    if (tie_rule.kind == TieRule::Kind::BiasedCoin && !(tie_rule.q >= 0.0 && tie_rule.q <= 1.0)) {
        throw std::invalid_argument("biased tie coin requires q in [0,1]");
    }
}

// ---------------------------------------------------------------- SiteStore

SiteStore::SiteStore(const Site& lo, const Site& hi, std::int64_t dense_budget) : lo_(lo), hi_(hi) {
    std::int64_t volume = 1;
    bool fits = true;
    for (int i = 0; i < lo.dim(); ++i) {
        strides_[static_cast<std::size_t>(i)] = volume;
        const std::int64_t extent = static_cast<std::int64_t>(hi[i]) - lo[i] + 1;
        if (extent <= 0 || volume > dense_budget / extent) {
            fits = false;
            break;
        }
        volume *= extent;
    }
    if (fits && volume <= dense_budget) {
        records_.resize(static_cast<std::size_t>(volume));
        marks_.resize(static_cast<std::size_t>(volume));
        Site s = lo_;
        for (std::size_t c = 0; c < marks_.size(); ++c) {
            for (int i = 0; i < lo_.dim(); ++i) {
                if (s[i] == lo_[i] || s[i] == hi_[i]) {
                    marks_[c] = kEdgeMark;
                    break;
                }
            }
            for (int i = 0; i < lo_.dim(); ++i) {
                if (++s[i] <= hi_[i]) break;
                s[i] = lo_[i];
            }
        }
    }
}

bool SiteStore::in_box(const Site& s) const noexcept {
    if (records_.empty()) return false;
    for (int i = 0; i < s.dim(); ++i) {
        if (s[i] < lo_[i] || s[i] > hi_[i]) return false;
    }
    return true;
}

std::int64_t SiteStore::cell(const Site& s) const noexcept {
    if (!in_box(s)) return -1;
    std::int64_t c = 0;
    for (int i = 0; i < s.dim(); ++i) c += (static_cast<std::int64_t>(s[i]) - lo_[i]) * strides_[static_cast<std::size_t>(i)];
    return c;
}

SiteRecord& SiteStore::at(const Site& s) {
    if (const auto c = cell(s); c >= 0) return records_[static_cast<std::size_t>(c)];
    return overflow_[s];
}

Site SiteStore::site_of(std::int64_t c) const {
    Site s = lo_;
    for (int i = lo_.dim() - 1; i >= 0; --i) {
        const auto stride = strides_[static_cast<std::size_t>(i)];
        s[i] = static_cast<std::int32_t>(lo_[i] + c / stride);
        c %= stride;
    }
    return s;
}

const SiteRecord* SiteStore::find(const Site& s) const {
    if (const auto c = cell(s); c >= 0) return &records_[static_cast<std::size_t>(c)];
    const auto it = overflow_.find(s);
    return it == overflow_.end() ? nullptr : &it->second;
}

// --------------------------------------------------------------- WorldState

bool WorldState::is_discovered(const Site& s) const {
    const auto* rec = sites.find(s);
    return rec != nullptr && rec->discovered();
}

std::int32_t WorldState::discovery_time(const Site& s) const {
    const auto* rec = sites.find(s);
    return rec == nullptr ? -1 : rec->discovery_time;
}

std::array<std::int64_t, 2> WorldState::active_counts() const {
    std::array<std::int64_t, 2> out{};
    if (representation == Representation::Particles) {
        for (const auto& p : actives) ++out[static_cast<std::size_t>(type_index(p.ptype))];
    } else {
        for (const auto& s : occupied) {
            const auto* rec = sites.find(s);
            out[0] += rec->occupancy[0];
            out[1] += rec->occupancy[1];
        }
    }
    return out;
}

std::unordered_map<Site, std::int32_t, SiteHash> RunSummary::discovery_times() const {
    std::unordered_map<Site, std::int32_t, SiteHash> out;
    out.reserve(discoveries.size());
    for (const auto& e : discoveries) out.emplace(e.site, e.time);
    return out;
}

std::string to_string(ParticleType t) { return t == ParticleType::Type1 ? "1" : "2"; }

std::string to_string(Arrival a) {
    switch (a) {
    case Arrival::None: return "none";
    case Arrival::Type1: return "1";
    case Arrival::Type2: return "2";
    case Arrival::Both: return "both";
    }
    return {};
}

// ------------------------------------------------------------------ dynamics

ParticleType resolve_tie(std::int64_t count1, std::int64_t count2, const TieRule& rule, const StreamKey& key) {
    switch (rule.kind) {
    case TieRule::Kind::AlwaysType1: return ParticleType::Type1;
    case TieRule::Kind::AlwaysType2: return ParticleType::Type2;
    case TieRule::Kind::MajorityCount:
        if (count1 != count2) return count1 > count2 ? ParticleType::Type1 : ParticleType::Type2;
        [[fallthrough]];
    case TieRule::Kind::FairCoin: return uniform(key) < 0.5 ? ParticleType::Type1 : ParticleType::Type2;
    case TieRule::Kind::BiasedCoin: return uniform(key) < rule.q ? ParticleType::Type1 : ParticleType::Type2;
    }
    return ParticleType::Type1;
}

namespace {

struct Pending {
    SiteRecord* record;
    Site site;
};

struct Arriving {
    std::size_t particle;
    SiteRecord* record;
};

/// Activates the sleepers of a newly discovered site and logs the event.
void discover(WorldState& w, const SimConfig& config, const RandomnessSource& source, SiteRecord& rec,
              const Site& site, std::int32_t t, Arrival arrivals, ParticleType owner) {
    const auto cell = w.sites.cell(site);
    if (cell >= 0) w.sites.mark(cell);
    rec.discovery_time = t;
    rec.discovered_by = arrivals;
    rec.owner = owner;
    if (!rec.sampled) {
        rec.sleeping = w.eta.at(site);
        rec.sampled = true;
        w.sampled_total += rec.sleeping;
    }
    const std::int64_t n = rec.sleeping;
    rec.sleeping = 0;
    rec.activated = n;
    w.activated[static_cast<std::size_t>(type_index(owner))] += n;
    w.discoveries.push_back(DiscoveryEvent{t, site, arrivals, owner, n});

    if (w.representation == Representation::Occupation) {
        rec.occupancy[static_cast<std::size_t>(type_index(owner))] += n;
        return;
    }
    if (static_cast<std::int64_t>(w.actives.size()) + n > config.max_active_particles) {
        throw std::runtime_error("active particle limit " + std::to_string(config.max_active_particles) +
                                 " exceeded at " + site.to_string() +
                                 "; use the occupation representation for heavy-tailed fields");
    }
    const auto birth_event = static_cast<std::uint32_t>(w.discoveries.size() - 1);
    std::uint32_t far = 0;
    if (cell < 0) {
        far = static_cast<std::uint32_t>(w.far_positions.size());
        if (n > 0) w.far_positions.push_back(site);
    }
    for (std::int64_t j = 0; j < n; ++j) {
        ActiveParticle p;
        p.index = static_cast<std::uint32_t>(j);
        p.key_prefix = hashing::particle_prefix(source.seed(), site, static_cast<std::uint64_t>(j));
        p.delay_state = hashing::absorb(hashing::absorb(p.key_prefix, static_cast<std::uint64_t>(Stream::Delay)), 0);
        p.cell = cell;
        p.far = far;
        p.birth_event = birth_event;
        p.activation_time = t;
        p.ptype = owner;
        w.actives.push_back(p);
    }
}

Arrival arrival_of(const std::array<std::int64_t, 2>& counts) {
    if (counts[0] > 0 && counts[1] > 0) return Arrival::Both;
    return counts[0] > 0 ? Arrival::Type1 : Arrival::Type2;
}

ParticleType owner_of(const SimConfig& config, const RandomnessSource& source, const Site& site, std::int32_t t,
                      const std::array<std::int64_t, 2>& counts) {
    switch (arrival_of(counts)) {
    case Arrival::Type1: return ParticleType::Type1;
    case Arrival::Type2: return ParticleType::Type2;
    default: break;
    }
    return resolve_tie(counts[0], counts[1], config.tie_rule,
                       source.key(Stream::TieBreak, site, 0, static_cast<std::uint64_t>(t)));
}

/// The single per-type coin of collective laziness at time t.
std::array<bool, 2> collective_moves(const SimConfig& config, const RandomnessSource& source, std::int32_t t) {
    const auto origin = Site::origin(config.dim);
    return {source.uniform(Stream::Aux, origin, 1, static_cast<std::uint64_t>(t)) <= config.p1,
            source.uniform(Stream::Aux, origin, 2, static_cast<std::uint64_t>(t)) <= config.p2};
}

void step_particles(WorldState& w, const SimConfig& config, const RandomnessSource& source) {
    const std::int32_t t = w.time + 1;
    const int dim = w.dim;
    const bool collective = config.laziness == LazinessMode::Collective;
    const std::array<double, 2> p{config.p1, config.p2};
    const auto moves = collective ? collective_moves(config, source, t) : std::array<bool, 2>{};

    // delay keys are only drawn by lazy independent walkers
    const std::array<bool, 2> lazy{!collective && p[0] < 1.0, !collective && p[1] < 1.0};

    std::vector<Pending> pending;
    std::vector<Arriving> arriving;

    // Phase A: moves.
    const std::size_t n_active = w.actives.size();
    for (std::size_t i = 0; i < n_active; ++i) {
        auto& a = w.actives[i];
        const auto ti = static_cast<std::size_t>(type_index(a.ptype));
        bool jump;
        if (collective) {
            jump = moves[ti];
        } else if (p[ti] >= 1.0) {
            jump = true;
        } else {
            jump = hashing::to_unit(hashing::absorb(a.delay_state, a.delay_cursor)) <= p[ti];
        }
        if (!jump) {
            ++a.delay_cursor;
            continue;
        }
        const double u = hashing::to_unit(hashing::finish(a.key_prefix, Stream::Jump, a.jumps_made, 0));
        const auto dir = Direction::from_index(hashing::to_direction_index(u, dim));
        Site position;
        if (a.cell >= 0 && !w.sites.on_edge(a.cell)) {
            a.cell += dir.sign * w.sites.stride(dir.axis);
        } else {
            position = a.cell >= 0 ? w.sites.site_of(a.cell) : w.far_positions[a.far];
            position[dir.axis] += dir.sign;
            a.cell = w.sites.cell(position);
            if (a.cell < 0) {
                // outside the dense box the position is tracked explicitly; a fresh
                // slot per move keeps particles born together independent
                a.far = static_cast<std::uint32_t>(w.far_positions.size());
                w.far_positions.push_back(position);
            }
        }
        ++a.jumps_made;
        a.delay_cursor = 1;
        if (lazy[ti]) {
            a.delay_state =
                hashing::absorb(hashing::absorb(a.key_prefix, static_cast<std::uint64_t>(Stream::Delay)), a.jumps_made);
        }

        if (a.cell >= 0 && w.sites.marked(a.cell)) continue;
        SiteRecord& rec = a.cell >= 0 ? w.sites.at_cell(a.cell) : w.sites.at(position);
        if (rec.discovered()) continue;
        if (rec.pending_time != t) {
            rec.pending_time = t;
            rec.arrived = {0, 0};
            pending.push_back(Pending{&rec, a.cell >= 0 ? w.sites.site_of(a.cell) : position});
        }
        ++rec.arrived[ti];
        arriving.push_back(Arriving{i, &rec});
    }

    // Phase B: discoveries.
    for (const auto& [rec, site] : pending) {
        discover(w, config, source, *rec, site, t, arrival_of(rec->arrived), owner_of(config, source, site, t, rec->arrived));
    }
    for (const auto& [i, rec] : arriving) {
        auto& a = w.actives[i];
        ++a.discoveries;
        a.last_discovery = t;
    }
    w.time = t;
}

void step_occupation(WorldState& w, const SimConfig& config, const RandomnessSource& source) {
    const std::int32_t t = w.time + 1;
    const int dim = w.dim;
    const bool collective = config.laziness == LazinessMode::Collective;
    const std::array<double, 2> p{config.p1, config.p2};
    const auto moves = collective ? collective_moves(config, source, t) : std::array<bool, 2>{};

    std::vector<Pending> touched;
    auto deposit = [&](const Site& site, std::size_t ti, std::int64_t n) {
        if (n == 0) return;
        SiteRecord& rec = w.sites.at(site);
        if (rec.touched_time != t) {
            rec.touched_time = t;
            rec.incoming = {0, 0};
            touched.push_back(Pending{&rec, site});
        }
        rec.incoming[ti] += n;
    };

    // Phase A: multinomial split of every occupied site and type into
    // (stay, 2d directions).
    for (const auto& site : w.occupied) {
        const SiteRecord occupied_rec = w.sites.at(site);
        for (std::size_t ti = 0; ti < 2; ++ti) {
            const std::int64_t n = occupied_rec.occupancy[ti];
            if (n == 0) continue;
            KeyedBitGenerator gen(source.key(Stream::Jump, site, ti + 1, static_cast<std::uint64_t>(t)));
            std::int64_t movers;
            if (collective) {
                movers = moves[ti] ? n : 0;
            } else if (p[ti] >= 1.0) {
                movers = n;
            } else {
                movers = std::binomial_distribution<std::int64_t>(n, p[ti])(gen);
            }
            deposit(site, ti, n - movers);
            std::int64_t remaining = movers;
            for (int k = 0; k < 2 * dim && remaining > 0; ++k) {
                std::int64_t share = remaining;
                if (k < 2 * dim - 1) {
                    share = std::binomial_distribution<std::int64_t>(remaining, 1.0 / (2 * dim - k))(gen);
                }
                deposit(shifted(site, Direction::from_index(k)), ti, share);
                remaining -= share;
            }
        }
    }
    for (const auto& site : w.occupied) {
        SiteRecord& rec = w.sites.at(site);
        if (rec.touched_time != t) rec.occupancy = {0, 0};
    }

    // Phase B: commit occupancies, then discover.
    std::vector<Site> next;
    next.reserve(touched.size());
    for (const auto& [rec, site] : touched) {
        rec->occupancy = rec->incoming;
        rec->incoming = {0, 0};
    }
    for (const auto& [rec, site] : touched) {
        if (!rec->discovered()) {
            discover(w, config, source, *rec, site, t, arrival_of(rec->occupancy),
                     owner_of(config, source, site, t, rec->occupancy));
        }
        if (rec->occupancy[0] + rec->occupancy[1] > 0) next.push_back(site);
    }
    w.occupied = std::move(next);
    w.time = t;
}

} // namespace

WorldState init_world(const SimConfig& config, const RandomnessSource& source) {
    config.validate();

    WorldState w;
    w.dim = config.dim;
    w.representation = config.representation;

    std::vector<Site> conditioned = config.conditioned_sites;
    if (config.condition_start_nonempty) {
        conditioned.push_back(config.start1);
        if (config.start2) conditioned.push_back(*config.start2);
    }
    w.eta = EtaField(config.eta, source, conditioned);

    Site lo = config.start1;
    Site hi = config.start1;
    if (config.start2) {
        for (int i = 0; i < config.dim; ++i) {
            lo[i] = std::min(lo[i], (*config.start2)[i]);
            hi[i] = std::max(hi[i], (*config.start2)[i]);
        }
    }
    for (int i = 0; i < config.dim; ++i) {
        const std::int64_t margin = static_cast<std::int64_t>(config.horizon) + 1;
        lo[i] = static_cast<std::int32_t>(std::max<std::int64_t>(std::int64_t{lo[i]} - margin, INT32_MIN / 2));
        hi[i] = static_cast<std::int32_t>(std::min<std::int64_t>(std::int64_t{hi[i]} + margin, INT32_MAX / 2));
    }
    w.sites = SiteStore(lo, hi, config.dense_cell_budget);

    auto start = [&](const Site& site, ParticleType type) {
        SiteRecord& rec = w.sites.at(site);
        const auto before = w.actives.size();
        discover(w, config, source, rec, site, 0, type == ParticleType::Type1 ? Arrival::Type1 : Arrival::Type2, type);
        for (auto i = before; i < w.actives.size(); ++i) {
            w.actives[i].discoveries = 1;
            w.actives[i].last_discovery = 0;
        }
        if (w.representation == Representation::Occupation && rec.activated > 0) w.occupied.push_back(site);
    };
    start(config.start1, ParticleType::Type1);
    if (config.start2) start(*config.start2, ParticleType::Type2);
    return w;
}

void step(WorldState& state, const SimConfig& config, const RandomnessSource& source) {
    if (state.representation == Representation::Particles) {
        step_particles(state, config, source);
    } else {
        step_occupation(state, config, source);
    }
}

RunSummary summarize(const WorldState& state, const SimConfig& config) {
    RunSummary s;
    s.dim = state.dim;
    s.time = state.time;
    s.start1 = config.start1;
    s.start2 = config.start2;
    s.activated = state.activated;
    s.discoveries = state.discoveries;
    s.particle_stats_available = state.representation == Representation::Particles;
    if (s.particle_stats_available) {
        for (const auto& a : state.actives) {
            if (a.activation_time != 0) break; // roster is in activation order
            s.initial_particles.push_back(
                ParticleDiscoveryRecord{state.birth_site(a), a.index, a.ptype, a.discoveries, a.last_discovery});
        }
    }
    return s;
}

RunSummary run(const SimConfig& config, const RandomnessSource& source, int horizon, const StepObserver& observer) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    SimConfig sized = config;
    sized.horizon = horizon;
    auto world = init_world(sized, source);
    if (observer) observer(world);
    for (int t = 0; t < horizon; ++t) {
        step(world, sized, source);
        if (observer) observer(world);
    }
    return summarize(world, sized);
}

std::vector<RunSummary> coupled_run(const SimConfig& config, const std::vector<double>& p_values,
                                    const RandomnessSource& source, int horizon) {
    std::vector<RunSummary> out;
    out.reserve(p_values.size());
    for (const double p : p_values) {
        SimConfig c = config;
        c.p1 = p;
        out.push_back(run(c, source, horizon));
    }
    return out;
}

std::vector<std::string> audit_world(const WorldState& state, const SimConfig& config) {
    std::vector<std::string> problems;
    std::int64_t activated_total = 0;
    std::int64_t sleeping_total = 0;
    for (const auto& e : state.discoveries) {
        const auto* rec = state.sites.find(e.site);
        if (rec == nullptr || !rec->discovered()) {
            problems.push_back("logged discovery " + e.site.to_string() + " has no discovered record");
            continue;
        }
        if (rec->sleeping != 0) problems.push_back("discovered site " + e.site.to_string() + " still has sleepers");
        activated_total += rec->activated;
        sleeping_total += rec->sleeping;
    }
    if (activated_total + sleeping_total != state.sampled_total) {
        problems.push_back("particle conservation violated");
    }
    if (state.activated[0] + state.activated[1] != activated_total) {
        problems.push_back("per-type activation counts disagree with site records");
    }
    auto within_reach = [&](const Site& s) {
        auto d = l1_distance(s, config.start1);
        if (config.start2) d = std::min(d, l1_distance(s, *config.start2));
        return d <= state.time;
    };
    if (state.representation == Representation::Particles) {
        if (static_cast<std::int64_t>(state.actives.size()) != activated_total) {
            problems.push_back("roster size differs from activated particle count");
        }
        for (const auto& a : state.actives) {
            if (a.cell < 0 && a.far >= state.far_positions.size()) {
                problems.push_back("particle outside the arena without a tracked position");
                continue;
            }
            const auto pos = state.position(a);
            if (!within_reach(pos)) problems.push_back("particle beyond the speed limit at " + pos.to_string());
            if (a.cell < 0 && state.sites.cell(pos) >= 0) problems.push_back("arena particle tracked as far at " + pos.to_string());
            if (a.jumps_made > 0 && a.activation_time >= state.time) problems.push_back("particle moved at activation time");
            const auto* rec = state.sites.find(state.birth_site(a));
            if (rec == nullptr || rec->owner != a.ptype) {
                problems.push_back("particle type differs from its birth site owner");
            }
        }
    } else {
        std::array<std::int64_t, 2> occupied{};
        for (const auto& s : state.occupied) {
            const auto* rec = state.sites.find(s);
            if (!within_reach(s)) problems.push_back("occupied site beyond the speed limit " + s.to_string());
            if (!rec->discovered()) problems.push_back("occupied site " + s.to_string() + " is undiscovered");
            occupied[0] += rec->occupancy[0];
            occupied[1] += rec->occupancy[1];
        }
        if (occupied != state.activated) problems.push_back("occupancy does not conserve activated particles");
    }
    for (const auto& e : state.discoveries) {
        if (!within_reach(e.site)) problems.push_back("discovery beyond the speed limit at " + e.site.to_string());
    }
    return problems;
}

} // namespace frogsim
