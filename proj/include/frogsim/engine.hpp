#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frogsim/init_dist.hpp"
#include "frogsim/lattice.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

enum class ParticleType : std::uint8_t { Type1 = 0, Type2 = 1 };

constexpr int type_index(ParticleType t) noexcept { return static_cast<int>(t); }
constexpr int type_number(ParticleType t) noexcept { return static_cast<int>(t) + 1; }

/// Which types reached a site on the step that discovered it.
enum class Arrival : std::uint8_t { None, Type1, Type2, Both };

struct TieRule {
    enum class Kind { FairCoin, BiasedCoin, MajorityCount, AlwaysType1, AlwaysType2 };

    Kind kind = Kind::FairCoin;
    double q = 0.5; // P(Type1) for BiasedCoin

    static TieRule fair_coin() { return {Kind::FairCoin, 0.5}; }
    static TieRule biased_coin(double q);
    static TieRule majority_count() { return {Kind::MajorityCount, 0.5}; }
    static TieRule always_type1() { return {Kind::AlwaysType1, 0.5}; }
    static TieRule always_type2() { return {Kind::AlwaysType2, 0.5}; }

    std::string to_string() const;
    friend bool operator==(const TieRule&, const TieRule&) = default;
};

/// Parses `faircoin`, `biased(0.7)`, `majority`, `type1`, `type2`.
TieRule parse_tie_rule(std::string_view text);

enum class LazinessMode {
    Independent, ///< every particle flips its own delay coin
    Collective   ///< one coin per type and time step moves all particles of that type
};

enum class Representation {
    Particles, ///< every particle carries its own trajectory; shares S and L across coupled runs
    Occupation ///< per-site particle counts split multinomially; same law, no per-particle identity
};

struct SimConfig {
    int dim = 2;
    InitDistribution eta = InitDistribution::degenerate(1);
    double p1 = 1.0;
    double p2 = 1.0;
    Site start1 = Site::origin(2);
    std::optional<Site> start2;
    TieRule tie_rule;
    std::uint64_t seed = 0;
    int horizon = 100;
    LazinessMode laziness = LazinessMode::Independent;
    bool condition_start_nonempty = false;
    Representation representation = Representation::Particles;

    /// Further sites on which the realization is conditioned to be non-empty.
    std::vector<Site> conditioned_sites;
    /// Largest arena (in cells) stored densely; activity outside spills to a hash map.
    std::int64_t dense_cell_budget = std::int64_t{1} << 21;
    /// Particle-mode runs abort with a runtime error above this many active particles.
    std::int64_t max_active_particles = 50'000'000;

    bool two_type() const noexcept { return start2.has_value(); }
    double jump_probability(ParticleType t) const noexcept { return t == ParticleType::Type1 ? p1 : p2; }

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

/// Hot per-particle state, kept small because every step streams the whole
/// roster. The position lives in the arena cell when the particle is inside
/// the dense box and in WorldState::far_positions otherwise.
struct ActiveParticle {
    std::uint64_t key_prefix = 0;  // hashing::particle_prefix(seed, birth_site, index)
    std::uint64_t delay_state = 0; // key prefix of L_{jumps_made, .}; stale when the walk is not lazy
    std::int64_t cell = -1;        // dense arena cell of the position, -1 if outside
    std::uint32_t far = 0;         // slot in far_positions while cell < 0
    std::uint32_t birth_event = 0; // index of the birth site's discovery event
    std::uint32_t index = 0;
    std::uint32_t jumps_made = 0;
    std::uint32_t delay_cursor = 1; // k of the next delay draw L_{n,k}; k >= 1
    std::int32_t activation_time = 0;
    std::int32_t discoveries = 0;
    std::int32_t last_discovery = -1;
    ParticleType ptype = ParticleType::Type1;
};

struct SiteRecord {
    std::int64_t sleeping = 0;
    std::int64_t activated = 0;
    std::array<std::int64_t, 2> arrived{};   // arrivals by type on the pending step
    std::array<std::int64_t, 2> occupancy{}; // Occupation representation only
    std::array<std::int64_t, 2> incoming{};  // Occupation representation only
    std::int32_t discovery_time = -1;
    std::int32_t pending_time = -1;
    std::int32_t touched_time = -1;
    Arrival discovered_by = Arrival::None;
    ParticleType owner = ParticleType::Type1;
    bool sampled = false;

    bool discovered() const noexcept { return discovery_time >= 0; }
};

/// Site records in a dense box arena with a hash-map overflow. Both paths
/// hold identical records, so the storage choice never changes a trace.
class SiteStore {
public:
    SiteStore() = default;
    SiteStore(const Site& lo, const Site& hi, std::int64_t dense_budget);

    /// Dense cell of `s`, or -1 when outside the arena.
    std::int64_t cell(const Site& s) const noexcept;
    std::int64_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }
    bool in_box(const Site& s) const noexcept;
    bool dense() const noexcept { return !records_.empty(); }

    SiteRecord& at(const Site& s);
    SiteRecord& at_cell(std::int64_t c) noexcept { return records_[static_cast<std::size_t>(c)]; }
    /// Inverse of cell().
    Site site_of(std::int64_t c) const;
    /// Record of `s` if it has ever been stored (dense cells always are).
    const SiteRecord* find(const Site& s) const;

    /// Compact discovered marks of dense cells; the hot loop reads these
    /// instead of the full records.
    bool marked(std::int64_t c) const noexcept { return (marks_[static_cast<std::size_t>(c)] & kDiscoveredMark) != 0; }
    void mark(std::int64_t c) noexcept { marks_[static_cast<std::size_t>(c)] |= kDiscoveredMark; }
    /// Cell on the surface of the box: a unit move may leave the arena.
    bool on_edge(std::int64_t c) const noexcept { return (marks_[static_cast<std::size_t>(c)] & kEdgeMark) != 0; }

private:
    Site lo_;
    Site hi_;
    std::array<std::int64_t, kMaxDim> strides_{};
    std::vector<SiteRecord> records_;
    std::vector<std::uint8_t> marks_;
    static constexpr std::uint8_t kDiscoveredMark = 1;
    static constexpr std::uint8_t kEdgeMark = 2;
    std::unordered_map<Site, SiteRecord, SiteHash> overflow_;
};

struct DiscoveryEvent {
    std::int32_t time = 0;
    Site site;
    Arrival arrivals = Arrival::None;
    ParticleType owner = ParticleType::Type1;
    std::int64_t activated = 0;
};

struct WorldState {
    std::int32_t time = 0;
    int dim = 2;
    SiteStore sites;
    EtaField eta{InitDistribution::degenerate(0), RandomnessSource{}};
    std::vector<ActiveParticle> actives;
    std::vector<Site> far_positions;
    std::array<std::int64_t, 2> activated{};
    std::int64_t sampled_total = 0;
    std::vector<DiscoveryEvent> discoveries;
    Representation representation = Representation::Particles;

    // Occupation representation: currently occupied sites.
    std::vector<Site> occupied;

    std::int64_t discovered_count() const noexcept { return static_cast<std::int64_t>(discoveries.size()); }
    bool is_discovered(const Site& s) const;
    /// Discovery time of `s`, or -1.
    std::int32_t discovery_time(const Site& s) const;
    Site position(const ActiveParticle& a) const { return a.cell >= 0 ? sites.site_of(a.cell) : far_positions[a.far]; }
    const Site& birth_site(const ActiveParticle& a) const { return discoveries[a.birth_event].site; }
    /// Total active particles per type (both representations).
    std::array<std::int64_t, 2> active_counts() const;
};

struct ParticleDiscoveryRecord {
    Site birth_site;
    std::uint32_t index = 0;
    ParticleType ptype = ParticleType::Type1;
    std::int32_t discoveries = 0;
    std::int32_t last_discovery = -1;
};

/// Digest of a finished run.
struct RunSummary {
    int dim = 2;
    std::int32_t time = 0;
    Site start1;
    std::optional<Site> start2;
    std::array<std::int64_t, 2> activated{};
    std::vector<DiscoveryEvent> discoveries; // event order, times non-decreasing
    std::vector<ParticleDiscoveryRecord> initial_particles;
    bool particle_stats_available = false;

    /// Map site -> discovery time.
    std::unordered_map<Site, std::int32_t, SiteHash> discovery_times() const;
};

using StepObserver = std::function<void(const WorldState&)>;

/// Time-0 state: start-site particles active with their types, start sites
/// discovered by their own type. Throws std::invalid_argument on a bad config.
WorldState init_world(const SimConfig& config, const RandomnessSource& source);

/// One synchronous step: all moves, then all discoveries.
void step(WorldState& state, const SimConfig& config, const RandomnessSource& source);

RunSummary summarize(const WorldState& state, const SimConfig& config);

RunSummary run(const SimConfig& config, const RandomnessSource& source, int horizon, const StepObserver& observer = {});

/// Type assigned to a site reached by both types in the same step.
ParticleType resolve_tie(std::int64_t count1, std::int64_t count2, const TieRule& rule, const StreamKey& key);

/// Runs `config` once per value of p1 on the same realization; one-type runs
/// have a single jump probability p1. Summaries in input order.
std::vector<RunSummary> coupled_run(const SimConfig& config, const std::vector<double>& p_values,
                                    const RandomnessSource& source, int horizon);

/// Consistency checks of a world; empty when all invariants hold.
std::vector<std::string> audit_world(const WorldState& state, const SimConfig& config);

std::string to_string(ParticleType t);
std::string to_string(Arrival a);

} // namespace frogsim
