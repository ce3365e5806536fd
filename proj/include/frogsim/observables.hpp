#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "frogsim/engine.hpp"

namespace frogsim {

/// Discovery time of a target, or the horizon it was not discovered by.
struct PassageTime {
    bool resolved = false;
    std::int32_t time = 0; // discovery time if resolved, else the horizon

    static PassageTime resolved_at(std::int32_t t) { return {true, t}; }
    static PassageTime unresolved(std::int32_t horizon) { return {false, horizon}; }

    friend bool operator==(const PassageTime&, const PassageTime&) = default;
};

/// T(x, y): discovery time of y in the one-type process started from the
/// particles at x with jump probability p, on the realization of `source`.
/// Only the distribution, conditioning and storage settings of `config` are used.
PassageTime passage_time(const SimConfig& config, const RandomnessSource& source, const Site& x, const Site& y,
                         double p, int horizon);

/// T(x, y) for several targets from a single run.
std::vector<PassageTime> passage_times(const SimConfig& config, const RandomnessSource& source, const Site& x,
                                       std::span<const Site> targets, double p, int horizon);

enum class Subadditivity { Holds, Violated, Inapplicable };

struct SubadditivityCheck {
    Subadditivity verdict = Subadditivity::Inapplicable;
    PassageTime xy;
    PassageTime xw;
    PassageTime wy;
};

/// T(x,y) <= T(x,w) + T(w,y) on one realization. With conditioning enabled
/// the realization is conditioned non-empty at both x and w for all three runs.
SubadditivityCheck check_subadditivity(const SimConfig& config, const RandomnessSource& source, const Site& x,
                                       const Site& w, const Site& y, double p, int horizon);

struct MeanStat {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t count = 0;
};

MeanStat mean_stat(std::span<const double> values);

struct MuEstimate {
    std::int64_t n = 0;
    MeanStat ratio;            // T(0, n*direction) / n over resolved replicas
    std::int64_t unresolved = 0;
};

/// Mean of T(0, n*direction)/n over `replicas` realizations with seeds
/// replica_seed(config.seed, r), conditioned on eta(0) >= 1.
std::vector<MuEstimate> estimate_mu(const SimConfig& config, std::span<const std::int64_t> n_values, int replicas,
                                    const Site& direction);

/// The discovered set at time n around the first start site.
class ShapeEstimate {
public:
    ShapeEstimate(std::int32_t n, Site center, std::vector<Site> cells);

    std::int32_t n() const noexcept { return n_; }
    double scale() const noexcept { return n_ > 0 ? 1.0 / n_ : 0.0; }
    const Site& center() const noexcept { return center_; }
    /// Sorted lexicographically.
    const std::vector<Site>& cells() const noexcept { return cells_; }
    bool contains(const Site& s) const { return members_.contains(s); }

    /// Largest r with D_r(center) ∩ Z^d inside the cells; -1 if the center is missing.
    std::int64_t inner_radius() const noexcept { return inner_radius_; }
    /// Largest L1 distance from the center among the cells.
    std::int64_t outer_radius() const noexcept { return outer_radius_; }

    /// Fraction of the lattice points of D_r(center) that are cells.
    double coverage(double r) const;

private:
    std::int32_t n_;
    Site center_;
    std::vector<Site> cells_;
    std::unordered_set<Site, SiteHash> members_;
    std::vector<std::int64_t> cells_by_norm_;
    std::int64_t inner_radius_ = -1;
    std::int64_t outer_radius_ = 0;
};

ShapeEstimate shape_estimate(const RunSummary& summary, std::int32_t n);

/// Coverage of D_{rho*n}; requires 0 < rho <= 1.
double diamond_coverage(const ShapeEstimate& shape, double rho);

enum class Leader { Type1, Type2, Tie };

std::string to_string(Leader leader);

struct OutcomeSummary {
    std::int64_t count1 = 0;
    std::int64_t count2 = 0;
    std::int32_t last_activation1 = -1;
    std::int32_t last_activation2 = -1;
    std::int64_t k = 0;
    bool coexist = false; // coexist_at(k)
    Leader leader = Leader::Tie;

    bool coexist_at(std::int64_t threshold) const noexcept { return count1 >= threshold && count2 >= threshold; }
};

OutcomeSummary outcome_summary(const RunSummary& summary, std::int64_t k);

struct ParticleDiscoveryStats {
    std::vector<ParticleDiscoveryRecord> particles;

    /// Latest discovery among the particles born at `site`, or -1.
    std::int32_t last_discovery_from(const Site& site) const;
};

/// Per initially-active particle discovery counts. Throws std::logic_error for
/// runs without per-particle identity (occupation representation).
ParticleDiscoveryStats particle_discovery_stats(const RunSummary& summary);

} // namespace frogsim
