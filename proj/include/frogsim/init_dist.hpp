#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "frogsim/lattice.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

/// Law of the initial particle count per site; sites are i.i.d.
struct InitDistribution {
    enum class Kind { Degenerate, Bernoulli, Poisson, Geometric, HeavyLogTail };

    static constexpr std::int64_t kDefaultCap = 2147483647; // 2^31 - 1

    Kind kind = Kind::Degenerate;
    std::int64_t count = 1;         // Degenerate(k)
    double q = 0.5;                 // Bernoulli(q), Geometric(q)
    double lambda = 1.0;            // Poisson(lambda)
    double delta = 1.0;             // HeavyLogTail(delta, cap)
    std::int64_t cap = kDefaultCap; // HeavyLogTail(delta, cap)

    static InitDistribution degenerate(std::int64_t k);
    static InitDistribution bernoulli(double q);
    static InitDistribution poisson(double lambda);
    /// Failures before the first success: P(eta = k) = (1-q)^k q.
    static InitDistribution geometric(double q);
    /// P(eta >= n) = min(1, (log n)^-delta) for 2 <= n <= cap.
    static InitDistribution heavy_log_tail(double delta, std::int64_t cap = kDefaultCap);

    /// P(eta >= 1).
    double prob_nonempty() const;

    /// Inverse transform of a single uniform on [0,1).
    std::int64_t from_uniform(double u) const;

    /// Canonical text form, parseable by parse_distribution.
    std::string to_string() const;

    friend bool operator==(const InitDistribution&, const InitDistribution&) = default;
};

/// Parses `degenerate(1)`, `bernoulli(0.5)`, `poisson(2.0)`, `geometric(0.3)`,
/// `heavylog(delta=1.0)` or `heavylog(delta=1.0, cap=1000)`.
/// Throws std::invalid_argument with a readable message.
InitDistribution parse_distribution(std::string_view text);

/// Unconditioned eta(site) for the realization.
std::int64_t sample_eta(const InitDistribution& dist, const Site& site, const RandomnessSource& source);

/// eta conditioned on eta >= 1 at each listed site, by rejection over successive
/// counter2 values of the site's EtaField key. The first accepted draw is the
/// unconditioned value whenever that one is already non-empty.
/// Throws std::domain_error when P(eta >= 1) = 0.
std::vector<std::int64_t> condition_nonempty(const InitDistribution& dist, std::span<const Site> sites,
                                             const RandomnessSource& source);

/// The initial field of one realization, optionally conditioned to be
/// non-empty on a finite set of sites.
class EtaField {
public:
    EtaField(InitDistribution dist, RandomnessSource source, std::span<const Site> conditioned = {});

    std::int64_t at(const Site& site) const;

    const InitDistribution& distribution() const noexcept { return dist_; }

private:
    InitDistribution dist_;
    RandomnessSource source_;
    std::unordered_set<Site, SiteHash> conditioned_;
};

} // namespace frogsim
