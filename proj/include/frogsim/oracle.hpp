#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "frogsim/engine.hpp"

namespace frogsim {

using Rational = boost::multiprecision::cpp_rational;

/// Exact law of the outcome digest at a fixed horizon.
struct OutcomeDistribution {
    std::map<std::string, Rational> atoms;
    std::uint64_t branches = 0; // choice sequences explored

    Rational total() const;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::uint64_t branches, std::uint64_t budget);
    std::uint64_t branches() const noexcept { return branches_; }

private:
    std::uint64_t branches_;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

/// Canonical digest of a run: discovered sites in lexicographic order with
/// their discovery time, arriving types and assigned type.
std::string outcome_digest(const RunSummary& summary);

/// Exact rational value of the shortest decimal form of `v` (0.3 -> 3/10).
Rational to_rational(double v);

/// Exact distribution by enumerating every lazy coin, jump direction and tie
/// coin. Requires a Degenerate initial law. Throws BudgetExceeded when more
/// than `budget` branches would be needed.
OutcomeDistribution enumerate_exact(const SimConfig& config, int horizon,
                                    std::uint64_t budget = kDefaultOracleBudget);

/// 1/2 * sum |empirical - exact| over the union of supports.
double total_variation(const std::map<std::string, double>& empirical, const OutcomeDistribution& exact);

/// Engine digest frequencies over `samples` replica seeds of config.seed.
std::map<std::string, double> empirical_distribution(const SimConfig& config, int horizon, std::int64_t samples);

struct OracleCheckReport {
    double total_variation = 0.0;
    double threshold = 0.0;
    std::int64_t samples = 0;
    std::size_t exact_atoms = 0;
    std::size_t empirical_atoms = 0;
    std::uint64_t branches = 0;
    bool passed = false;
};

OracleCheckReport oracle_check(const SimConfig& config, int horizon, std::int64_t samples, double threshold,
                               std::uint64_t budget = kDefaultOracleBudget);

} // namespace frogsim
