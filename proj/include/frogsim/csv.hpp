#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frogsim/engine.hpp"
#include "frogsim/observables.hpp"

namespace frogsim::csv {

/// A header plus string cells; fields containing ',', '"' or newlines are quoted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string write() const;
    /// Throws std::invalid_argument on ragged rows or unterminated quotes.
    static Table parse(std::string_view text);
};

// Discovery trace: time,site,type,n_activated
struct TraceRow {
    std::int32_t time = 0;
    Site site;
    ParticleType type = ParticleType::Type1;
    std::int64_t n_activated = 0;
    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};
Table trace_table(const std::vector<TraceRow>& rows);
std::vector<TraceRow> trace_rows(const Table& table);
std::vector<TraceRow> trace_rows(const RunSummary& summary);

// Passage table: replica,x,y,p,time_or_unresolved
struct PassageRow {
    std::int64_t replica = 0;
    Site x;
    Site y;
    double p = 1.0;
    PassageTime time;
    friend bool operator==(const PassageRow&, const PassageRow&) = default;
};
Table passage_table(const std::vector<PassageRow>& rows);
std::vector<PassageRow> passage_rows(const Table& table);

// Shape: n,x1,...,xd (one row per cell of each checkpoint)
struct ShapeRow {
    std::int32_t n = 0;
    Site site;
    friend bool operator==(const ShapeRow&, const ShapeRow&) = default;
};
Table shape_table(int dim, const std::vector<ShapeRow>& rows);
std::vector<ShapeRow> shape_rows(const Table& table);

// Outcomes: seed,count1,count2,leader,coexist_<K>
struct OutcomeRow {
    std::uint64_t seed = 0;
    std::int64_t count1 = 0;
    std::int64_t count2 = 0;
    Leader leader = Leader::Tie;
    bool coexist = false;
    friend bool operator==(const OutcomeRow&, const OutcomeRow&) = default;
};
Table outcome_table(std::int64_t k, const std::vector<OutcomeRow>& rows);
std::vector<OutcomeRow> outcome_rows(const Table& table);

// Oracle dump: digest,numerator,denominator
struct OracleRow {
    std::string digest;
    std::string numerator;
    std::string denominator;
    friend bool operator==(const OracleRow&, const OracleRow&) = default;
};
Table oracle_table(const std::vector<OracleRow>& rows);
std::vector<OracleRow> oracle_rows(const Table& table);

std::string format_double(double v);

} // namespace frogsim::csv
