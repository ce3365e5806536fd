#include "frogsim/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace frogsim::csv {

namespace {

bool needs_quotes(std::string_view field) {
    return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out += field;
        return;
    }
    out += '"';
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

template <typename T>
T parse_int(std::string_view text, std::string_view column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("column '" + std::string(column) + "': malformed integer '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view text, std::string_view column) {
    double value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("column '" + std::string(column) + "': malformed number '" + std::string(text) + "'");
    }
    return value;
}

ParticleType parse_type(std::string_view text) {
    if (text == "1") return ParticleType::Type1;
    if (text == "2") return ParticleType::Type2;
    throw std::invalid_argument("malformed particle type '" + std::string(text) + "'");
}

void expect_header(const Table& t, const std::vector<std::string>& header) {
    if (t.header != header) throw std::invalid_argument("unexpected CSV header");
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string Table::write() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            append_field(out, fields[i]);
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

Table Table::parse(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            field_started = false;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
    if (field_started || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) throw std::invalid_argument("empty CSV document");
    Table t;
    t.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != t.header.size()) {
            throw std::invalid_argument("CSV row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                                        " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(records[i]));
    }
    return t;
}

// ------------------------------------------------------------------ trace

Table trace_table(const std::vector<TraceRow>& rows) {
    Table t;
    t.header = {"time", "site", "type", "n_activated"};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.time), r.site.to_string(), to_string(r.type), std::to_string(r.n_activated)});
    }
    return t;
}

std::vector<TraceRow> trace_rows(const Table& table) {
    expect_header(table, {"time", "site", "type", "n_activated"});
    std::vector<TraceRow> out;
    for (const auto& r : table.rows) {
        out.push_back(TraceRow{parse_int<std::int32_t>(r[0], "time"), parse_site(r[1]), parse_type(r[2]),
                               parse_int<std::int64_t>(r[3], "n_activated")});
    }
    return out;
}

std::vector<TraceRow> trace_rows(const RunSummary& summary) {
    std::vector<TraceRow> out;
    out.reserve(summary.discoveries.size());
    for (const auto& e : summary.discoveries) out.push_back(TraceRow{e.time, e.site, e.owner, e.activated});
    return out;
}

// ---------------------------------------------------------------- passage

Table passage_table(const std::vector<PassageRow>& rows) {
    Table t;
    t.header = {"replica", "x", "y", "p", "time_or_unresolved"};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.replica), r.x.to_string(), r.y.to_string(), format_double(r.p),
                          r.time.resolved ? std::to_string(r.time.time) : "unresolved:" + std::to_string(r.time.time)});
    }
    return t;
}

std::vector<PassageRow> passage_rows(const Table& table) {
    expect_header(table, {"replica", "x", "y", "p", "time_or_unresolved"});
    std::vector<PassageRow> out;
    for (const auto& r : table.rows) {
        PassageRow row;
        row.replica = parse_int<std::int64_t>(r[0], "replica");
        row.x = parse_site(r[1]);
        row.y = parse_site(r[2]);
        row.p = parse_real(r[3], "p");
        const std::string_view cell = r[4];
        if (cell.starts_with("unresolved:")) {
            row.time = PassageTime::unresolved(parse_int<std::int32_t>(cell.substr(11), "time_or_unresolved"));
        } else {
            row.time = PassageTime::resolved_at(parse_int<std::int32_t>(cell, "time_or_unresolved"));
        }
        out.push_back(row);
    }
    return out;
}

// ------------------------------------------------------------------ shape

Table shape_table(int dim, const std::vector<ShapeRow>& rows) {
    Table t;
    t.header = {"n"};
    for (int i = 1; i <= dim; ++i) t.header.push_back("x" + std::to_string(i));
    for (const auto& r : rows) {
        std::vector<std::string> fields{std::to_string(r.n)};
        for (int i = 0; i < dim; ++i) fields.push_back(std::to_string(r.site[i]));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

std::vector<ShapeRow> shape_rows(const Table& table) {
    if (table.header.size() < 2 || table.header.front() != "n") throw std::invalid_argument("unexpected CSV header");
    const int dim = static_cast<int>(table.header.size()) - 1;
    for (int i = 1; i <= dim; ++i) {
        if (table.header[static_cast<std::size_t>(i)] != "x" + std::to_string(i)) {
            throw std::invalid_argument("unexpected CSV header");
        }
    }
    std::vector<ShapeRow> out;
    for (const auto& r : table.rows) {
        ShapeRow row{parse_int<std::int32_t>(r[0], "n"), Site(dim)};
        for (int i = 0; i < dim; ++i) row.site[i] = parse_int<std::int32_t>(r[static_cast<std::size_t>(i) + 1], "x");
        out.push_back(row);
    }
    return out;
}

// --------------------------------------------------------------- outcomes

Table outcome_table(std::int64_t k, const std::vector<OutcomeRow>& rows) {
    Table t;
    t.header = {"seed", "count1", "count2", "leader", "coexist_" + std::to_string(k)};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.seed), std::to_string(r.count1), std::to_string(r.count2),
                          to_string(r.leader), r.coexist ? "1" : "0"});
    }
    return t;
}

std::vector<OutcomeRow> outcome_rows(const Table& table) {
    if (table.header.size() != 5 || table.header[0] != "seed" || table.header[1] != "count1" ||
        table.header[2] != "count2" || table.header[3] != "leader" || !table.header[4].starts_with("coexist_")) {
        throw std::invalid_argument("unexpected CSV header");
    }
    std::vector<OutcomeRow> out;
    for (const auto& r : table.rows) {
        OutcomeRow row;
        row.seed = parse_int<std::uint64_t>(r[0], "seed");
        row.count1 = parse_int<std::int64_t>(r[1], "count1");
        row.count2 = parse_int<std::int64_t>(r[2], "count2");
        if (r[3] == "1") {
            row.leader = Leader::Type1;
        } else if (r[3] == "2") {
            row.leader = Leader::Type2;
        } else if (r[3] == "tie") {
            row.leader = Leader::Tie;
        } else {
            throw std::invalid_argument("malformed leader '" + r[3] + "'");
        }
        if (r[4] != "0" && r[4] != "1") throw std::invalid_argument("malformed coexistence flag '" + r[4] + "'");
        row.coexist = r[4] == "1";
        out.push_back(row);
    }
    return out;
}

// ----------------------------------------------------------------- oracle

Table oracle_table(const std::vector<OracleRow>& rows) {
    Table t;
    t.header = {"digest", "numerator", "denominator"};
    for (const auto& r : rows) t.rows.push_back({r.digest, r.numerator, r.denominator});
    return t;
}

std::vector<OracleRow> oracle_rows(const Table& table) {
    expect_header(table, {"digest", "numerator", "denominator"});
    std::vector<OracleRow> out;
    for (const auto& r : table.rows) out.push_back(OracleRow{r[0], r[1], r[2]});
    return out;
}

} // namespace frogsim::csv
