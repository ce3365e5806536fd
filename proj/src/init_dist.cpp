#include "frogsim/init_dist.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frogsim {

namespace {

constexpr std::uint64_t kMaxRejections = 100'000'000;

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
}

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::int64_t parse_integer(std::string_view text, std::string_view what) {
    text = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("malformed integer '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::int64_t poisson_inverse(double lambda, double u) {
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    std::int64_t k = 0;
    while (u >= cdf) {
        ++k;
        pmf *= lambda / static_cast<double>(k);
        const double next = cdf + pmf;
        if (next == cdf) break; // remaining tail below double resolution
        cdf = next;
    }
    return k;
}

} // namespace

InitDistribution InitDistribution::degenerate(std::int64_t k) {
    if (k < 0) throw std::invalid_argument("degenerate(k) requires k >= 0");
    InitDistribution d;
    d.kind = Kind::Degenerate;
    d.count = k;
    return d;
}

InitDistribution InitDistribution::bernoulli(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bernoulli(q) requires q in [0,1]");
    InitDistribution d;
    d.kind = Kind::Bernoulli;
    d.q = q;
    return d;
}

InitDistribution InitDistribution::poisson(double lambda) {
    if (!(lambda > 0.0 && lambda <= 500.0)) throw std::invalid_argument("poisson(lambda) requires lambda in (0,500]");
    InitDistribution d;
    d.kind = Kind::Poisson;
    d.lambda = lambda;
    return d;
}

InitDistribution InitDistribution::geometric(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("geometric(q) requires q in (0,1]");
    InitDistribution d;
    d.kind = Kind::Geometric;
    d.q = q;
    return d;
}

InitDistribution InitDistribution::heavy_log_tail(double delta, std::int64_t cap) {
    if (!(delta > 0.0)) throw std::invalid_argument("heavylog requires delta > 0");
    if (cap < 2) throw std::invalid_argument("heavylog requires cap >= 2");
    InitDistribution d;
    d.kind = Kind::HeavyLogTail;
    d.delta = delta;
    d.cap = cap;
    return d;
}

double InitDistribution::prob_nonempty() const {
    switch (kind) {
    case Kind::Degenerate: return count >= 1 ? 1.0 : 0.0;
    case Kind::Bernoulli: return q;
    case Kind::Poisson: return -std::expm1(-lambda);
    case Kind::Geometric: return 1.0 - q;
    case Kind::HeavyLogTail: return 1.0;
    }
    return 0.0;
}

std::int64_t InitDistribution::from_uniform(double u) const {
    switch (kind) {
    case Kind::Degenerate: return count;
    case Kind::Bernoulli: return u < q ? 1 : 0;
    case Kind::Poisson: return poisson_inverse(lambda, u);
    case Kind::Geometric: {
        if (q >= 1.0) return 0;
        const double k = std::floor(std::log1p(-u) / std::log1p(-q));
        return k > 9.0e18 ? std::int64_t{9'000'000'000'000'000'000} : static_cast<std::int64_t>(k);
    }
    case Kind::HeavyLogTail: {
        // P(eta >= n) = P(u <= (log n)^-delta)  <=>  eta = floor(exp(u^(-1/delta)))
        if (u <= 0.0) return cap;
        const double log_n = std::exp(-std::log(u) / delta);
        if (log_n >= std::log(static_cast<double>(cap) + 1.0)) return cap;
        const auto n = static_cast<std::int64_t>(std::floor(std::exp(log_n)));
        return n < cap ? n : cap;
    }
    }
    return 0;
}

std::string InitDistribution::to_string() const {
    switch (kind) {
    case Kind::Degenerate: return "degenerate(" + std::to_string(count) + ")";
    case Kind::Bernoulli: return "bernoulli(" + format_double(q) + ")";
    case Kind::Poisson: return "poisson(" + format_double(lambda) + ")";
    case Kind::Geometric: return "geometric(" + format_double(q) + ")";
    case Kind::HeavyLogTail:
        if (cap == kDefaultCap) return "heavylog(delta=" + format_double(delta) + ")";
        return "heavylog(delta=" + format_double(delta) + ", cap=" + std::to_string(cap) + ")";
    }
    return {};
}

InitDistribution parse_distribution(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw std::invalid_argument("distribution must look like name(args), got '" + std::string(text) + "'");
    }
    std::string name(trim(text.substr(0, open)));
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto body = text.substr(open + 1, text.size() - open - 2);

    // split arguments; each may be `value` or `name=value`
    std::vector<std::pair<std::string, std::string_view>> args;
    std::string_view rest = body;
    while (!trim(rest).empty()) {
        const auto comma = rest.find(',');
        auto field = trim(rest.substr(0, comma));
        std::string key;
        if (const auto eq = field.find('='); eq != std::string_view::npos) {
            key = std::string(trim(field.substr(0, eq)));
            field = trim(field.substr(eq + 1));
        }
        args.emplace_back(std::move(key), field);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    auto arg = [&](std::size_t pos, std::string_view key, bool required) -> std::string_view {
        for (const auto& [k, v] : args) {
            if (k == key) return v;
        }
        if (pos < args.size() && args[pos].first.empty()) return args[pos].second;
        if (required) throw std::invalid_argument(name + "(...) is missing argument '" + std::string(key) + "'");
        return {};
    };
    auto expect_at_most = [&](std::size_t n) {
        if (args.size() > n) throw std::invalid_argument(name + "(...) takes at most " + std::to_string(n) + " arguments");
    };

    if (name == "degenerate") {
        expect_at_most(1);
        return InitDistribution::degenerate(parse_integer(arg(0, "k", true), "degenerate k"));
    }
    if (name == "bernoulli") {
        expect_at_most(1);
        return InitDistribution::bernoulli(parse_number(arg(0, "q", true), "bernoulli q"));
    }
    if (name == "poisson") {
        expect_at_most(1);
        return InitDistribution::poisson(parse_number(arg(0, "lambda", true), "poisson lambda"));
    }
    if (name == "geometric") {
        expect_at_most(1);
        return InitDistribution::geometric(parse_number(arg(0, "q", true), "geometric q"));
    }
    if (name == "heavylog") {
        expect_at_most(2);
        const double delta = parse_number(arg(0, "delta", true), "heavylog delta");
        const auto cap_text = arg(1, "cap", false);
        const auto cap = cap_text.empty() ? InitDistribution::kDefaultCap : parse_integer(cap_text, "heavylog cap");
        return InitDistribution::heavy_log_tail(delta, cap);
    }
    throw std::invalid_argument("unknown distribution '" + name +
                                "' (expected degenerate, bernoulli, poisson, geometric or heavylog)");
}

std::int64_t sample_eta(const InitDistribution& dist, const Site& site, const RandomnessSource& source) {
    if (dist.kind == InitDistribution::Kind::Degenerate) return dist.count;
    return dist.from_uniform(source.uniform(Stream::EtaField, site));
}

namespace {

std::int64_t conditioned_eta(const InitDistribution& dist, const Site& site, const RandomnessSource& source) {
    if (dist.prob_nonempty() <= 0.0) {
        throw std::domain_error("cannot condition on a non-empty site: P(eta >= 1) = 0 under " + dist.to_string());
    }
    for (std::uint64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
        const auto eta = dist.from_uniform(source.uniform(Stream::EtaField, site, 0, 0, attempt));
        if (eta >= 1) return eta;
    }
    throw std::runtime_error("rejection sampling for eta >= 1 did not terminate at " + site.to_string());
}

} // namespace

std::vector<std::int64_t> condition_nonempty(const InitDistribution& dist, std::span<const Site> sites,
                                             const RandomnessSource& source) {
    std::vector<std::int64_t> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(conditioned_eta(dist, s, source));
    return out;
}

EtaField::EtaField(InitDistribution dist, RandomnessSource source, std::span<const Site> conditioned)
    : dist_(dist), source_(source), conditioned_(conditioned.begin(), conditioned.end()) {
    if (!conditioned_.empty() && dist_.prob_nonempty() <= 0.0) {
        throw std::domain_error("cannot condition on a non-empty site: P(eta >= 1) = 0 under " + dist_.to_string());
    }
}

std::int64_t EtaField::at(const Site& site) const {
    if (conditioned_.contains(site)) return conditioned_eta(dist_, site, source_);
    return sample_eta(dist_, site, source_);
}

} // namespace frogsim
