#include "frogsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frogsim {

std::vector<PassageTime> passage_times(const SimConfig& config, const RandomnessSource& source, const Site& x,
                                       std::span<const Site> targets, double p, int horizon) {
    SimConfig c = config;
    c.dim = x.dim();
    c.start1 = x;
    c.start2.reset();
    c.p1 = p;
    c.p2 = p;
    c.horizon = horizon;
    c.laziness = LazinessMode::Independent;

    std::vector<PassageTime> out(targets.size(), PassageTime::unresolved(horizon));
    std::vector<bool> done(targets.size(), false);
    std::size_t remaining = targets.size();

    auto world = init_world(c, source);
    auto harvest = [&] {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (done[i]) continue;
            const auto t = world.discovery_time(targets[i]);
            if (t >= 0) {
                out[i] = PassageTime::resolved_at(t);
                done[i] = true;
                --remaining;
            }
        }
    };
    harvest();
    const auto idle = [&] {
        const auto counts = world.active_counts();
        return counts[0] + counts[1] == 0;
    };
    while (remaining > 0 && world.time < horizon && !idle()) {
        step(world, c, source);
        harvest();
    }
    return out;
}

PassageTime passage_time(const SimConfig& config, const RandomnessSource& source, const Site& x, const Site& y,
                         double p, int horizon) {
    const Site targets[] = {y};
    return passage_times(config, source, x, targets, p, horizon).front();
}

SubadditivityCheck check_subadditivity(const SimConfig& config, const RandomnessSource& source, const Site& x,
                                       const Site& w, const Site& y, double p, int horizon) {
    SimConfig c = config;
    if (c.condition_start_nonempty) {
        c.conditioned_sites.push_back(x);
        c.conditioned_sites.push_back(w);
    }
    SubadditivityCheck r;
    r.xy = passage_time(c, source, x, y, p, horizon);
    r.xw = passage_time(c, source, x, w, p, horizon);
    r.wy = passage_time(c, source, w, y, p, horizon);
    if (!r.xy.resolved || !r.xw.resolved || !r.wy.resolved) {
        r.verdict = Subadditivity::Inapplicable;
    } else {
        r.verdict = r.xy.time <= r.xw.time + r.wy.time ? Subadditivity::Holds : Subadditivity::Violated;
    }
    return r;
}

MeanStat mean_stat(std::span<const double> values) {
    MeanStat s;
    s.count = static_cast<std::int64_t>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - s.mean) * (v - s.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        s.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return s;
}

std::vector<MuEstimate> estimate_mu(const SimConfig& config, std::span<const std::int64_t> n_values, int replicas,
                                    const Site& direction) {
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    SimConfig c = config;
    c.start2.reset();
    c.condition_start_nonempty = true;
    const auto origin = Site::origin(c.dim);
    std::vector<Site> targets;
    for (const auto n : n_values) {
        if (n <= 0) throw std::invalid_argument("mu estimation needs n >= 1");
        Site t = origin;
        for (int i = 0; i < c.dim; ++i) t[i] = static_cast<std::int32_t>(direction[i] * n);
        targets.push_back(t);
    }

    std::vector<std::vector<double>> ratios(n_values.size());
    std::vector<MuEstimate> out(n_values.size());
    for (int r = 0; r < replicas; ++r) {
        const RandomnessSource source(replica_seed(c.seed, static_cast<std::uint64_t>(r)));
        const auto times = passage_times(c, source, origin, targets, c.p1, c.horizon);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i].resolved) {
                ratios[i].push_back(static_cast<double>(times[i].time) / static_cast<double>(n_values[i]));
            } else {
                ++out[i].unresolved;
            }
        }
    }
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        out[i].n = n_values[i];
        out[i].ratio = mean_stat(ratios[i]);
    }
    return out;
}

// ------------------------------------------------------------------- shapes

ShapeEstimate::ShapeEstimate(std::int32_t n, Site center, std::vector<Site> cells)
    : n_(n), center_(center), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    members_.reserve(cells_.size());
    for (const auto& c : cells_) {
        members_.insert(c);
        const auto norm = l1_distance(c, center_);
        outer_radius_ = std::max(outer_radius_, norm);
        if (static_cast<std::int64_t>(cells_by_norm_.size()) <= norm) cells_by_norm_.resize(static_cast<std::size_t>(norm) + 1, 0);
        ++cells_by_norm_[static_cast<std::size_t>(norm)];
    }
    if (!members_.contains(center_)) {
        inner_radius_ = -1;
        return;
    }
    // The closest missing site is adjacent to a cell one step closer to the center.
    std::int64_t closest_missing = outer_radius_ + 1;
    for (const auto& c : cells_) {
        for (int i = 0; i < 2 * c.dim(); ++i) {
            const auto nb = shifted(c, Direction::from_index(i));
            if (!members_.contains(nb)) closest_missing = std::min(closest_missing, l1_distance(nb, center_));
        }
    }
    inner_radius_ = closest_missing - 1;
}

double ShapeEstimate::coverage(double r) const {
    if (r < 0) return 0.0;
    const auto radius = static_cast<std::int64_t>(std::floor(r + 1e-9));
    std::int64_t inside = 0;
    for (std::int64_t k = 0; k <= radius && k < static_cast<std::int64_t>(cells_by_norm_.size()); ++k) {
        inside += cells_by_norm_[static_cast<std::size_t>(k)];
    }
    return static_cast<double>(inside) / static_cast<double>(diamond_point_count(center_.dim(), radius));
}

ShapeEstimate shape_estimate(const RunSummary& summary, std::int32_t n) {
    if (n < 0 || n > summary.time) throw std::invalid_argument("shape checkpoint must lie in [0, run time]");
    std::vector<Site> cells;
    for (const auto& e : summary.discoveries) {
        if (e.time > n) break;
        cells.push_back(e.site);
    }
    return ShapeEstimate(n, summary.start1, std::move(cells));
}

double diamond_coverage(const ShapeEstimate& shape, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0,1]");
    return shape.coverage(rho * shape.n());
}

// ----------------------------------------------------------------- outcomes

std::string to_string(Leader leader) {
    switch (leader) {
    case Leader::Type1: return "1";
    case Leader::Type2: return "2";
    case Leader::Tie: return "tie";
    }
    return {};
}

OutcomeSummary outcome_summary(const RunSummary& summary, std::int64_t k) {
    OutcomeSummary o;
    o.count1 = summary.activated[0];
    o.count2 = summary.activated[1];
    for (const auto& e : summary.discoveries) {
        if (e.activated == 0) continue;
        (e.owner == ParticleType::Type1 ? o.last_activation1 : o.last_activation2) = e.time;
    }
    o.k = k;
    o.coexist = o.coexist_at(k);
    o.leader = o.count1 > o.count2 ? Leader::Type1 : (o.count2 > o.count1 ? Leader::Type2 : Leader::Tie);
    return o;
}

std::int32_t ParticleDiscoveryStats::last_discovery_from(const Site& site) const {
    std::int32_t last = -1;
    for (const auto& p : particles) {
        if (p.birth_site == site) last = std::max(last, p.last_discovery);
    }
    return last;
}

ParticleDiscoveryStats particle_discovery_stats(const RunSummary& summary) {
    if (!summary.particle_stats_available) {
        throw std::logic_error("per-particle discovery statistics need the particle representation");
    }
    return ParticleDiscoveryStats{summary.initial_particles};
}

} // namespace frogsim
