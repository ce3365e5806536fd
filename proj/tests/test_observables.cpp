#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "frogsim/observables.hpp"
#include "support.hpp"

using namespace frogsim;
using frogsim::reference::naive_run;

namespace {

SimConfig base(int dim, double p) {
    SimConfig c;
    c.dim = dim;
    c.start1 = Site::origin(dim);
    c.p1 = p;
    c.p2 = p;
    return c;
}

std::vector<Site> diamond_sites(int dim, int r, const Site& center) {
    std::vector<Site> out;
    Site s(dim);
    for (int i = 0; i < dim; ++i) s[i] = -r;
    while (true) {
        if (l1_norm(s) <= r) out.push_back(center + s);
        int i = 0;
        for (; i < dim; ++i) {
            if (++s[i] <= r) break;
            s[i] = -r;
        }
        if (i == dim) break;
    }
    return out;
}

// largest r with every point of D_r(center) present, by direct enumeration
std::int64_t brute_inner(const std::set<Site>& cells, const Site& center) {
    if (!cells.contains(center)) return -1;
    std::int64_t r = 0;
    while (true) {
        for (const auto& s : diamond_sites(center.dim(), static_cast<int>(r + 1), center)) {
            if (!cells.contains(s)) return r;
        }
        ++r;
    }
}

RunSummary summary_with(std::vector<DiscoveryEvent> events) {
    RunSummary s;
    s.dim = 2;
    s.start1 = Site{0, 0};
    for (const auto& e : events) {
        s.activated[static_cast<std::size_t>(type_index(e.owner))] += e.activated;
        s.time = std::max(s.time, e.time);
    }
    s.discoveries = std::move(events);
    return s;
}

} // namespace

TEST(Passage, MatchesNaiveDiscoveryTimes) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 1 + trial % 2;
        const double p = trial % 3 == 0 ? 1.0 : 0.3 + 0.1 * (trial % 5);
        SimConfig c = base(dim, p);
        c.eta = trial % 4 == 0 ? InitDistribution::poisson(1.0) : InitDistribution::degenerate(1);
        const RandomnessSource src(gen());
        Site x(dim), y(dim);
        for (int i = 0; i < dim; ++i) {
            x[i] = static_cast<std::int32_t>(gen() % 7) - 3;
            y[i] = static_cast<std::int32_t>(gen() % 7) - 3;
        }
        const int horizon = 60;
        SimConfig from_x = c;
        from_x.start1 = x;
        const auto ref = naive_run(from_x, src, horizon);
        const auto got = passage_time(c, src, x, y, p, horizon);
        const auto it = ref.discovered.find(y);
        if (it == ref.discovered.end()) {
            EXPECT_EQ(got, PassageTime::unresolved(horizon)) << "trial " << trial;
        } else {
            EXPECT_EQ(got, PassageTime::resolved_at(it->second.time)) << "trial " << trial;
        }
    }
}

TEST(Passage, SelfIsZeroAndSpeedLimitHolds) {
    const auto c = base(2, 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RandomnessSource src(seed);
        EXPECT_EQ(passage_time(c, src, Site{2, 3}, Site{2, 3}, 1.0, 10), PassageTime::resolved_at(0));
        const Site y{4, -3};
        const auto t = passage_time(c, src, Site{0, 0}, y, 1.0, 200);
        if (t.resolved) EXPECT_GE(t.time, l1_norm(y));
    }
}

TEST(Passage, ManyTargetsAgreeWithSingleTarget) {
    const auto c = base(2, 0.6);
    const RandomnessSource src(8);
    const std::vector<Site> targets{Site{1, 0}, Site{0, 3}, Site{-2, -2}, Site{5, 5}};
    const auto all = passage_times(c, src, Site{0, 0}, targets, 0.6, 80);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        EXPECT_EQ(all[i], passage_time(c, src, Site{0, 0}, targets[i], 0.6, 80));
    }
}

TEST(Passage, EmptyStartNeverResolvesElsewhere) {
    SimConfig c = base(1, 1.0);
    c.eta = InitDistribution::degenerate(0);
    const RandomnessSource src(1);
    EXPECT_EQ(passage_time(c, src, Site{0}, Site{3}, 1.0, 50), PassageTime::unresolved(50));
}

TEST(Subadditivity, HoldsOnRandomTriples) {
    std::mt19937_64 gen(77);
    int applicable = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const int dim = 1 + trial % 2;
        const double p = trial % 2 ? 1.0 : 0.5;
        SimConfig c = base(dim, p);
        c.eta = InitDistribution::poisson(1.5);
        c.condition_start_nonempty = true;
        const RandomnessSource src(gen());
        Site x(dim), w(dim), y(dim);
        for (int i = 0; i < dim; ++i) {
            x[i] = static_cast<std::int32_t>(gen() % 9) - 4;
            w[i] = static_cast<std::int32_t>(gen() % 9) - 4;
            y[i] = static_cast<std::int32_t>(gen() % 9) - 4;
        }
        const auto r = check_subadditivity(c, src, x, w, y, p, 400);
        EXPECT_NE(r.verdict, Subadditivity::Violated) << "trial " << trial;
        applicable += r.verdict == Subadditivity::Holds ? 1 : 0;
    }
    EXPECT_GT(applicable, 60);
}

TEST(Subadditivity, UnresolvedLegIsInapplicable) {
    const auto c = base(2, 1.0);
    const RandomnessSource src(3);
    const auto r = check_subadditivity(c, src, Site{0, 0}, Site{9, 0}, Site{-9, 0}, 1.0, 2);
    EXPECT_EQ(r.verdict, Subadditivity::Inapplicable);
    EXPECT_FALSE(r.xy.resolved);
}

TEST(Statistics, MeanStatHandValues) {
    const double v[] = {1.0, 2.0, 3.0, 4.0};
    const auto s = mean_stat(v);
    EXPECT_EQ(s.count, 4);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    // sample variance 5/3
    EXPECT_NEAR(s.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
    const double one[] = {7.0};
    EXPECT_DOUBLE_EQ(mean_stat(one).std_error, 0.0);
    EXPECT_EQ(mean_stat(std::span<const double>{}).count, 0);
}

TEST(Mu, AtLeastOneAtFullSpeed) {
    SimConfig c = base(2, 1.0);
    c.seed = 12;
    c.horizon = 200;
    const std::int64_t ns[] = {5, 10};
    const auto est = estimate_mu(c, ns, 20, Site{1, 0});
    ASSERT_EQ(est.size(), 2u);
    for (const auto& e : est) {
        EXPECT_EQ(e.unresolved, 0);
        EXPECT_EQ(e.ratio.count, 20);
        EXPECT_GE(e.ratio.mean, 1.0);
    }
    EXPECT_EQ(est[0].n, 5);
}

TEST(Mu, AtLeastOneOverPWhenLazy) {
    // each jump costs a geometric(p) wait, so T(0, n e1) >= n in any case
    SimConfig c = base(1, 0.5);
    c.seed = 4;
    c.horizon = 400;
    const std::int64_t ns[] = {8};
    const auto est = estimate_mu(c, ns, 20, Site{1});
    EXPECT_GE(est[0].ratio.mean, 1.0);
    EXPECT_THROW(estimate_mu(c, ns, 0, Site{1}), std::invalid_argument);
}

TEST(Shape, FullDiamondRadii) {
    const Site center{1, -1};
    const ShapeEstimate s(3, center, diamond_sites(2, 3, center));
    EXPECT_EQ(s.inner_radius(), 3);
    EXPECT_EQ(s.outer_radius(), 3);
    EXPECT_DOUBLE_EQ(s.coverage(3), 1.0);
    EXPECT_DOUBLE_EQ(s.coverage(10), static_cast<double>(diamond_point_count(2, 3)) / diamond_point_count(2, 10));
    EXPECT_DOUBLE_EQ(s.scale(), 1.0 / 3.0);
}

TEST(Shape, HoleShrinksInnerRadius) {
    auto cells = diamond_sites(2, 4, Site{0, 0});
    std::erase(cells, Site{1, 1});
    const ShapeEstimate s(4, Site{0, 0}, cells);
    EXPECT_EQ(s.inner_radius(), 1);
    EXPECT_EQ(s.outer_radius(), 4);
    EXPECT_NEAR(s.coverage(2), 12.0 / 13.0, 1e-12);
}

TEST(Shape, MissingCenter) {
    const ShapeEstimate s(1, Site{0, 0}, {Site{1, 0}});
    EXPECT_EQ(s.inner_radius(), -1);
    EXPECT_EQ(s.outer_radius(), 1);
}

TEST(Shape, RadiiMatchEnumerationOnRandomSets) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 1 + trial % 3;
        const Site center = Site::origin(dim);
        std::set<Site> cells;
        const int r = 1 + static_cast<int>(gen() % 5);
        for (const auto& s : diamond_sites(dim, r, center)) {
            if (gen() % 100 < 92 || s == center) cells.insert(s);
        }
        const ShapeEstimate est(r, center, std::vector<Site>(cells.begin(), cells.end()));
        EXPECT_EQ(est.inner_radius(), brute_inner(cells, center));
        std::int64_t outer = 0;
        for (const auto& s : cells) outer = std::max(outer, l1_norm(s));
        EXPECT_EQ(est.outer_radius(), outer);
        for (int k = 0; k <= r; ++k) {
            std::int64_t in = 0;
            for (const auto& s : cells) in += l1_norm(s) <= k ? 1 : 0;
            EXPECT_NEAR(est.coverage(k), static_cast<double>(in) / diamond_point_count(dim, k), 1e-12);
        }
        EXPECT_LE(est.inner_radius(), est.outer_radius());
    }
}

TEST(Shape, FromRunRespectsCheckpoint) {
    auto c = base(2, 1.0);
    const auto s = run(c, RandomnessSource(6), 30);
    const auto early = shape_estimate(s, 10);
    const auto late = shape_estimate(s, 30);
    EXPECT_LE(early.cells().size(), late.cells().size());
    for (const auto& cell : early.cells()) EXPECT_TRUE(late.contains(cell));
    EXPECT_LE(early.outer_radius(), 10);
    EXPECT_LE(late.outer_radius(), 30);
    EXPECT_THROW(shape_estimate(s, 31), std::invalid_argument);
    EXPECT_THROW(diamond_coverage(late, 0.0), std::invalid_argument);
    EXPECT_THROW(diamond_coverage(late, 1.5), std::invalid_argument);
    EXPECT_NEAR(diamond_coverage(late, 0.5), late.coverage(15), 1e-12);
}

TEST(Outcome, CountsLeaderAndCoexistence) {
    const auto s = summary_with({
        {0, Site{0, 0}, Arrival::Type1, ParticleType::Type1, 1},
        {0, Site{1, 0}, Arrival::Type2, ParticleType::Type2, 1},
        {1, Site{2, 0}, Arrival::Type2, ParticleType::Type2, 3},
        {2, Site{-1, 0}, Arrival::Type1, ParticleType::Type1, 0},
        {4, Site{3, 0}, Arrival::Both, ParticleType::Type2, 2},
    });
    const auto o = outcome_summary(s, 2);
    EXPECT_EQ(o.count1, 1);
    EXPECT_EQ(o.count2, 6);
    EXPECT_EQ(o.leader, Leader::Type2);
    EXPECT_FALSE(o.coexist);
    EXPECT_TRUE(o.coexist_at(1));
    // activation times ignore sites that held no particles
    EXPECT_EQ(o.last_activation1, 0);
    EXPECT_EQ(o.last_activation2, 4);
    EXPECT_EQ(to_string(Leader::Tie), "tie");
}

TEST(Outcome, EqualCountsTie) {
    const auto s = summary_with({
        {0, Site{0, 0}, Arrival::Type1, ParticleType::Type1, 2},
        {0, Site{1, 0}, Arrival::Type2, ParticleType::Type2, 2},
    });
    const auto o = outcome_summary(s, 2);
    EXPECT_EQ(o.leader, Leader::Tie);
    EXPECT_TRUE(o.coexist);
}

TEST(ParticleStats, LastDiscoveryMatchesNaive) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto c = base(2, seed % 2 ? 1.0 : 0.5);
        c.eta = InitDistribution::degenerate(2);
        const RandomnessSource src(seed);
        const auto stats = particle_discovery_stats(run(c, src, 40));
        const auto ref = naive_run(c, src, 40);
        std::int32_t expected = -1;
        for (const auto& p : ref.particles) {
            if (p.birth == c.start1) expected = std::max(expected, p.last_discovery);
        }
        EXPECT_EQ(stats.last_discovery_from(c.start1), expected);
        EXPECT_EQ(stats.last_discovery_from(Site{50, 50}), -1);
    }
}

TEST(ParticleStats, OccupationRunsHaveNoIdentity) {
    auto c = base(2, 0.5);
    c.representation = Representation::Occupation;
    const auto s = run(c, RandomnessSource(1), 10);
    EXPECT_THROW(particle_discovery_stats(s), std::logic_error);
}
