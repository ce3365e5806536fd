#include <set>

#include <gtest/gtest.h>

#include "frogsim/lattice.hpp"

using namespace frogsim;

namespace {

// count of |x|_1 <= r by walking the whole box
std::int64_t brute_diamond(int dim, int r) {
    std::int64_t count = 0;
    Site s(dim);
    for (int i = 0; i < dim; ++i) s[i] = -r;
    while (true) {
        if (l1_norm(s) <= r) ++count;
        int i = 0;
        for (; i < dim; ++i) {
            if (++s[i] <= r) break;
            s[i] = -r;
        }
        if (i == dim) break;
    }
    return count;
}

} // namespace

TEST(Site, OriginAndAxisPoint) {
    const auto o = Site::origin(3);
    EXPECT_EQ(o.dim(), 3);
    EXPECT_EQ(l1_norm(o), 0);
    const auto a = Site::axis_point(2, 7);
    EXPECT_EQ(a, (Site{7, 0}));
    EXPECT_EQ(a.to_string(), "(7,0)");
}

TEST(Site, DimensionBounds) {
    EXPECT_THROW(Site(0), std::invalid_argument);
    EXPECT_THROW(Site(kMaxDim + 1), std::invalid_argument);
    EXPECT_NO_THROW(Site(kMaxDim));
}

TEST(Site, ArithmeticAndNorms) {
    const Site a{1, -2, 3};
    const Site b{-4, 0, 1};
    EXPECT_EQ(a + b, (Site{-3, -2, 4}));
    EXPECT_EQ(a - b, (Site{5, -2, 2}));
    EXPECT_EQ(l1_norm(a), 6);
    EXPECT_EQ(l1_distance(a, b), 9);
    EXPECT_EQ(l1_distance(b, a), 9);
}

TEST(Site, EqualityDependsOnDimension) {
    EXPECT_NE(Site::origin(1), Site::origin(2));
    EXPECT_TRUE(Site{0} < Site{1});
    EXPECT_TRUE((Site{-1, 5}) < (Site{0, -5}));
}

TEST(Site, ParseForms) {
    EXPECT_EQ(parse_site("(1,-2)"), (Site{1, -2}));
    EXPECT_EQ(parse_site(" ( 3 , 4 ) "), (Site{3, 4}));
    EXPECT_EQ(parse_site("1,-2"), (Site{1, -2}));
    EXPECT_EQ(parse_site("5"), Site{5});
    EXPECT_THROW(parse_site("(1,x)"), std::invalid_argument);
    EXPECT_THROW(parse_site("()"), std::invalid_argument);
    EXPECT_THROW(parse_site("(1,2"), std::invalid_argument);
}

TEST(Site, ToStringRoundTrip) {
    for (int dim = 1; dim <= 4; ++dim) {
        Site s(dim);
        for (int i = 0; i < dim; ++i) s[i] = (i % 2 ? -1 : 1) * (13 * i + 2);
        EXPECT_EQ(parse_site(s.to_string()), s);
    }
}

TEST(Site, HashSeparatesNeighbours) {
    std::set<std::size_t> hashes;
    const SiteHash h;
    for (int x = -20; x <= 20; ++x) {
        for (int y = -20; y <= 20; ++y) hashes.insert(h(Site{x, y}));
    }
    EXPECT_EQ(hashes.size(), 41u * 41u);
}

TEST(Direction, CanonicalOrder) {
    // axis ascending, minus before plus
    EXPECT_EQ(Direction::from_index(0), (Direction{0, -1}));
    EXPECT_EQ(Direction::from_index(1), (Direction{0, 1}));
    EXPECT_EQ(Direction::from_index(2), (Direction{1, -1}));
    EXPECT_EQ(Direction::from_index(3), (Direction{1, 1}));
    for (int i = 0; i < 2 * kMaxDim; ++i) EXPECT_EQ(Direction::from_index(i).index(), i);
}

TEST(Direction, NeighborsInCanonicalOrder) {
    const auto n = neighbors(Site{0, 0});
    ASSERT_EQ(n.size(), 4u);
    EXPECT_EQ(n[0], (Site{-1, 0}));
    EXPECT_EQ(n[1], (Site{1, 0}));
    EXPECT_EQ(n[2], (Site{0, -1}));
    EXPECT_EQ(n[3], (Site{0, 1}));
    for (const auto& s : neighbors(Site{4, -2, 7})) EXPECT_EQ(l1_distance(s, Site{4, -2, 7}), 1);
}

TEST(Diamond, PointCountMatchesEnumeration) {
    for (int dim = 1; dim <= 4; ++dim) {
        for (int r = 0; r <= 6; ++r) {
            EXPECT_EQ(diamond_point_count(dim, r), brute_diamond(dim, r)) << "d=" << dim << " r=" << r;
        }
    }
}

TEST(Diamond, KnownCounts) {
    EXPECT_EQ(diamond_point_count(2, 1), 5);
    EXPECT_EQ(diamond_point_count(2, 90), 2 * 90 * 90 + 2 * 90 + 1);
    EXPECT_EQ(diamond_point_count(1, 10), 21);
}
