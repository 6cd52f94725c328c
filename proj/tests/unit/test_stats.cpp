#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chardecomp/stats/kruskal.hpp"

using namespace chardecomp::stats;

namespace {

std::vector<NamedGroup> three(std::vector<double> a, std::vector<double> b, std::vector<double> c) {
    return {{"a", std::move(a)}, {"b", std::move(b)}, {"c", std::move(c)}};
}

// Rank by counting: r(x) = #{y < x} + (#{y == x} + 1) / 2.
double naive_rank(const std::vector<NamedGroup>& groups, double x) {
    double less = 0.0, equal = 0.0;
    for (const auto& g : groups) {
        for (double y : g.values) {
            less += y < x;
            equal += y == x;
        }
    }
    return less + (equal + 1.0) / 2.0;
}

// H as the weighted squared deviation of mean ranks, divided by the tie factor.
double naive_h(const std::vector<NamedGroup>& groups) {
    double n = 0.0;
    for (const auto& g : groups) n += static_cast<double>(g.values.size());
    const double grand = (n + 1.0) / 2.0;
    double between = 0.0, total = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g.values) {
            const double r = naive_rank(groups, v);
            mean += r / static_cast<double>(g.values.size());
            total += (r - grand) * (r - grand);
        }
        between += static_cast<double>(g.values.size()) * (mean - grand) * (mean - grand);
    }
    return (n - 1.0) * between / total;
}

}  // namespace

TEST(ChiSquare, ClosedFormsForEvenDf) {
    EXPECT_NEAR(chi2_upper_tail(7.2, 2), std::exp(-3.6), 1e-10);
    for (double x : {0.1, 1.0, 5.5, 20.0}) {
        EXPECT_NEAR(chi2_upper_tail(x, 2), std::exp(-x / 2.0), 1e-12);
        EXPECT_NEAR(chi2_upper_tail(x, 4), std::exp(-x / 2.0) * (1.0 + x / 2.0), 1e-12);
    }
    EXPECT_NEAR(chi2_upper_tail(3.841458820694124, 1), 0.05, 1e-9);
}

TEST(ChiSquare, EdgesAndMonotone) {
    for (double df : {1.0, 2.0, 5.0}) {
        EXPECT_EQ(chi2_upper_tail(0.0, df), 1.0);
        EXPECT_EQ(chi2_upper_tail(std::numeric_limits<double>::infinity(), df), 0.0);
        double prev = 1.0;
        for (double x = 0.25; x < 40.0; x += 0.25) {
            const double p = chi2_upper_tail(x, df);
            EXPECT_LE(p, prev);
            prev = p;
        }
    }
    EXPECT_THROW(chi2_upper_tail(-1.0, 2), std::invalid_argument);
    EXPECT_THROW(chi2_upper_tail(1.0, 0.5), std::invalid_argument);
}

TEST(KruskalWallis, SeparatedTriplesGiveSevenPointTwo) {
    const auto r = kruskal_wallis(three({1, 2, 3}, {4, 5, 6}, {7, 8, 9}));
    EXPECT_EQ(r.h, 7.2);
    EXPECT_EQ(r.df, 2u);
    EXPECT_NEAR(r.p, std::exp(-3.6), 1e-10);
    EXPECT_FALSE(r.degenerate);
}

TEST(KruskalWallis, FrozenReferenceValues) {
    // Reference values from an independent implementation (scipy.stats.kruskal).
    const auto a = kruskal_wallis(three({2.9, 3.0, 2.5, 2.6, 3.2}, {3.8, 2.7, 4.0, 2.4}, {2.8, 3.4, 3.7, 2.2, 2.0}));
    EXPECT_NEAR(a.h, 0.7714285714285722, 1e-10);
    EXPECT_NEAR(a.p, 0.6799647735788936, 1e-10);
    const auto b = kruskal_wallis(three({1, 1, 2, 3}, {2, 2, 4, 5}, {3, 6, 6, 7}));
    EXPECT_NEAR(b.h, 6.692652329749103, 1e-10);
    EXPECT_NEAR(b.p, 0.03521348529140524, 1e-10);
}

TEST(KruskalWallis, MatchesNaiveRankOracle) {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> value(0, 9), size(1, 8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<NamedGroup> groups(2 + trial % 3);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            groups[g].name = std::string(1, static_cast<char>('a' + g));
            const int n = size(gen);
            for (int i = 0; i < n; ++i) groups[g].values.push_back(value(gen));
        }
        const auto r = kruskal_wallis(groups);
        if (r.degenerate) continue;
        EXPECT_NEAR(r.h, naive_h(groups), 1e-9);
    }
}

TEST(KruskalWallis, IdenticalGroupsAreNull) {
    const auto groups = three({1, 2, 3}, {1, 2, 3}, {1, 2, 3});
    const auto r = kruskal_wallis(groups);
    EXPECT_EQ(r.h, 0.0);
    EXPECT_EQ(r.p, 1.0);
    for (const auto& p : dunn_pairwise(groups)) EXPECT_NEAR(p.p_adjusted, 1.0, 1e-12);
}

TEST(KruskalWallis, AllTiedIsDegenerate) {
    const auto groups = three({4, 4}, {4}, {4, 4, 4});
    EXPECT_TRUE(kruskal_wallis(groups).degenerate);
    for (const auto& p : dunn_pairwise(groups)) {
        EXPECT_TRUE(p.degenerate);
        EXPECT_EQ(p.p_adjusted, 1.0);
    }
}

TEST(KruskalWallis, RejectsBadInput) {
    EXPECT_THROW(kruskal_wallis({{"a", {1, 2}}}), std::invalid_argument);
    EXPECT_THROW(kruskal_wallis({{"a", {1}}, {"b", {}}}), std::invalid_argument);
    EXPECT_THROW(kruskal_wallis({{"a", {1}}, {"b", {std::nan("")}}}), std::invalid_argument);
}

TEST(KruskalWallis, InvariantUnderMonotoneTransformAndGroupOrder) {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> noise;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<NamedGroup> groups(3);
        for (std::size_t g = 0; g < 3; ++g) {
            groups[g].name = std::to_string(g);
            for (int i = 0; i < 6 + trial % 5; ++i) groups[g].values.push_back(noise(gen) + 0.3 * static_cast<double>(g));
        }
        const auto base = kruskal_wallis(groups);
        auto warped = groups;
        for (auto& g : warped) {
            for (double& v : g.values) v = std::exp(3.0 * v) + 1.0;
        }
        EXPECT_NEAR(kruskal_wallis(warped).h, base.h, 1e-9);
        std::vector<NamedGroup> swapped{groups[2], groups[0], groups[1]};
        EXPECT_NEAR(kruskal_wallis(swapped).h, base.h, 1e-9);
    }
}

TEST(Dunn, ShiftedGroupStandsOut) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> noise;
    std::vector<NamedGroup> groups{{"a", {}}, {"b", {}}, {"shifted", {}}};
    for (int i = 0; i < 30; ++i) {
        groups[0].values.push_back(noise(gen));
        groups[1].values.push_back(noise(gen));
        groups[2].values.push_back(noise(gen) + 100.0);
    }
    EXPECT_LT(kruskal_wallis(groups).p, 0.01);
    const auto pairs = dunn_pairwise(groups);
    ASSERT_EQ(pairs.size(), 3u);
    for (const auto& p : pairs) {
        if (p.b == "shifted") {
            EXPECT_LT(p.p_adjusted, 0.01) << p.a;
        } else {
            EXPECT_GT(p.p_adjusted, 0.05);
        }
    }
}

TEST(Dunn, AdjustmentBoundsAndFactor) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> noise;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<NamedGroup> groups(2 + trial % 4);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            groups[g].name = std::to_string(g);
            for (int i = 0; i < 5; ++i) groups[g].values.push_back(noise(gen) + 0.5 * static_cast<double>(g));
        }
        const double m = static_cast<double>(groups.size() * (groups.size() - 1) / 2);
        for (const auto& p : dunn_pairwise(groups)) {
            EXPECT_GE(p.p_adjusted, p.p);
            EXPECT_LE(p.p_adjusted, 1.0);
            EXPECT_DOUBLE_EQ(p.p_adjusted, std::min(1.0, p.p * m));
        }
    }
}

TEST(Dunn, TwoGroupStatisticMatchesKruskal) {
    // With two groups z^2 equals H, both using the same tie correction.
    const std::vector<NamedGroup> groups{{"x", {1, 3, 3, 7, 9}}, {"y", {2, 3, 8, 10, 11, 12}}};
    const auto pairs = dunn_pairwise(groups);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_NEAR(pairs[0].z * pairs[0].z, kruskal_wallis(groups).h, 1e-10);
    EXPECT_NEAR(pairs[0].p, kruskal_wallis(groups).p, 1e-10);
}
