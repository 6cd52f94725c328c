#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace chardecomp::stats {

struct NamedGroup {
    std::string name;
    std::vector<double> values;
};

/// Q(df/2, x/2): probability that a chi-square variable with df degrees of
/// freedom exceeds x.
inline double chi2_upper_tail(double x, double df) {
    if (!(df >= 1.0) || !std::isfinite(df)) throw std::invalid_argument("chi2_upper_tail: df must be >= 1");
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("chi2_upper_tail: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

/// Mid-ranks (1-based) of the pooled observations plus the tie term sum(t^3 - t).
struct PooledRanks {
    std::vector<std::vector<double>> ranks;  // per group, parallel to the values
    double tie_sum = 0.0;
    std::size_t n = 0;
};

inline void check_groups(const std::vector<NamedGroup>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("rank test needs at least two groups");
    for (const auto& g : groups) {
        if (g.values.empty()) throw std::invalid_argument("group '" + g.name + "' is empty");
        for (double v : g.values) {
            if (!std::isfinite(v)) throw std::invalid_argument("group '" + g.name + "' holds a non-finite value");
        }
    }
}

inline PooledRanks pooled_ranks(const std::vector<NamedGroup>& groups) {
    struct Obs {
        double value;
        std::size_t group, index;
    };
    std::vector<Obs> all;
    PooledRanks r;
    r.ranks.resize(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        r.ranks[g].resize(groups[g].values.size());
        for (std::size_t i = 0; i < groups[g].values.size(); ++i) all.push_back({groups[g].values[i], g, i});
    }
    std::stable_sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });
    r.n = all.size();
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) r.ranks[all[k].group][all[k].index] = mid;
        const auto t = static_cast<double>(j - i);
        r.tie_sum += t * t * t - t;
        i = j;
    }
    return r;
}

struct KruskalResult {
    double h = 0.0;
    std::size_t df = 0;
    double p = 1.0;
    /// Every observation tied: H is undefined; h = 0 and p = 1 are placeholders.
    bool degenerate = false;
};

inline KruskalResult kruskal_wallis(const std::vector<NamedGroup>& groups) {
    check_groups(groups);
    const PooledRanks r = pooled_ranks(groups);
    const auto N = static_cast<double>(r.n);
    KruskalResult out;
    out.df = groups.size() - 1;
    const double correction = 1.0 - r.tie_sum / (N * N * N - N);
    if (!(correction > 0.0)) {
        out.degenerate = true;
        return out;
    }
    // Squared deviations of the mean ranks from (N+1)/2; no cancellation against 3(N+1).
    const double grand = (N + 1.0) / 2.0;
    double spread = 0.0;
    for (const auto& ranks : r.ranks) {
        const auto n = static_cast<double>(ranks.size());
        const double dev = std::accumulate(ranks.begin(), ranks.end(), 0.0) / n - grand;
        spread += n * dev * dev;
    }
    out.h = 12.0 * spread / (N * (N + 1.0)) / correction;
    out.p = chi2_upper_tail(out.h, static_cast<double>(out.df));
    return out;
}

struct PairwiseResult {
    std::string a, b;
    double z = 0.0;  // (mean rank a - mean rank b) / se
    double p = 1.0;  // two-sided, unadjusted
    double p_adjusted = 1.0;
    bool degenerate = false;
};

/// Dunn's test on mean ranks with tie correction, Bonferroni-adjusted over all pairs.
inline std::vector<PairwiseResult> dunn_pairwise(const std::vector<NamedGroup>& groups) {
    check_groups(groups);
    const PooledRanks r = pooled_ranks(groups);
    const auto N = static_cast<double>(r.n);
    const double variance = N * (N + 1.0) / 12.0 - r.tie_sum / (12.0 * (N - 1.0));
    const auto pairs = static_cast<double>(groups.size() * (groups.size() - 1) / 2);
    std::vector<double> mean(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        mean[g] = std::accumulate(r.ranks[g].begin(), r.ranks[g].end(), 0.0) / static_cast<double>(r.ranks[g].size());
    }
    std::vector<PairwiseResult> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            PairwiseResult p;
            p.a = groups[i].name;
            p.b = groups[j].name;
            const double se = std::sqrt(variance * (1.0 / static_cast<double>(groups[i].values.size()) +
                                                    1.0 / static_cast<double>(groups[j].values.size())));
            if (!(se > 0.0)) {
                p.degenerate = true;
            } else {
                p.z = (mean[i] - mean[j]) / se;
                p.p = std::erfc(std::abs(p.z) / std::sqrt(2.0));
                p.p_adjusted = std::min(1.0, p.p * pairs);
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace chardecomp::stats
