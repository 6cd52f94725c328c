#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/stats/kruskal.hpp"

namespace chardecomp {

/// Words ending in `suffix`, split by gold and predicted Class=Value:
/// wf_pf (gold and predicted value), wnf_pf (predicted only) and wnf_pnf (neither).
struct InteractionSelector {
    std::u32string suffix = U"a";
    std::string feature_class = "Gender";
    std::string value = "Fem";
};

inline const std::vector<std::string>& interaction_group_names() {
    static const std::vector<std::string> names{"wf_pf", "wnf_pf", "wnf_pnf"};
    return names;
}

struct InteractionWord {
    std::u32string surface;
    std::string group;
    double max_score = 0.0;
    cd::IndexSet max_set;  // surface positions
    double min_score = 0.0;
    cd::IndexSet min_set;
    bool capped = false;
};

struct GroupSummary {
    std::string name;
    std::size_t size = 0;
    double mean_max = 0.0;
    double mean_min = 0.0;
};

struct GroupTest {
    /// Set when fewer than two groups have at least two members.
    std::string skipped;
    std::vector<std::string> groups;  // groups that entered the test
    stats::KruskalResult kruskal;
    std::vector<stats::PairwiseResult> pairwise;
};

struct InteractionReport {
    InteractionSelector selector;
    std::vector<InteractionWord> words;
    std::vector<GroupSummary> groups;
    std::vector<std::string> notices;
    GroupTest max_test;
    GroupTest min_test;
};

namespace detail {

inline bool ends_with(std::u32string_view s, std::u32string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline GroupTest run_group_test(const std::vector<stats::NamedGroup>& all, std::vector<std::string>& notices,
                                const std::string& label) {
    GroupTest t;
    std::vector<stats::NamedGroup> used;
    for (const auto& g : all) {
        if (g.values.size() >= 2) {
            used.push_back(g);
            t.groups.push_back(g.name);
        } else {
            notices.push_back(label + ": group " + g.name + " has " + std::to_string(g.values.size()) +
                              " member(s) and is left out of the tests");
        }
    }
    if (used.size() < 2) {
        t.skipped = "fewer than two groups with at least two members";
        return t;
    }
    t.kruskal = stats::kruskal_wallis(used);
    t.pairwise = stats::dunn_pairwise(used);
    return t;
}

}  // namespace detail

/// Per selected word: the most positive and most negative contribution to
/// Class=Value over every character set of any size, then rank tests of
/// both score families across the outcome groups.
inline InteractionReport interaction_analysis(const Model& m, std::span<const WordSample> words,
                                              const InteractionSelector& sel) {
    const ClassTarget target = resolve_target(m.schema, sel.feature_class, sel.value);
    InteractionReport report;
    report.selector = sel;
    const auto& names = interaction_group_names();
    std::vector<stats::NamedGroup> max_groups, min_groups;
    for (const auto& n : names) {
        max_groups.push_back({n, {}});
        min_groups.push_back({n, {}});
    }
    for (const auto& w : words) {
        if (w.surface.empty() || !detail::ends_with(w.surface, sel.suffix)) continue;
        const auto ids = m.encode(w.surface);
        const bool gold = w.label(sel.feature_class) == sel.value;
        const bool pred = predict(m, ids)[target.head] == target.label;
        std::size_t group = 0;
        if (gold && pred) {
            group = 0;
        } else if (!gold && pred) {
            group = 1;
        } else if (!gold && !pred) {
            group = 2;
        } else {
            continue;  // gold value but mispredicted: not part of any group
        }
        const CandidateList cands = enumerate_all_sizes(w.surface.size(), 1);
        const cd::WordDecomposer dec(m, ids);
        const auto ranked = score_sets(dec, target, cands.sets);
        InteractionWord iw;
        iw.surface = w.surface;
        iw.group = names[group];
        iw.max_score = ranked.front().contribution.score;
        iw.max_set = to_surface(ranked.front().positions);
        iw.min_score = ranked.back().contribution.score;
        iw.min_set = to_surface(ranked.back().positions);
        iw.capped = cands.capped;
        max_groups[group].values.push_back(iw.max_score);
        min_groups[group].values.push_back(iw.min_score);
        report.words.push_back(std::move(iw));
    }
    for (std::size_t g = 0; g < names.size(); ++g) {
        GroupSummary s{names[g], max_groups[g].values.size(), 0.0, 0.0};
        for (std::size_t i = 0; i < s.size; ++i) {
            s.mean_max += max_groups[g].values[i] / static_cast<double>(s.size);
            s.mean_min += min_groups[g].values[i] / static_cast<double>(s.size);
        }
        report.groups.push_back(s);
    }
    report.max_test = detail::run_group_test(max_groups, report.notices, "max scores");
    report.min_test = detail::run_group_test(min_groups, report.notices, "min scores");
    return report;
}

}  // namespace chardecomp
