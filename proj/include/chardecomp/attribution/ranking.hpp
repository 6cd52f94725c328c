#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

/// One scored candidate. `index_set` holds surface positions (0 is the first
/// real character); boundary markers are never part of it.
struct AttributionResult {
    cd::IndexSet index_set;
    std::string feature_class;
    std::string value;
    double score = 0.0;  // W_j . beta
    double gamma_score = 0.0;
    double logit = 0.0;
};

/// Head and label index of Class=Value, or SchemaError.
struct ClassTarget {
    std::size_t head = 0;
    std::size_t label = 0;
};

inline ClassTarget resolve_target(const FeatureSchema& schema, const std::string& feature_class, const std::string& value) {
    const auto head = schema.class_index(feature_class);
    if (!head) throw SchemaError("feature class '" + feature_class + "' not in model schema");
    const auto label = schema.classes[*head].label_index(value);
    if (!label) throw SchemaError("value '" + value + "' not in feature class '" + feature_class + "'");
    return {*head, *label};
}

struct ScoredSet {
    cd::IndexSet positions;  // encoded positions
    cd::ClassContribution contribution;
};

/// Descending score; equal scores keep the lexicographically smaller set first.
inline void sort_by_score(std::vector<ScoredSet>& scored) {
    std::sort(scored.begin(), scored.end(), [](const ScoredSet& a, const ScoredSet& b) {
        if (a.contribution.score != b.contribution.score) return a.contribution.score > b.contribution.score;
        return a.positions < b.positions;
    });
}

/// Scores encoded-position sets of one word for one class value, ranked.
inline std::vector<ScoredSet> score_sets(const cd::WordDecomposer& dec, const ClassTarget& target,
                                         std::span<const cd::IndexSet> sets) {
    std::vector<ScoredSet> out;
    out.reserve(sets.size());
    for (const auto& s : sets) out.push_back({s, dec.contribution(s, target.head, target.label)});
    sort_by_score(out);
    return out;
}

inline cd::IndexSet to_encoded(const cd::IndexSet& surface_positions) {
    cd::IndexSet out(surface_positions);
    for (auto& p : out) ++p;
    return out;
}

inline cd::IndexSet to_surface(const cd::IndexSet& encoded_positions) {
    cd::IndexSet out(encoded_positions);
    for (auto& p : out) {
        if (p == 0) throw std::invalid_argument("to_surface: start marker has no surface position");
        --p;
    }
    return out;
}

/// Ranks candidate sets (surface positions) of `surface` by their
/// contribution to Class=Value.
inline std::vector<AttributionResult> rank_candidates(const Model& m, std::u32string_view surface,
                                                      const std::string& feature_class, const std::string& value,
                                                      std::span<const cd::IndexSet> candidates) {
    const ClassTarget target = resolve_target(m.schema, feature_class, value);
    const cd::WordDecomposer dec(m, m.encode(surface));
    std::vector<cd::IndexSet> encoded;
    encoded.reserve(candidates.size());
    for (const auto& c : candidates) {
        for (std::size_t p : c) {
            if (p >= surface.size()) {
                throw std::invalid_argument("candidate position " + std::to_string(p) + " outside word of length " +
                                            std::to_string(surface.size()));
            }
        }
        encoded.push_back(to_encoded(c));
    }
    std::vector<AttributionResult> out;
    for (auto& s : score_sets(dec, target, encoded)) {
        out.push_back({to_surface(s.positions), feature_class, value, s.contribution.score,
                       s.contribution.gamma_score, s.contribution.logit});
    }
    return out;
}

/// Contribution of every single character (surface order) to Class=Value.
inline std::vector<double> singleton_scores(const cd::WordDecomposer& dec, const ClassTarget& target,
                                            std::size_t surface_length) {
    std::vector<double> out;
    out.reserve(surface_length);
    for (std::size_t i = 0; i < surface_length; ++i) out.push_back(dec.contribution({i + 1}, target.head, target.label).score);
    return out;
}

}  // namespace chardecomp
