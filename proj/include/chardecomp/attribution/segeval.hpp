#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

inline constexpr std::size_t kTopkMax = 3;

/// Outcome for one annotated word/feature pair.
struct SegmentRecord {
    SegmentAnnotation annotation;
    /// 1-based rank of the ground-truth set among the candidates, 0 when the
    /// set is not a candidate (e.g. a non-window in consecutive mode).
    std::size_t rank = 0;
    std::size_t candidates = 0;
    bool capped = false;
    AttributionResult top;
};

struct SkippedAnnotation {
    SegmentAnnotation annotation;
    std::string reason;
};

struct TopkReport {
    CandidateMode mode = CandidateMode::Consecutive;
    std::size_t evaluated = 0;
    std::array<std::size_t, kTopkMax> correct{};  // correct[k-1]: ground truth within top k
    std::size_t capped = 0;
    std::vector<SegmentRecord> records;
    std::vector<SkippedAnnotation> skipped;

    double rate(std::size_t k) const {
        return evaluated == 0 ? 0.0 : static_cast<double>(correct.at(k - 1)) / static_cast<double>(evaluated);
    }
};

namespace detail {

inline std::string skip_reason(const Model& m, const SegmentAnnotation& a) {
    for (char32_t c : a.surface) {
        if (!m.vocab.contains(c)) return "character outside the model vocabulary";
    }
    const auto head = m.schema.class_index(a.feature_class);
    if (!head) return "feature class not in model schema";
    if (!m.schema.classes[*head].label_index(a.value)) return "value not in model schema";
    if (a.index_set.empty()) return "empty ground-truth set";
    for (std::size_t p : a.index_set) {
        if (p >= a.surface.size()) return "ground-truth position outside word";
    }
    return {};
}

}  // namespace detail

/// For every annotation, ranks all candidates with the ground-truth
/// cardinality and counts how often the ground truth lands in the top k.
inline TopkReport topk_segmentation_eval(const Model& m, std::span<const SegmentAnnotation> annotations,
                                         CandidateMode mode) {
    TopkReport report;
    report.mode = mode;
    for (const auto& a : annotations) {
        if (auto why = detail::skip_reason(m, a); !why.empty()) {
            report.skipped.push_back({a, std::move(why)});
            continue;
        }
        const CandidateList cands = enumerate_candidates(a.surface.size(), a.index_set.size(), mode);
        const auto ranked = rank_candidates(m, a.surface, a.feature_class, a.value, cands.sets);
        SegmentRecord rec;
        rec.annotation = a;
        rec.candidates = ranked.size();
        rec.capped = cands.capped;
        rec.top = ranked.front();
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (ranked[i].index_set == a.index_set) {
                rec.rank = i + 1;
                break;
            }
        }
        ++report.evaluated;
        report.capped += rec.capped ? 1 : 0;
        for (std::size_t k = 1; k <= kTopkMax; ++k) report.correct[k - 1] += (rec.rank != 0 && rec.rank <= k) ? 1 : 0;
        report.records.push_back(std::move(rec));
    }
    return report;
}

}  // namespace chardecomp
