#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/utf8.hpp"

namespace chardecomp {

/// Renders encoded positions of `surface` as a pattern: the characters in
/// order, one '_' per skipped position between them, '^' and '$' for the
/// word boundaries.
inline std::string render_pattern(std::u32string_view surface, const cd::IndexSet& encoded) {
    std::string out;
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        const std::size_t p = encoded[i];
        if (i > 0) out.append(p - encoded[i - 1] - 1, '_');
        if (p == 0) {
            out += '^';
        } else if (p == surface.size() + 1) {
            out += '$';
        } else {
            utf8::append(out, surface[p - 1]);
        }
    }
    return out;
}

struct PatternCount {
    std::string pattern;
    std::size_t count = 0;
    double frequency = 0.0;  // count / words
};

struct PatternTable {
    std::size_t length = 0;
    /// Correctly predicted words scanned for this length.
    std::size_t words = 0;
    /// Words whose best set had a non-positive score.
    std::size_t no_positive = 0;
    std::size_t skipped = 0;
    std::vector<PatternCount> patterns;  // most frequent first, ties by pattern
};

struct PatternReport {
    std::string feature_class;
    std::string value;
    std::size_t scanned = 0;
    std::size_t correct = 0;
    std::vector<PatternTable> tables;
};

/// For every test word whose gold and predicted label are Class=Value, finds
/// the highest-scoring character set of each length (boundary markers
/// included as positions) and tallies the rendered patterns.
inline PatternReport pattern_frequency(const Model& m, std::span<const WordSample> words, const std::string& feature_class,
                                       const std::string& value, std::span<const std::size_t> lengths) {
    const ClassTarget target = resolve_target(m.schema, feature_class, value);
    PatternReport report;
    report.feature_class = feature_class;
    report.value = value;
    std::vector<std::map<std::string, std::size_t>> counts(lengths.size());
    for (std::size_t length : lengths) {
        if (length == 0) throw std::invalid_argument("pattern_frequency: lengths must be positive");
        report.tables.push_back(PatternTable{length, 0, 0, 0, {}});
    }
    for (const auto& w : words) {
        ++report.scanned;
        if (w.label(feature_class) != value) continue;
        const auto ids = m.encode(w.surface);
        if (predict(m, ids)[target.head] != target.label) continue;
        ++report.correct;
        const cd::WordDecomposer dec(m, ids);
        const std::size_t positions = w.surface.size() + 2;
        for (std::size_t li = 0; li < lengths.size(); ++li) {
            PatternTable& table = report.tables[li];
            if (lengths[li] > positions) {
                ++table.skipped;
                continue;
            }
            CandidateList cands;
            try {
                cands = enumerate_candidates(positions, lengths[li], CandidateMode::All, 0, true);
            } catch (const CapExceeded&) {
                ++table.skipped;
                continue;
            }
            ++table.words;
            const auto ranked = score_sets(dec, target, cands.sets);
            if (!(ranked.front().contribution.score > 0.0)) {
                ++table.no_positive;
                continue;
            }
            ++counts[li][render_pattern(w.surface, ranked.front().positions)];
        }
    }
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        PatternTable& table = report.tables[li];
        for (const auto& [pattern, n] : counts[li]) {
            table.patterns.push_back({pattern, n, table.words == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(table.words)});
        }
        std::stable_sort(table.patterns.begin(), table.patterns.end(),
                         [](const PatternCount& a, const PatternCount& b) { return a.count > b.count; });
    }
    return report;
}

}  // namespace chardecomp
