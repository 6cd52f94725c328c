#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chardecomp/corpus/schema.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/utf8.hpp"

namespace chardecomp {

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace detail

struct ConlluOptions {
    /// Leading physical lines to drop before parsing (Finnish training file: 520).
    std::size_t skip_lines = 0;
    /// When false, values missing from the schema become NA and are counted
    /// instead of raising.
    bool strict_values = true;
};

struct ConlluStats {
    std::size_t token_rows = 0;
    std::size_t skipped_multiword = 0;
    std::size_t unknown_values = 0;
};

/// One WordSample per token row. Comment lines, blank lines, multi-word
/// token ranges (1-2) and empty nodes (1.1) are skipped; FEATS entries for
/// classes outside the schema are dropped.
inline std::vector<WordSample> parse_conllu(std::istream& in, const FeatureSchema& schema,
                                            const ConlluOptions& options = {}, ConlluStats* stats = nullptr) {
    std::vector<WordSample> out;
    ConlluStats local;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no <= options.skip_lines) continue;
        const std::string_view line = detail::strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 10) {
            throw ParseError("expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no);
        }
        const std::string_view id = cols[0];
        if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
            ++local.skipped_multiword;
            continue;
        }
        WordSample w;
        try {
            w.surface = utf8::decode(cols[1]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (w.surface.empty()) throw ParseError("empty FORM column", line_no);
        for (const auto& c : schema.classes) w.features[c.name] = kNotApplicable;
        if (cols[5] != "_") {
            for (std::string_view feat : detail::split(cols[5], '|')) {
                const std::size_t eq = feat.find('=');
                if (eq == std::string_view::npos) throw ParseError("malformed FEATS entry '" + std::string(feat) + "'", line_no);
                const std::string name(feat.substr(0, eq));
                const std::string value(feat.substr(eq + 1));
                const auto cls = schema.class_index(name);
                if (!cls) continue;
                if (!schema.classes[*cls].label_index(value)) {
                    if (options.strict_values) {
                        throw ParseError("unknown value '" + value + "' for feature class '" + name + "'", line_no);
                    }
                    ++local.unknown_values;
                    continue;
                }
                w.features[name] = value;
            }
        }
        ++local.token_rows;
        out.push_back(std::move(w));
    }
    if (stats) *stats = local;
    return out;
}

struct DedupResult {
    std::vector<WordSample> samples;
    std::size_t duplicates = 0;
    /// Duplicates whose features differ from the kept (first) occurrence.
    std::size_t conflicts = 0;
    std::vector<std::u32string> conflict_surfaces;
};

/// Keeps the first occurrence of each surface form.
inline DedupResult dedupe(std::vector<WordSample> samples) {
    if (samples.empty()) throw std::invalid_argument("dedupe: empty input");
    DedupResult r;
    std::map<std::u32string, std::size_t> first;
    for (auto& w : samples) {
        auto [it, inserted] = first.emplace(w.surface, r.samples.size());
        if (inserted) {
            r.samples.push_back(std::move(w));
            continue;
        }
        ++r.duplicates;
        if (r.samples[it->second].features != w.features) {
            ++r.conflicts;
            r.conflict_surfaces.push_back(w.surface);
        }
    }
    return r;
}

struct CorpusSplits {
    DedupResult train;
    DedupResult valid;
    DedupResult test;
};

/// Deduplicates each split independently.
inline CorpusSplits dedupe_and_split(std::vector<WordSample> train, std::vector<WordSample> valid,
                                     std::vector<WordSample> test) {
    return {dedupe(std::move(train)), dedupe(std::move(valid)), dedupe(std::move(test))};
}

}  // namespace chardecomp
