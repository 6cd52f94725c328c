#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "chardecomp/corpus/conllu.hpp"
#include "chardecomp/corpus/word.hpp"

namespace chardecomp {

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace detail

/// Reads `surface<TAB>Class=Value<TAB>i,j,k` lines (0-based code-point
/// indices). Lines starting with '#' and blank lines are ignored, as are
/// lemma segments (class "lemma"). With a schema, class and value must exist
/// in it.
inline std::vector<SegmentAnnotation> parse_segmentation(std::istream& in, const FeatureSchema* schema = nullptr) {
    std::vector<SegmentAnnotation> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 3) throw ParseError("expected 3 tab-separated columns", line_no);
        const std::size_t eq = cols[1].find('=');
        if (eq == std::string_view::npos) throw ParseError("feature column must be Class=Value", line_no);
        SegmentAnnotation a;
        a.feature_class = std::string(cols[1].substr(0, eq));
        a.value = std::string(cols[1].substr(eq + 1));
        if (detail::iequals(a.feature_class, "lemma")) continue;
        try {
            a.surface = utf8::decode(cols[0]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (a.surface.empty()) throw ParseError("empty surface", line_no);
        if (schema) {
            const auto cls = schema->class_index(a.feature_class);
            if (!cls) throw ParseError("unknown feature class '" + a.feature_class + "'", line_no);
            if (!schema->classes[*cls].label_index(a.value)) {
                throw ParseError("unknown value '" + a.value + "' for feature class '" + a.feature_class + "'", line_no);
            }
        }
        for (std::string_view tok : detail::split(cols[2], ',')) {
            std::size_t idx = 0;
            const auto* first = tok.data();
            const auto* last = tok.data() + tok.size();
            auto [ptr, ec] = std::from_chars(first, last, idx);
            if (ec != std::errc() || ptr != last || tok.empty()) {
                throw ParseError("bad index '" + std::string(tok) + "'", line_no);
            }
            if (idx >= a.surface.size()) {
                throw ParseError("index " + std::to_string(idx) + " out of range for word of length " +
                                     std::to_string(a.surface.size()),
                                 line_no);
            }
            a.index_set.push_back(idx);
        }
        std::sort(a.index_set.begin(), a.index_set.end());
        a.index_set.erase(std::unique(a.index_set.begin(), a.index_set.end()), a.index_set.end());
        if (a.index_set.empty()) throw ParseError("empty index set", line_no);
        out.push_back(std::move(a));
    }
    return out;
}

inline void write_segmentation(std::ostream& out, const std::vector<SegmentAnnotation>& annotations) {
    for (const auto& a : annotations) {
        out << utf8::encode(a.surface) << '\t' << a.feature_class << '=' << a.value << '\t';
        for (std::size_t i = 0; i < a.index_set.size(); ++i) out << (i ? "," : "") << a.index_set[i];
        out << '\n';
    }
}

/// CoNLL-U rendering of samples (one single-token sentence per word), used to
/// persist generated corpora in the same format real data arrives in.
inline void write_conllu(std::ostream& out, const std::vector<WordSample>& samples) {
    for (const auto& w : samples) {
        std::string feats;
        for (const auto& [name, value] : w.features) {
            if (value == kNotApplicable) continue;
            if (!feats.empty()) feats += '|';
            feats += name + "=" + value;
        }
        if (feats.empty()) feats = "_";
        out << "1\t" << utf8::encode(w.surface) << "\t_\t_\t_\t" << feats << "\t0\troot\t_\t_\n\n";
    }
}

}  // namespace chardecomp
