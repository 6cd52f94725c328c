#pragma once

// Small rule-driven corpora: random stems plus a suffix drawn from a weighted
// rule list. Each rule assigns one Class=Value; the suffix positions become
// the ground-truth segment for that feature.

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "chardecomp/corpus/conllu.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/tensor.hpp"
#include "chardecomp/utf8.hpp"

namespace chardecomp {

struct SuffixRule {
    std::u32string suffix;  // may be empty
    std::string feature_class;
    std::string value;
    double weight = 1.0;
};

struct ToyRuleset {
    std::vector<SuffixRule> rules;
    /// Characters stems are drawn from. Empty means a-z minus every suffix character.
    std::u32string stem_alphabet;
    std::size_t min_stem = 3;
    std::size_t max_stem = 7;

    std::u32string effective_alphabet() const {
        if (!stem_alphabet.empty()) return stem_alphabet;
        std::set<char32_t> banned;
        for (const auto& r : rules) banned.insert(r.suffix.begin(), r.suffix.end());
        std::u32string out;
        for (char32_t c = U'a'; c <= U'z'; ++c) {
            if (!banned.count(c)) out.push_back(c);
        }
        return out;
    }

    /// One class per distinct rule class, labels NA + rule values in first-seen order.
    FeatureSchema schema(std::string language = "toy") const {
        FeatureSchema s;
        s.language = std::move(language);
        for (const auto& r : rules) {
            auto idx = s.class_index(r.feature_class);
            if (!idx) {
                s.classes.push_back({r.feature_class, {kNotApplicable}});
                idx = s.classes.size() - 1;
            }
            auto& labels = s.classes[*idx].labels;
            if (std::find(labels.begin(), labels.end(), r.value) == labels.end()) labels.push_back(r.value);
        }
        return s;
    }

    /// Line format (tab-separated, '#' comments):
    ///   rule      <suffix or ->  <Class=Value>  <weight>
    ///   alphabet  <characters>
    ///   stem_length <min> <max>
    static ToyRuleset parse(std::istream& in) {
        ToyRuleset rs;
        std::string raw;
        std::size_t line_no = 0;
        auto parse_number = [&](std::string_view tok, auto& out) {
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError("bad number '" + std::string(tok) + "'", line_no);
            }
        };
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string_view line = detail::strip_cr(raw);
            if (line.empty() || line.front() == '#') continue;
            const auto cols = detail::split(line, '\t');
            if (cols[0] == "rule") {
                if (cols.size() != 4) throw ParseError("rule lines need 4 columns", line_no);
                SuffixRule r;
                r.suffix = cols[1] == "-" ? std::u32string() : utf8::decode(cols[1]);
                const auto eq = cols[2].find('=');
                if (eq == std::string_view::npos) throw ParseError("rule feature must be Class=Value", line_no);
                r.feature_class = std::string(cols[2].substr(0, eq));
                r.value = std::string(cols[2].substr(eq + 1));
                parse_number(cols[3], r.weight);
                if (!(r.weight > 0.0)) throw ParseError("rule weight must be positive", line_no);
                rs.rules.push_back(std::move(r));
            } else if (cols[0] == "alphabet") {
                if (cols.size() != 2) throw ParseError("alphabet lines need 2 columns", line_no);
                rs.stem_alphabet = utf8::decode(cols[1]);
            } else if (cols[0] == "stem_length") {
                if (cols.size() != 3) throw ParseError("stem_length lines need 3 columns", line_no);
                parse_number(cols[1], rs.min_stem);
                parse_number(cols[2], rs.max_stem);
                if (rs.min_stem == 0 || rs.min_stem > rs.max_stem) throw ParseError("invalid stem_length range", line_no);
            } else {
                throw ParseError("unknown directive '" + std::string(cols[0]) + "'", line_no);
            }
        }
        return rs;
    }

    static ToyRuleset parse(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }
};

struct ToyCorpus {
    std::vector<WordSample> samples;
    /// Parallel to `samples`; rule index each word was drawn from.
    std::vector<std::size_t> rule_of;
    /// One annotation per word with a non-empty suffix.
    std::vector<SegmentAnnotation> annotations;
};

inline ToyCorpus generate_toy_corpus(const ToyRuleset& ruleset, std::size_t n_words, Rng& rng) {
    if (ruleset.rules.empty()) throw std::invalid_argument("generate_toy_corpus: empty ruleset");
    const std::u32string alphabet = ruleset.effective_alphabet();
    if (alphabet.empty()) throw std::invalid_argument("generate_toy_corpus: empty stem alphabet");
    const FeatureSchema schema = ruleset.schema();
    double total = 0.0;
    for (const auto& r : ruleset.rules) total += r.weight;

    ToyCorpus corpus;
    for (std::size_t n = 0; n < n_words; ++n) {
        double draw = rng.uniform01() * total;
        std::size_t pick = ruleset.rules.size() - 1;
        for (std::size_t i = 0; i < ruleset.rules.size(); ++i) {
            if (draw < ruleset.rules[i].weight) {
                pick = i;
                break;
            }
            draw -= ruleset.rules[i].weight;
        }
        const SuffixRule& rule = ruleset.rules[pick];
        const std::size_t stem_len =
            ruleset.min_stem + static_cast<std::size_t>(rng.below(ruleset.max_stem - ruleset.min_stem + 1));
        WordSample w;
        for (std::size_t i = 0; i < stem_len; ++i) w.surface.push_back(alphabet[rng.below(alphabet.size())]);
        w.surface += rule.suffix;
        for (const auto& c : schema.classes) w.features[c.name] = kNotApplicable;
        w.features[rule.feature_class] = rule.value;
        if (!rule.suffix.empty()) {
            SegmentAnnotation a{w.surface, rule.feature_class, rule.value, {}};
            for (std::size_t i = 0; i < rule.suffix.size(); ++i) a.index_set.push_back(stem_len + i);
            corpus.annotations.push_back(std::move(a));
        }
        corpus.samples.push_back(std::move(w));
        corpus.rule_of.push_back(pick);
    }
    return corpus;
}

/// Deduplicated train/valid/test split of one generated corpus, with the
/// ground-truth annotations of the test words.
struct ToySplits {
    FeatureSchema schema;
    std::vector<WordSample> train;
    std::vector<WordSample> valid;
    std::vector<WordSample> test;
    std::vector<SegmentAnnotation> test_annotations;
};

inline ToySplits make_toy_splits(const ToyRuleset& ruleset, std::size_t n_words, std::uint64_t seed,
                                 double valid_fraction = 0.1, double test_fraction = 0.1) {
    Rng rng(seed);
    ToyCorpus corpus = generate_toy_corpus(ruleset, n_words, rng);
    std::map<std::u32string, SegmentAnnotation> by_surface;
    for (auto& a : corpus.annotations) by_surface.emplace(a.surface, a);
    DedupResult unique = dedupe(std::move(corpus.samples));
    rng.shuffle(unique.samples);
    const std::size_t n = unique.samples.size();
    const auto n_valid = static_cast<std::size_t>(static_cast<double>(n) * valid_fraction);
    const auto n_test = static_cast<std::size_t>(static_cast<double>(n) * test_fraction);
    ToySplits s;
    s.schema = ruleset.schema();
    for (std::size_t i = 0; i < n; ++i) {
        auto& w = unique.samples[i];
        if (i < n_valid) {
            s.valid.push_back(std::move(w));
        } else if (i < n_valid + n_test) {
            auto it = by_surface.find(w.surface);
            if (it != by_surface.end() && w.label(it->second.feature_class) == it->second.value) {
                s.test_annotations.push_back(it->second);
            }
            s.test.push_back(std::move(w));
        } else {
            s.train.push_back(std::move(w));
        }
    }
    return s;
}

}  // namespace chardecomp
