#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

struct AccuracyReport {
    std::vector<std::string> classes;
    std::vector<double> per_class;  // fraction of words whose argmax equals gold
    double average = 0.0;           // mean over heads
    std::size_t words = 0;
};

namespace detail {

inline AccuracyReport finish_report(const FeatureSchema& schema, std::vector<std::size_t> correct, std::size_t words) {
    AccuracyReport r;
    r.words = words;
    for (std::size_t h = 0; h < schema.classes.size(); ++h) {
        r.classes.push_back(schema.classes[h].name);
        r.per_class.push_back(words == 0 ? 0.0 : static_cast<double>(correct[h]) / static_cast<double>(words));
        r.average += r.per_class.back();
    }
    if (!r.per_class.empty()) r.average /= static_cast<double>(r.per_class.size());
    return r;
}

}  // namespace detail

inline AccuracyReport evaluate_accuracy(const Model& m, std::span<const WordSample> words) {
    std::vector<std::size_t> correct(m.schema.classes.size(), 0);
    for (const auto& w : words) {
        const auto gold = label_indices(w, m.schema);
        const auto pred = predict(m, m.encode(w.surface));
        for (std::size_t h = 0; h < gold.size(); ++h) correct[h] += pred[h] == gold[h] ? 1 : 0;
    }
    return detail::finish_report(m.schema, std::move(correct), words.size());
}

/// Most frequent training label per class (ties: earlier label in schema order).
struct MajorityBaseline {
    FeatureSchema schema;
    std::vector<std::size_t> label;
};

inline MajorityBaseline majority_vote(const FeatureSchema& schema, std::span<const WordSample> train) {
    MajorityBaseline b{schema, {}};
    std::vector<std::vector<std::size_t>> counts;
    for (const auto& c : schema.classes) counts.emplace_back(c.labels.size(), 0);
    for (const auto& w : train) {
        const auto gold = label_indices(w, schema);
        for (std::size_t h = 0; h < gold.size(); ++h) ++counts[h][gold[h]];
    }
    for (const auto& c : counts) {
        b.label.push_back(static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin()));
    }
    return b;
}

inline AccuracyReport evaluate_baseline(const MajorityBaseline& b, std::span<const WordSample> words) {
    std::vector<std::size_t> correct(b.schema.classes.size(), 0);
    for (const auto& w : words) {
        const auto gold = label_indices(w, b.schema);
        for (std::size_t h = 0; h < gold.size(); ++h) correct[h] += b.label[h] == gold[h] ? 1 : 0;
    }
    return detail::finish_report(b.schema, std::move(correct), words.size());
}

}  // namespace chardecomp
