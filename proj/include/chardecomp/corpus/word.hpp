#pragma once

#include <map>
#include <string>
#include <vector>

#include "chardecomp/corpus/schema.hpp"

namespace chardecomp {

/// A word as a code-point sequence plus one label per schema class.
struct WordSample {
    std::u32string surface;
    std::map<std::string, std::string> features;

    const std::string& label(const std::string& feature_class) const {
        auto it = features.find(feature_class);
        return it == features.end() ? kNotApplicable : it->second;
    }

    friend bool operator==(const WordSample&, const WordSample&) = default;
};

/// A word/feature pair with the character positions (0-based code-point
/// indices into `surface`) that realise the feature.
struct SegmentAnnotation {
    std::u32string surface;
    std::string feature_class;
    std::string value;
    std::vector<std::size_t> index_set;

    friend bool operator==(const SegmentAnnotation&, const SegmentAnnotation&) = default;
};

/// Label index per schema class, NA for classes absent from the sample.
inline std::vector<std::size_t> label_indices(const WordSample& w, const FeatureSchema& schema) {
    std::vector<std::size_t> out;
    out.reserve(schema.classes.size());
    for (const auto& c : schema.classes) {
        auto idx = c.label_index(w.label(c.name));
        if (!idx) throw SchemaError("label '" + w.label(c.name) + "' not in class '" + c.name + "'");
        out.push_back(*idx);
    }
    return out;
}

}  // namespace chardecomp
