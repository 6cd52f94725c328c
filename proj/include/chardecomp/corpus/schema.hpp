#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chardecomp/error.hpp"

namespace chardecomp {

/// Label used for a feature class that does not apply to a word.
inline const std::string kNotApplicable = "NA";

struct FeatureClass {
    std::string name;
    /// Ordered label set; always starts with kNotApplicable.
    std::vector<std::string> labels;

    std::optional<std::size_t> label_index(std::string_view label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels.begin());
    }

    friend bool operator==(const FeatureClass&, const FeatureClass&) = default;
};

struct FeatureSchema {
    std::string language;
    std::vector<FeatureClass> classes;

    std::optional<std::size_t> class_index(std::string_view name) const {
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (classes[i].name == name) return i;
        }
        return std::nullopt;
    }

    const FeatureClass& at(std::string_view name) const {
        auto idx = class_index(name);
        if (!idx) throw SchemaError("feature class '" + std::string(name) + "' not in schema " + language);
        return classes[*idx];
    }

    /// Throws SchemaError unless class names are unique and every label set
    /// starts with NA and has unique labels.
    void validate() const {
        std::set<std::string> names;
        for (const auto& c : classes) {
            if (!names.insert(c.name).second) throw SchemaError("duplicate feature class '" + c.name + "'");
            if (c.labels.empty() || c.labels.front() != kNotApplicable) {
                throw SchemaError("feature class '" + c.name + "' must list NA as its first label");
            }
            std::set<std::string> labels(c.labels.begin(), c.labels.end());
            if (labels.size() != c.labels.size()) throw SchemaError("duplicate label in class '" + c.name + "'");
        }
    }

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

namespace detail {

inline FeatureClass make_class(std::string name, std::vector<std::string> values) {
    FeatureClass c{std::move(name), {kNotApplicable}};
    c.labels.insert(c.labels.end(), values.begin(), values.end());
    return c;
}

}  // namespace detail

/// Feature classes and values used for Finnish, Spanish and Swedish.
inline FeatureSchema builtin_schema(std::string_view language) {
    using detail::make_class;
    FeatureSchema s;
    s.language = std::string(language);
    if (language == "fi") {
        s.classes = {
            make_class("Number", {"Sing", "Plur"}),
            make_class("PartForm", {"Past", "Pres", "Agt", "Neg"}),
            make_class("Case", {"Ela", "Ine", "Ins", "Par", "Ill", "Com", "Nom", "All", "Acc", "Ade", "Gen", "Ess",
                                "Abl", "Tra", "Abe"}),
            make_class("Person", {"1", "2", "3"}),
            make_class("Derivation", {"Ja", "Minen", "Sti", "Vs", "Tar", "Llinen", "Inen", "U", "Ttaa", "Ttain",
                                      "Lainen", "Ton"}),
            make_class("Person[psor]", {"1", "2", "3"}),
            make_class("VerbForm", {"Inf", "Part", "Fin"}),
            make_class("Mood", {"Imp", "Cnd", "Pot", "Ind"}),
            make_class("Tense", {"Past", "Pres"}),
            make_class("Clitic", {"Pa,S", "Han", "Ko", "Pa", "Han,Pa", "Han,Ko", "Ko,S", "S", "Kin", "Kaan", "Ka"}),
            make_class("Degree", {"Pos", "Cmp", "Sup"}),
            make_class("Voice", {"Pass", "Act"}),
        };
    } else if (language == "es") {
        s.classes = {
            make_class("Person", {"1", "2", "3"}),
            make_class("Mood", {"Imp", "Ind", "Sub", "Cnd"}),
            make_class("Tense", {"Fut", "Imp", "Pres", "Past"}),
            make_class("Gender", {"Fem", "Masc"}),
            make_class("VerbForm", {"Inf", "Ger", "Part", "Fin"}),
            make_class("Number", {"Sing", "Plur"}),
        };
    } else if (language == "sv") {
        s.classes = {
            make_class("Gender", {"Neut", "Masc", "Fem", "Com"}),
            make_class("Degree", {"Sup", "Cmp", "Pos"}),
            make_class("Number", {"Sing", "Plur"}),
            make_class("Case", {"Gen", "Nom", "Acc"}),
            make_class("Poss", {"Yes"}),
            make_class("Voice", {"Act", "Pass"}),
            make_class("Tense", {"Pres", "Past"}),
            make_class("Definite", {"Ind", "Def"}),
            make_class("VerbForm", {"Sup", "Part", "Inf", "Fin", "Stem"}),
        };
    } else {
        throw SchemaError("no built-in feature schema for language '" + std::string(language) + "'");
    }
    return s;
}

}  // namespace chardecomp
