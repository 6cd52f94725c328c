#pragma once

// JSON forms of the reports. Keys keep insertion order so output is stable.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chardecomp/attribution/interaction.hpp"
#include "chardecomp/attribution/patterns.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/attribution/segeval.hpp"
#include "chardecomp/attribution/synthetic_experiment.hpp"
#include "chardecomp/corpus/schema.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/evaluate.hpp"
#include "chardecomp/models/train.hpp"
#include "chardecomp/utf8.hpp"

namespace chardecomp::report {

using Json = nlohmann::ordered_json;

inline Json attribution_record(std::u32string_view word, const AttributionResult& r) {
    Json j;
    j["word"] = utf8::encode(word);
    j["class"] = r.feature_class;
    j["value"] = r.value;
    j["index_set"] = r.index_set;
    j["beta_score"] = r.score;
    j["gamma_score"] = r.gamma_score;
    j["logit"] = r.logit;
    return j;
}

inline Json schema_json(const FeatureSchema& s) {
    Json j;
    j["language"] = s.language;
    Json classes = Json::array();
    for (const auto& c : s.classes) classes.push_back(Json{{"name", c.name}, {"labels", c.labels}});
    j["classes"] = classes;
    return j;
}

inline FeatureSchema schema_from_json(const nlohmann::json& j) {
    try {
        FeatureSchema s;
        s.language = j.at("language").get<std::string>();
        for (const auto& c : j.at("classes")) {
            s.classes.push_back({c.at("name").get<std::string>(), c.at("labels").get<std::vector<std::string>>()});
        }
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("schema file: ") + e.what());
    }
}

inline FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file '" + path + "'");
    try {
        return schema_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("schema file '" + path + "': " + e.what());
    }
}

inline Json accuracy_json(const std::string& name, const AccuracyReport& r) {
    Json j;
    j["record"] = "accuracy";
    j["system"] = name;
    j["words"] = r.words;
    Json per = Json::object();
    for (std::size_t i = 0; i < r.classes.size(); ++i) per[r.classes[i]] = r.per_class[i];
    j["per_class"] = per;
    j["average"] = r.average;
    return j;
}

inline Json epoch_json(const EpochRecord& e) {
    return Json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"valid_accuracy", e.valid_accuracy}};
}

inline std::vector<Json> topk_json(const TopkReport& r) {
    std::vector<Json> out;
    for (const auto& rec : r.records) {
        Json j;
        j["record"] = "annotation";
        j["word"] = utf8::encode(rec.annotation.surface);
        j["class"] = rec.annotation.feature_class;
        j["value"] = rec.annotation.value;
        j["index_set"] = rec.annotation.index_set;
        j["rank"] = rec.rank;
        j["candidates"] = rec.candidates;
        j["capped"] = rec.capped;
        j["top_index_set"] = rec.top.index_set;
        j["top_beta_score"] = rec.top.score;
        out.push_back(std::move(j));
    }
    for (const auto& s : r.skipped) {
        Json j;
        j["record"] = "skipped";
        j["word"] = utf8::encode(s.annotation.surface);
        j["class"] = s.annotation.feature_class;
        j["value"] = s.annotation.value;
        j["reason"] = s.reason;
        out.push_back(std::move(j));
    }
    Json sum;
    sum["record"] = "summary";
    sum["mode"] = to_string(r.mode);
    sum["evaluated"] = r.evaluated;
    sum["skipped"] = r.skipped.size();
    sum["capped"] = r.capped;
    for (std::size_t k = 1; k <= kTopkMax; ++k) {
        sum["top" + std::to_string(k)] = r.correct[k - 1];
        sum["top" + std::to_string(k) + "_rate"] = r.rate(k);
    }
    out.push_back(std::move(sum));
    return out;
}

inline std::vector<Json> patterns_json(const PatternReport& r) {
    std::vector<Json> out;
    for (const auto& t : r.tables) {
        Json j;
        j["record"] = "patterns";
        j["class"] = r.feature_class;
        j["value"] = r.value;
        j["length"] = t.length;
        j["words"] = t.words;
        j["no_positive"] = t.no_positive;
        j["skipped"] = t.skipped;
        Json ps = Json::array();
        for (const auto& p : t.patterns) ps.push_back(Json{{"pattern", p.pattern}, {"count", p.count}, {"frequency", p.frequency}});
        j["patterns"] = ps;
        out.push_back(std::move(j));
    }
    Json sum;
    sum["record"] = "summary";
    sum["scanned"] = r.scanned;
    sum["correctly_predicted"] = r.correct;
    out.push_back(std::move(sum));
    return out;
}

inline std::vector<Json> synthetic_json(const SyntheticCurves& c, const SyntheticConfig& base) {
    std::vector<Json> out;
    for (const auto& lv : c.levels) {
        for (const auto& run : lv.runs) {
            Json j;
            j["record"] = "run";
            j["p_syn"] = lv.p_syn;
            j["seed"] = run.seed;
            j["trained_seed"] = run.trained_seed;
            j["failed"] = run.failed;
            if (run.failed) j["failure"] = run.failure;
            j["best_epoch"] = run.best_epoch;
            j["words"] = run.words;
            j["words_with_gt"] = run.words_with_gt;
            j["predicted"] = run.predicted;
            j["synthetic_top"] = run.synthetic_top;
            j["gt_top"] = run.gt_top;
            out.push_back(std::move(j));
        }
        Json j;
        j["record"] = "level";
        j["p_syn"] = lv.p_syn;
        j["prediction_rate"] = lv.prediction_rate;
        j["synthetic_rate"] = lv.synthetic_rate;
        j["gt_rate"] = lv.gt_rate;
        out.push_back(std::move(j));
    }
    Json note;
    note["record"] = "note";
    note["target"] = base.target_class + ": t=1 is " + base.positive_value + ", t=0 is " + base.negative_value;
    note["placement"] = "synthetic symbol " + utf8::encode(base.symbol) +
                        " is the first real character; the start marker stays outermost";
    out.push_back(std::move(note));
    return out;
}

inline Json group_test_json(const GroupTest& t) {
    Json j;
    if (!t.skipped.empty()) {
        j["skipped"] = t.skipped;
        return j;
    }
    j["groups"] = t.groups;
    j["H"] = t.kruskal.h;
    j["df"] = t.kruskal.df;
    j["p"] = t.kruskal.p;
    j["degenerate"] = t.kruskal.degenerate;
    Json pairs = Json::array();
    for (const auto& p : t.pairwise) {
        pairs.push_back(Json{{"a", p.a}, {"b", p.b}, {"z", p.z}, {"p", p.p}, {"p_adjusted", p.p_adjusted},
                             {"degenerate", p.degenerate}});
    }
    j["pairwise"] = pairs;
    j["method"] = "Kruskal-Wallis with tie correction; Dunn pairwise z on mean ranks, Bonferroni adjusted";
    return j;
}

inline std::vector<Json> interaction_json(const InteractionReport& r) {
    std::vector<Json> out;
    for (const auto& w : r.words) {
        Json j;
        j["record"] = "word";
        j["word"] = utf8::encode(w.surface);
        j["group"] = w.group;
        j["max_score"] = w.max_score;
        j["max_set"] = w.max_set;
        j["min_score"] = w.min_score;
        j["min_set"] = w.min_set;
        j["capped"] = w.capped;
        out.push_back(std::move(j));
    }
    for (const auto& g : r.groups) {
        out.push_back(Json{{"record", "group"}, {"group", g.name}, {"size", g.size}, {"mean_max", g.mean_max},
                           {"mean_min", g.mean_min}});
    }
    Json sum;
    sum["record"] = "tests";
    sum["class"] = r.selector.feature_class;
    sum["value"] = r.selector.value;
    sum["suffix"] = utf8::encode(r.selector.suffix);
    sum["max_scores"] = group_test_json(r.max_test);
    sum["min_scores"] = group_test_json(r.min_test);
    sum["notices"] = r.notices;
    out.push_back(std::move(sum));
    return out;
}

inline std::string to_jsonl(const std::vector<Json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

}  // namespace chardecomp::report
