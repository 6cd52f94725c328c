#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/corpus/synthetic.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/train.hpp"

namespace chardecomp {

struct SyntheticExperimentConfig {
    SyntheticConfig injection;
    std::vector<double> levels{1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    TrainConfig training;
};

/// Raw counts of one (level, seed) run over the t=1 test words.
struct SyntheticRun {
    std::uint64_t seed = 0;
    std::uint64_t trained_seed = 0;  // differs from `seed` after a divergence retry
    bool failed = false;             // diverged twice; excluded from the averages
    std::string failure;
    std::size_t best_epoch = 0;
    std::size_t words = 0;
    std::size_t words_with_gt = 0;
    std::size_t predicted = 0;
    std::size_t synthetic_top = 0;
    std::size_t gt_top = 0;
};

struct SyntheticLevel {
    double p_syn = 0.0;
    double prediction_rate = 0.0;
    double synthetic_rate = 0.0;
    double gt_rate = 0.0;
    std::vector<SyntheticRun> runs;
};

struct SyntheticCurves {
    std::vector<SyntheticLevel> levels;
};

namespace detail {

/// Keeps only the target feature so the model has a single binary head.
inline std::vector<WordSample> target_only(std::span<const WordSample> samples, const SyntheticConfig& c) {
    std::vector<WordSample> out;
    for (const auto& w : binary_subset(samples, c)) {
        WordSample r;
        r.surface = w.surface;
        r.features[c.target_class] = w.label(c.target_class);
        out.push_back(std::move(r));
    }
    return out;
}

/// Index of the strictly largest value, or nullopt when the maximum is shared.
inline std::optional<std::size_t> unique_argmax(std::span<const double> v) {
    if (v.empty()) return std::nullopt;
    std::size_t best = 0;
    bool shared = false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
            shared = false;
        } else if (v[i] == v[best]) {
            shared = true;
        }
    }
    if (shared) return std::nullopt;
    return best;
}

}  // namespace detail

inline FeatureSchema synthetic_schema(const SyntheticConfig& c) {
    return FeatureSchema{"synthetic", {FeatureClass{c.target_class, {kNotApplicable, c.positive_value, c.negative_value}}}};
}

/// Scores one trained model on the t=1 test words with the symbol prepended.
/// `ground_truth` maps an (uninjected) surface to its single ground-truth position.
inline SyntheticRun score_synthetic_run(const Model& m, std::span<const WordSample> test, const SyntheticConfig& c,
                                        const std::map<std::u32string, std::size_t>& ground_truth) {
    SyntheticRun run;
    const ClassTarget target = resolve_target(m.schema, c.target_class, c.positive_value);
    for (const auto& w : test) {
        if (!c.is_positive(w)) continue;
        std::u32string surface = w.surface;
        surface.insert(surface.begin(), c.symbol);
        const auto ids = m.encode(surface);
        ++run.words;
        const auto gt = ground_truth.find(w.surface);
        if (gt != ground_truth.end()) ++run.words_with_gt;
        if (predict(m, ids)[target.head] != target.label) continue;
        ++run.predicted;
        const cd::WordDecomposer dec(m, ids);
        const auto top = detail::unique_argmax(singleton_scores(dec, target, surface.size()));
        if (top && *top == 0) ++run.synthetic_top;
        if (top && gt != ground_truth.end() && *top == gt->second + 1) ++run.gt_top;
    }
    return run;
}

using SyntheticProgress = std::function<void(double p_syn, const SyntheticRun&)>;

/// For every level and seed: inject the symbol into train and valid, train a
/// fresh CNN, and score attribution on the injected t=1 test words. Rates are
/// per-seed rates averaged over the seeds that trained successfully.
inline SyntheticCurves synthetic_experiment(std::span<const WordSample> train_set, std::span<const WordSample> valid_set,
                                            std::span<const WordSample> test_set,
                                            std::span<const SegmentAnnotation> annotations,
                                            const SyntheticExperimentConfig& cfg, const SyntheticProgress& progress = {}) {
    const SyntheticConfig& base = cfg.injection;
    const auto train_words = detail::target_only(train_set, base);
    const auto valid_words = detail::target_only(valid_set, base);
    const auto test_words = detail::target_only(test_set, base);
    if (train_words.empty() || valid_words.empty()) {
        throw std::invalid_argument("synthetic_experiment: no words with a binary '" + base.target_class + "' label");
    }
    std::map<std::u32string, std::size_t> ground_truth;
    for (const auto& a : annotations) {
        if (a.feature_class == base.target_class && a.value == base.positive_value && a.index_set.size() == 1) {
            ground_truth.emplace(a.surface, a.index_set.front());
        }
    }
    const FeatureSchema schema = synthetic_schema(base);

    SyntheticCurves curves;
    for (double level : cfg.levels) {
        SyntheticConfig inj = base;
        inj.p_syn = level;
        SyntheticLevel lv;
        lv.p_syn = level;
        std::size_t ok = 0;
        for (std::uint64_t seed : cfg.seeds) {
            SyntheticRun run;
            std::optional<TrainResult> trained;
            std::uint64_t used = seed;
            std::string failure;
            for (int attempt = 0; attempt < 2 && !trained; ++attempt) {
                used = seed + static_cast<std::uint64_t>(attempt) * cfg.seeds.size();
                Rng rng(used);
                const auto tr = inject_synthetic(train_words, inj, rng);
                const auto va = inject_synthetic(valid_words, inj, rng);
                TrainConfig tc = cfg.training;
                tc.seed = used;
                try {
                    trained = train(Architecture::Cnn, schema, tr.samples, va.samples, tc);
                } catch (const DivergenceError& e) {
                    failure = e.what();
                }
            }
            if (trained) {
                run = score_synthetic_run(trained->model, test_words, inj, ground_truth);
                run.best_epoch = trained->best_epoch;
            } else {
                run.failed = true;
                run.failure = failure;
            }
            run.seed = seed;
            run.trained_seed = used;
            if (!run.failed && run.words > 0) {
                const auto n = static_cast<double>(run.words);
                lv.prediction_rate += static_cast<double>(run.predicted) / n;
                lv.synthetic_rate += static_cast<double>(run.synthetic_top) / n;
                if (run.words_with_gt > 0) {
                    lv.gt_rate += static_cast<double>(run.gt_top) / static_cast<double>(run.words_with_gt);
                }
                ++ok;
            }
            if (progress) progress(level, run);
            lv.runs.push_back(std::move(run));
        }
        if (ok > 0) {
            lv.prediction_rate /= static_cast<double>(ok);
            lv.synthetic_rate /= static_cast<double>(ok);
            lv.gt_rate /= static_cast<double>(ok);
        }
        curves.levels.push_back(std::move(lv));
    }
    return curves;
}

}  // namespace chardecomp
