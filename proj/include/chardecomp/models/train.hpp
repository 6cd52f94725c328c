#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/adam.hpp"
#include "chardecomp/corpus/vocab.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/evaluate.hpp"
#include "chardecomp/models/graph.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

struct TrainConfig {
    double lr = 0.001;
    std::size_t batch_size = 20;
    std::size_t max_epochs = 50;
    /// Epochs without a validation improvement before stopping.
    std::size_t patience = 5;
    std::uint64_t seed = 1;
    /// Probability of replacing a singleton training character by the
    /// unknown symbol, so the unknown embedding gets trained.
    double unknown_replace_prob = 0.1;
    /// Stop once validation accuracy reaches this value; the default is unreachable.
    double target_valid_accuracy = 2.0;
    ModelDims dims;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean joint loss per word
    double valid_accuracy = 0.0;
};

struct TrainResult {
    Model model;  // weights of the best validation epoch
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
};

namespace detail {

struct EncodedSample {
    std::vector<int> ids;
    std::vector<std::size_t> gold;
};

inline std::vector<EncodedSample> encode_all(const Model& m, std::span<const WordSample> samples) {
    std::vector<EncodedSample> out;
    out.reserve(samples.size());
    for (const auto& w : samples) out.push_back({m.encode(w.surface), label_indices(w, m.schema)});
    return out;
}

}  // namespace detail

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains a freshly initialised model of `arch` with Adam on minibatches,
/// selecting the epoch with the best mean validation accuracy.
inline TrainResult train(Architecture arch, const FeatureSchema& schema, std::span<const WordSample> train_set,
                         std::span<const WordSample> valid_set, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
    if (train_set.empty() || valid_set.empty()) throw std::invalid_argument("train: train and valid splits required");
    if (cfg.batch_size == 0 || cfg.max_epochs == 0) throw std::invalid_argument("train: batch size and epochs must be positive");
    if (!(cfg.lr >= 0.0)) throw std::invalid_argument("train: learning rate must be non-negative");

    Rng rng(cfg.seed);
    CharVocab vocab = CharVocab::build(train_set);
    Model model = init_model(arch, schema, vocab, cfg.dims, rng);

    std::map<char32_t, std::size_t> char_counts;
    for (const auto& w : train_set) {
        for (char32_t c : w.surface) ++char_counts[c];
    }
    std::vector<bool> singleton(model.vocab.size(), false);
    for (const auto& [c, n] : char_counts) {
        if (n == 1) singleton[static_cast<std::size_t>(model.vocab.id(c))] = true;
    }

    const auto encoded = detail::encode_all(model, train_set);
    std::vector<std::size_t> order(encoded.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Parameter*> params = model.parameters();
    AdamState adam = AdamState::for_parameters(params);
    const AdamConfig adam_cfg{cfg.lr, 0.9, 0.999, 1e-8};
    for (Parameter* p : params) p->zero_grad();

    TrainResult result;
    double best_accuracy = -1.0;
    std::size_t stale = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            Tape tape;
            BoundModel bound = bind(tape, model);
            std::vector<Var> losses;
            try {
                for (std::size_t k = start; k < end; ++k) {
                    const auto& s = encoded[order[k]];
                    std::vector<int> ids = s.ids;
                    for (int& id : ids) {
                        if (!CharVocab::is_reserved(id) && singleton[static_cast<std::size_t>(id)] &&
                            rng.bernoulli(cfg.unknown_replace_prob)) {
                            id = CharVocab::kUnknown;
                        }
                    }
                    losses.push_back(joint_loss_graph(bound, representation_graph(bound, ids), s.gold));
                }
                Var total = ad::scale(ad::add_n(losses), 1.0 / static_cast<double>(end - start));
                loss_sum += total.value()[0] * static_cast<double>(end - start);
                tape.backward(total);
            } catch (const NumericError& e) {
                throw DivergenceError("training diverged in epoch " + std::to_string(epoch) + ", batch starting at " +
                                      std::to_string(start) + ": " + e.what());
            }
            adam_step(params, adam, adam_cfg);
            for (Parameter* p : params) p->zero_grad();
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        if (!std::isfinite(rec.train_loss)) throw DivergenceError("non-finite training loss in epoch " + std::to_string(epoch));
        rec.valid_accuracy = evaluate_accuracy(model, valid_set).average;
        result.history.push_back(rec);
        if (on_epoch) on_epoch(rec);
        if (rec.valid_accuracy > best_accuracy) {
            best_accuracy = rec.valid_accuracy;
            result.best_epoch = epoch;
            result.model = model;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
        if (rec.valid_accuracy >= cfg.target_valid_accuracy) break;
    }
    for (Parameter* p : result.model.parameters()) p->zero_grad();
    return result;
}

}  // namespace chardecomp
