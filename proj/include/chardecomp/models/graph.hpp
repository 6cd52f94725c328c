#pragma once

// Differentiable forward passes recorded on a Tape, used for training and
// gradient checking.

#include <span>
#include <vector>

#include "chardecomp/autodiff.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

/// Parameter leaves of one model on one tape. Binding once per tape lets a
/// whole minibatch share the leaves.
struct BoundModel {
    const Model* model = nullptr;
    Var embedding;
    std::vector<Var> bank_weight, bank_bias;
    Var fwd_wx, fwd_wh, fwd_b, bwd_wx, bwd_wh, bwd_b;
    std::vector<Var> head_weight, head_bias;
};

inline BoundModel bind(Tape& tape, Model& m) {
    BoundModel b;
    b.model = &m;
    if (auto* c = std::get_if<CnnWeights>(&m.encoder)) {
        b.embedding = tape.parameter(c->embedding);
        for (auto& bank : c->banks) {
            b.bank_weight.push_back(tape.parameter(bank.weight));
            b.bank_bias.push_back(tape.parameter(bank.bias));
        }
    } else {
        auto& l = std::get<BilstmWeights>(m.encoder);
        b.embedding = tape.parameter(l.embedding);
        b.fwd_wx = tape.parameter(l.forward.input_weight);
        b.fwd_wh = tape.parameter(l.forward.recurrent_weight);
        b.fwd_b = tape.parameter(l.forward.bias);
        b.bwd_wx = tape.parameter(l.backward.input_weight);
        b.bwd_wh = tape.parameter(l.backward.recurrent_weight);
        b.bwd_b = tape.parameter(l.backward.bias);
    }
    for (auto& h : m.heads) {
        b.head_weight.push_back(tape.parameter(h.weight));
        b.head_bias.push_back(tape.parameter(h.bias));
    }
    return b;
}

inline Var cnn_graph(const BoundModel& b, std::span<const int> ids) {
    const CnnWeights& w = b.model->cnn();
    Var x = ad::embed(b.embedding, ids);
    std::vector<Var> pooled;
    for (std::size_t i = 0; i < w.banks.size(); ++i) {
        const std::size_t width = w.banks[i].width;
        Var z = ad::conv1d(x, b.bank_weight[i], b.bank_bias[i], width);
        pooled.push_back(ad::max_over_time(ad::relu(z), pooled_windows(ids, width)));
    }
    return ad::concat(pooled);
}

inline Var lstm_graph(Tape& tape, const Var& x, const Var& wx, const Var& wh, const Var& bias, std::size_t hidden,
                      std::span<const std::size_t> order) {
    const std::size_t H = hidden;
    Var h = tape.constant(Tensor({H}));
    Var c = tape.constant(Tensor({H}));
    for (std::size_t t : order) {
        Var pre = ad::add(ad::affine(wx, ad::row(x, t), bias), ad::affine(wh, h));
        Var i = ad::sigmoid(ad::slice(pre, 0, H));
        Var f = ad::sigmoid(ad::slice(pre, H, H));
        Var g = ad::tanh(ad::slice(pre, 2 * H, H));
        Var o = ad::sigmoid(ad::slice(pre, 3 * H, H));
        c = ad::add(ad::mul(f, c), ad::mul(i, g));
        h = ad::mul(o, ad::tanh(c));
    }
    return h;
}

inline Var bilstm_graph(const BoundModel& b, std::span<const int> ids) {
    Tape& tape = b.embedding.tape();
    const std::size_t H = b.model->bilstm().hidden();
    Var x = ad::embed(b.embedding, ids);
    std::vector<std::size_t> order(ids.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    Var fwd = lstm_graph(tape, x, b.fwd_wx, b.fwd_wh, b.fwd_b, H, order);
    std::reverse(order.begin(), order.end());
    Var bwd = lstm_graph(tape, x, b.bwd_wx, b.bwd_wh, b.bwd_b, H, order);
    const Var parts[] = {fwd, bwd};
    return ad::concat(parts);
}

inline Var representation_graph(const BoundModel& b, std::span<const int> ids) {
    return b.model->architecture == Architecture::Cnn ? cnn_graph(b, ids) : bilstm_graph(b, ids);
}

/// Sum over heads of the softmax cross-entropy of the gold labels.
inline Var joint_loss_graph(const BoundModel& b, const Var& rep, std::span<const std::size_t> gold) {
    std::vector<Var> terms;
    for (std::size_t h = 0; h < b.head_weight.size(); ++h) {
        Var logits = ad::affine(b.head_weight[h], rep, b.head_bias[h]);
        terms.push_back(ad::softmax_cross_entropy(logits, gold[h]));
    }
    return ad::add_n(terms);
}

}  // namespace chardecomp
