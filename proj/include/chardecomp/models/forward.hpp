#pragma once

// Inference-only forward passes over frozen weights. These are pure
// functions and double as the reference the decomposition is checked against.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "chardecomp/autodiff.hpp"
#include "chardecomp/corpus/vocab.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

namespace detail {

inline std::vector<double> embed_rows(const Parameter& table, std::span<const int> ids) {
    const std::size_t d = table.value.cols();
    std::vector<double> x(ids.size() * d);
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= table.value.rows()) {
            throw std::out_of_range("character id " + std::to_string(ids[t]) + " outside vocabulary");
        }
        auto row = table.value.row(static_cast<std::size_t>(ids[t]));
        std::copy(row.begin(), row.end(), x.begin() + static_cast<std::ptrdiff_t>(t * d));
    }
    return x;
}

}  // namespace detail

struct CnnOutput {
    /// Max-pooled ReLU activations of every filter, banks in order.
    std::vector<double> representation;
    /// Window start chosen by max pooling for each filter (first maximum wins).
    std::vector<std::size_t> argmax;
};

/// Number of window starts that max pooling considers for a filter of width
/// `width`: starts must fit in the sequence and may not be pad positions.
inline std::size_t pooled_windows(std::span<const int> ids, std::size_t width) {
    if (ids.size() < width) {
        throw std::invalid_argument("sequence length " + std::to_string(ids.size()) + " shorter than filter width " +
                                    std::to_string(width));
    }
    return std::min(ids.size() - width + 1, unpadded_length(ids));
}

inline CnnOutput cnn_forward(const CnnWeights& w, std::span<const int> ids) {
    const std::size_t d = w.embed_dim();
    const std::vector<double> x = detail::embed_rows(w.embedding, ids);
    CnnOutput out;
    out.representation.reserve(w.output_dim());
    out.argmax.reserve(w.output_dim());
    for (const auto& bank : w.banks) {
        const std::size_t span_len = bank.width * d;
        const std::size_t windows = pooled_windows(ids, bank.width);
        const double* W = bank.weight.value.data().data();
        for (std::size_t f = 0; f < bank.count(); ++f) {
            double best = 0.0;
            std::size_t best_t = 0;
            for (std::size_t t = 0; t < windows; ++t) {
                const double z = dot(W + f * span_len, x.data() + t * d, span_len) + bank.bias.value[f];
                const double c = z > 0.0 ? z : 0.0;
                if (t == 0 || c > best) {
                    best = c;
                    best_t = t;
                }
            }
            out.representation.push_back(best);
            out.argmax.push_back(best_t);
        }
    }
    return out;
}

inline double sigmoid(double v) { return ad::sigmoid_value(v); }

/// Final hidden state of one LSTM direction run over `order` positions.
inline std::vector<double> lstm_final_state(const LstmCell& cell, const std::vector<double>& x, std::size_t d,
                                            std::span<const std::size_t> order) {
    const std::size_t H = cell.hidden();
    std::vector<double> h(H, 0.0), c(H, 0.0), gates(4 * H);
    const double* Wx = cell.input_weight.value.data().data();
    const double* Wh = cell.recurrent_weight.value.data().data();
    for (std::size_t t : order) {
        for (std::size_t r = 0; r < 4 * H; ++r) {
            gates[r] = dot(Wx + r * d, x.data() + t * d, d) + dot(Wh + r * H, h.data(), H) + cell.bias.value[r];
        }
        for (std::size_t j = 0; j < H; ++j) {
            const double i = sigmoid(gates[j]);
            const double f = sigmoid(gates[H + j]);
            const double g = std::tanh(gates[2 * H + j]);
            const double o = sigmoid(gates[3 * H + j]);
            c[j] = f * c[j] + i * g;
            h[j] = o * std::tanh(c[j]);
        }
    }
    return h;
}

/// Concatenated final forward and backward hidden states.
inline std::vector<double> bilstm_forward(const BilstmWeights& w, std::span<const int> ids) {
    if (ids.empty()) throw std::invalid_argument("bilstm_forward: empty sequence");
    const std::size_t d = w.embed_dim();
    const std::vector<double> x = detail::embed_rows(w.embedding, ids);
    std::vector<std::size_t> order(ids.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::vector<double> out = lstm_final_state(w.forward, x, d, order);
    std::reverse(order.begin(), order.end());
    const std::vector<double> back = lstm_final_state(w.backward, x, d, order);
    out.insert(out.end(), back.begin(), back.end());
    return out;
}

inline std::vector<double> representation(const Model& m, std::span<const int> ids) {
    if (m.architecture == Architecture::Cnn) return cnn_forward(m.cnn(), ids).representation;
    return bilstm_forward(m.bilstm(), ids);
}

/// W x + b for one head.
inline std::vector<double> head_logits(const ClassifierHead& head, std::span<const double> rep) {
    const Tensor& W = head.weight.value;
    if (W.cols() != rep.size()) {
        throw std::invalid_argument("classifier head expects dimension " + std::to_string(W.cols()) + ", got " +
                                    std::to_string(rep.size()));
    }
    std::vector<double> out(W.rows());
    for (std::size_t j = 0; j < W.rows(); ++j) out[j] = dot(W.row(j), rep) + head.bias.value[j];
    return out;
}

inline std::vector<double> softmax(std::span<const double> logits) {
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits[i] - m));
    for (double& v : p) v /= z;
    return p;
}

inline std::size_t argmax(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Per-head probability distributions.
inline std::vector<std::vector<double>> classify(std::span<const ClassifierHead> heads, std::span<const double> rep) {
    std::vector<std::vector<double>> out;
    out.reserve(heads.size());
    for (const auto& h : heads) out.push_back(softmax(head_logits(h, rep)));
    return out;
}

/// Sum over heads of -log p(gold), via log-sum-exp on the logits.
inline double joint_loss(const std::vector<std::vector<double>>& logits, std::span<const std::size_t> gold) {
    if (logits.size() != gold.size()) throw std::invalid_argument("joint_loss: one gold label per head required");
    double loss = 0.0;
    for (std::size_t h = 0; h < logits.size(); ++h) {
        const auto& l = logits[h];
        if (gold[h] >= l.size()) throw std::out_of_range("joint_loss: gold label out of range");
        double m = l[0];
        for (double v : l) m = std::max(m, v);
        double z = 0.0;
        for (double v : l) z += std::exp(v - m);
        loss += m + std::log(z) - l[gold[h]];
    }
    return loss;
}

/// Predicted label index per head.
inline std::vector<std::size_t> predict(const Model& m, std::span<const int> ids) {
    const auto rep = representation(m, ids);
    std::vector<std::size_t> out;
    for (const auto& h : m.heads) out.push_back(argmax(head_logits(h, rep)));
    return out;
}

}  // namespace chardecomp
