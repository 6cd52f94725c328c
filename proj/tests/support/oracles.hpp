#pragma once

// Reference implementations written independently of the library: they read
// raw weight tensors and recompute everything with plain loops.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "chardecomp/chardecomp.hpp"

namespace oracle {

using namespace chardecomp;

/// Shares of f(sum) - f(0) by recursion over every ordering of the components.
inline void permute_shares(const std::vector<double>& y, const std::function<double(double)>& f,
                           std::vector<bool>& used, std::vector<std::size_t>& prefix, std::vector<double>& acc,
                           std::size_t& orders) {
    if (prefix.size() == y.size()) {
        double s = 0.0;
        for (std::size_t c : prefix) {
            acc[c] += f(s + y[c]) - f(s);
            s += y[c];
        }
        ++orders;
        return;
    }
    for (std::size_t c = 0; c < y.size(); ++c) {
        if (used[c]) continue;
        used[c] = true;
        prefix.push_back(c);
        permute_shares(y, f, used, prefix, acc, orders);
        prefix.pop_back();
        used[c] = false;
    }
}

inline std::vector<double> brute_linearize(const std::vector<double>& y, const std::function<double(double)>& f) {
    std::vector<bool> used(y.size(), false);
    std::vector<std::size_t> prefix;
    std::vector<double> acc(y.size(), 0.0);
    std::size_t orders = 0;
    permute_shares(y, f, used, prefix, acc, orders);
    for (double& a : acc) a /= static_cast<double>(orders);
    return acc;
}

inline double relu(double v) { return std::max(v, 0.0); }
inline double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Embedding row of id `id`.
inline std::vector<double> embedding_row(const Parameter& table, int id) {
    const std::size_t d = table.value.cols();
    std::vector<double> out(d);
    for (std::size_t k = 0; k < d; ++k) out[k] = table.value(static_cast<std::size_t>(id), k);
    return out;
}

/// Max over non-pad window starts of ReLU(conv), one value per filter.
inline std::vector<double> naive_cnn(const CnnWeights& w, const std::vector<int>& ids) {
    const std::size_t d = w.embed_dim();
    std::size_t real = ids.size();
    while (real > 0 && ids[real - 1] == CharVocab::kPad) --real;
    std::vector<double> out;
    for (const auto& bank : w.banks) {
        const std::size_t starts = std::min(ids.size() - bank.width + 1, real);
        for (std::size_t f = 0; f < bank.count(); ++f) {
            double best = -1.0;
            for (std::size_t t = 0; t < starts; ++t) {
                double z = bank.bias.value[f];
                for (std::size_t i = 0; i < bank.width; ++i) {
                    const auto x = embedding_row(w.embedding, ids[t + i]);
                    for (std::size_t k = 0; k < d; ++k) z += bank.weight.value(f, i * d + k) * x[k];
                }
                best = std::max(best, relu(z));
            }
            out.push_back(best);
        }
    }
    return out;
}

inline std::vector<double> naive_lstm_direction(const LstmCell& cell, const Parameter& table, const std::vector<int>& ids,
                                                bool reverse) {
    const std::size_t H = cell.hidden();
    const std::size_t d = table.value.cols();
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (std::size_t step = 0; step < ids.size(); ++step) {
        const std::size_t t = reverse ? ids.size() - 1 - step : step;
        const auto x = embedding_row(table, ids[t]);
        std::vector<double> pre(4 * H);
        for (std::size_t r = 0; r < 4 * H; ++r) {
            double z = cell.bias.value[r];
            for (std::size_t k = 0; k < d; ++k) z += cell.input_weight.value(r, k) * x[k];
            for (std::size_t k = 0; k < H; ++k) z += cell.recurrent_weight.value(r, k) * h[k];
            pre[r] = z;
        }
        std::vector<double> nh(H);
        for (std::size_t j = 0; j < H; ++j) {
            const double ig = logistic(pre[j]);
            const double fg = logistic(pre[H + j]);
            const double gg = std::tanh(pre[2 * H + j]);
            const double og = logistic(pre[3 * H + j]);
            c[j] = fg * c[j] + ig * gg;
            nh[j] = og * std::tanh(c[j]);
        }
        h = nh;
    }
    return h;
}

inline std::vector<double> naive_bilstm(const BilstmWeights& w, const std::vector<int>& ids) {
    auto out = naive_lstm_direction(w.forward, w.embedding, ids, false);
    const auto back = naive_lstm_direction(w.backward, w.embedding, ids, true);
    out.insert(out.end(), back.begin(), back.end());
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Alphabet "abcdefgh" with one toy class of three labels.
inline FeatureSchema small_schema() {
    FeatureSchema s;
    s.language = "test";
    s.classes.push_back(detail::make_class("Gender", {"Fem", "Masc"}));
    s.classes.push_back(detail::make_class("Number", {"Sing", "Plur"}));
    return s;
}

inline CharVocab small_vocab() { return CharVocab(std::vector<char32_t>(U"abcdefgh", U"abcdefgh" + 8)); }

/// Small model with every parameter drawn from N(0, scale^2) so that no
/// ReLU or gate sits in a degenerate regime.
inline Model random_model(Architecture arch, Rng& rng, double scale = 0.5) {
    ModelDims dims;
    dims.cnn.embed_dim = 4;
    dims.cnn.widths = {1, 2, 3};
    dims.cnn.counts = {3, 2, 2};
    dims.lstm.embed_dim = 4;
    dims.lstm.hidden = 3;
    Model m = init_model(arch, small_schema(), small_vocab(), dims, rng);
    for (Parameter* p : m.parameters()) {
        for (double& v : p->value.data()) v = scale * rng.normal();
    }
    return m;
}

/// Random word over the small vocabulary, occasionally with an unknown character.
inline std::u32string random_word(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 8) {
    const std::size_t n = min_len + static_cast<std::size_t>(rng.below(max_len - min_len + 1));
    std::u32string w;
    for (std::size_t i = 0; i < n; ++i) {
        w.push_back(rng.bernoulli(0.05) ? U'z' : static_cast<char32_t>(U'a' + rng.below(8)));
    }
    return w;
}

/// Random subset of the non-pad positions of `ids`, boundaries included.
inline cd::IndexSet random_subset(Rng& rng, const std::vector<int>& ids) {
    cd::IndexSet s;
    for (std::size_t p = 0; p < ids.size(); ++p) {
        if (ids[p] != CharVocab::kPad && rng.bernoulli(0.4)) s.push_back(p);
    }
    return s;
}

/// Joint loss through the plain (non-tape) forward pass.
inline double plain_loss(const Model& m, const std::vector<int>& ids, const std::vector<std::size_t>& gold) {
    const auto rep = representation(m, ids);
    std::vector<std::vector<double>> logits;
    for (const auto& h : m.heads) logits.push_back(head_logits(h, rep));
    return joint_loss(logits, gold);
}

struct GradCheck {
    double worst = 0.0;
    std::size_t entries = 0;
    std::string where;
};

inline double relative_error(double a, double n) {
    return std::abs(a - n) / std::max({1e-6, std::abs(a), std::abs(n)});
}

/// Tape gradients of the joint loss against central differences with step h.
inline GradCheck gradient_check(Model& m, const std::vector<int>& ids, const std::vector<std::size_t>& gold,
                                double h = 1e-5) {
    for (Parameter* p : m.parameters()) p->zero_grad();
    {
        Tape tape;
        const BoundModel b = bind(tape, m);
        const Var rep = representation_graph(b, ids);
        tape.backward(joint_loss_graph(b, rep, gold));
    }
    GradCheck out;
    for (Parameter* p : m.parameters()) {
        auto values = p->value.data();
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double keep = values[k];
            values[k] = keep + h;
            const double up = plain_loss(m, ids, gold);
            values[k] = keep - h;
            const double down = plain_loss(m, ids, gold);
            values[k] = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double err = relative_error(p->grad.data()[k], numeric);
            ++out.entries;
            if (err > out.worst) {
                out.worst = err;
                out.where = p->name + "[" + std::to_string(k) + "]";
            }
        }
    }
    return out;
}

}  // namespace oracle
