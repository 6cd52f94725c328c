#pragma once

// Decomposition of the BiLSTM final state. Each gate preactivation is split
// into a relevant part (inputs in S plus the relevant recurrent state), an
// irrelevant part and the bias; gates are linearized over those three parts.
// Products go to beta when every factor is relevant or bias-derived with at
// least one relevant factor; any product with an irrelevant factor, and the
// bias-only products, go to gamma.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "chardecomp/cd/cnn.hpp"
#include "chardecomp/cd/linearize.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp::cd {

namespace detail {

inline double tanh_fn(double v) { return std::tanh(v); }

/// Gate value split as (relevant, irrelevant, bias); the parts sum to the gate.
struct GateParts {
    double beta = 0.0;
    double gamma = 0.0;
    double bias = 0.0;
    double total() const { return beta + gamma + bias; }
};

inline GateParts sigmoid_gate(double b, double g, double bias) {
    const auto l = linearize3(b, g, bias, sigmoid);
    return {l[0], l[1], l[2] + sigmoid(0.0)};
}

inline GateParts tanh_gate(double b, double g, double bias) {
    const auto l = linearize3(b, g, bias, tanh_fn);
    return {l[0], l[1], l[2]};
}

/// One direction; `xw` holds Wx x_t for every position (T x 4H).
inline void cd_lstm_direction(const LstmCell& cell, const std::vector<double>& xw, const std::vector<bool>& in_s,
                              std::span<const std::size_t> order, std::vector<double>& beta_h,
                              std::vector<double>& gamma_h) {
    const std::size_t H = cell.hidden();
    const double* Wh = cell.recurrent_weight.value.data().data();
    const auto& bias = cell.bias.value;
    beta_h.assign(H, 0.0);
    gamma_h.assign(H, 0.0);
    std::vector<double> beta_c(H, 0.0), gamma_c(H, 0.0), beta_pre(4 * H), gamma_pre(4 * H);
    for (std::size_t t : order) {
        const double* x_row = xw.data() + t * 4 * H;
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double rb = dot(Wh + r * H, beta_h.data(), H);
            const double rg = dot(Wh + r * H, gamma_h.data(), H);
            beta_pre[r] = (in_s[t] ? x_row[r] : 0.0) + rb;
            gamma_pre[r] = (in_s[t] ? 0.0 : x_row[r]) + rg;
        }
        for (std::size_t j = 0; j < H; ++j) {
            const GateParts i = sigmoid_gate(beta_pre[j], gamma_pre[j], bias[j]);
            const GateParts f = sigmoid_gate(beta_pre[H + j], gamma_pre[H + j], bias[H + j]);
            const GateParts g = tanh_gate(beta_pre[2 * H + j], gamma_pre[2 * H + j], bias[2 * H + j]);
            const GateParts o = sigmoid_gate(beta_pre[3 * H + j], gamma_pre[3 * H + j], bias[3 * H + j]);

            const double bc = beta_c[j], gc = gamma_c[j];
            const double new_beta = (f.beta + f.bias) * bc + i.beta * g.beta + i.beta * g.bias + i.bias * g.beta;
            const double new_gamma = f.gamma * (bc + gc) + (f.beta + f.bias) * gc + i.gamma * g.total() +
                                     (i.beta + i.bias) * g.gamma + i.bias * g.bias;
            beta_c[j] = new_beta;
            gamma_c[j] = new_gamma;

            const auto tc = linearize2(new_beta, new_gamma, tanh_fn);
            beta_h[j] = (o.beta + o.bias) * tc[0];
            gamma_h[j] = o.gamma * tc[0] + o.total() * tc[1];
        }
    }
}

inline std::vector<double> input_projection(const LstmCell& cell, const std::vector<double>& x, std::size_t d) {
    const std::size_t rows = 4 * cell.hidden();
    const std::size_t T = x.size() / d;
    const double* Wx = cell.input_weight.value.data().data();
    std::vector<double> out(T * rows);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t r = 0; r < rows; ++r) out[t * rows + r] = dot(Wx + r * d, x.data() + t * d, d);
    }
    return out;
}

}  // namespace detail

/// Decomposes one word under many index sets, reusing the input projections.
class LstmWordDecomposer {
public:
    LstmWordDecomposer(const BilstmWeights& w, std::vector<int> ids) : weights_(&w), ids_(std::move(ids)) {
        if (ids_.empty()) throw std::invalid_argument("cd_lstm: empty sequence");
        const std::vector<double> x = chardecomp::detail::embed_rows(w.embedding, ids_);
        fwd_proj_ = detail::input_projection(w.forward, x, w.embed_dim());
        bwd_proj_ = detail::input_projection(w.backward, x, w.embed_dim());
    }

    const std::vector<int>& ids() const { return ids_; }

    Decomposition operator()(const IndexSet& s) const {
        const auto in_s = index_mask(s, ids_);
        std::vector<std::size_t> order(ids_.size());
        for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
        Decomposition out;
        std::vector<double> b, g;
        detail::cd_lstm_direction(weights_->forward, fwd_proj_, in_s, order, out.beta, out.gamma);
        std::reverse(order.begin(), order.end());
        detail::cd_lstm_direction(weights_->backward, bwd_proj_, in_s, order, b, g);
        out.beta.insert(out.beta.end(), b.begin(), b.end());
        out.gamma.insert(out.gamma.end(), g.begin(), g.end());
        return out;
    }

private:
    const BilstmWeights* weights_;
    std::vector<int> ids_;
    std::vector<double> fwd_proj_, bwd_proj_;
};

inline Decomposition cd_lstm(const BilstmWeights& w, std::span<const int> ids, const IndexSet& s) {
    return LstmWordDecomposer(w, std::vector<int>(ids.begin(), ids.end()))(s);
}

}  // namespace chardecomp::cd
