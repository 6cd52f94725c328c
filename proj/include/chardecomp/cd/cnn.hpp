#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chardecomp/cd/linearize.hpp"
#include "chardecomp/corpus/vocab.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp::cd {

/// Positions into the encoded sequence (0 is the start symbol).
using IndexSet = std::vector<std::size_t>;

/// Relevant and irrelevant parts of one layer's output.
struct Decomposition {
    std::vector<double> beta;
    std::vector<double> gamma;
};

/// Membership mask of S over the sequence. Rejects out-of-range and pad positions.
inline std::vector<bool> index_mask(const IndexSet& s, std::span<const int> ids) {
    std::vector<bool> mask(ids.size(), false);
    for (std::size_t p : s) {
        if (p >= ids.size()) {
            throw std::invalid_argument("index set position " + std::to_string(p) + " outside sequence of length " +
                                        std::to_string(ids.size()));
        }
        if (ids[p] == CharVocab::kPad) {
            throw std::invalid_argument("index set position " + std::to_string(p) + " is padding");
        }
        mask[p] = true;
    }
    return mask;
}

struct ConvTerms {
    double beta = 0.0;
    double gamma = 0.0;
    double bias = 0.0;
};

struct ScalarPair {
    double beta = 0.0;
    double gamma = 0.0;
};

/// Window starting at t of one filter over embedded rows `x` (T x d).
/// `w` is the flattened filter, one embedding-sized block per offset.
inline ConvTerms decompose_conv(std::span<const double> w, double bias, std::span<const double> x, std::size_t d,
                                const std::vector<bool>& in_s, std::size_t t) {
    if (d == 0 || w.size() % d != 0) throw std::invalid_argument("decompose_conv: filter size not a multiple of d");
    const std::size_t width = w.size() / d;
    const std::size_t T = x.size() / d;
    if (t + width > T) {
        throw std::out_of_range("decompose_conv: window [" + std::to_string(t) + ", " + std::to_string(t + width - 1) +
                                "] outside sequence of length " + std::to_string(T));
    }
    ConvTerms out;
    out.bias = bias;
    for (std::size_t i = 0; i < width; ++i) {
        const double v = dot(w.data() + i * d, x.data() + (t + i) * d, d);
        (in_s[t + i] ? out.beta : out.gamma) += v;
    }
    return out;
}

/// The bias is attributed to the irrelevant part.
inline ScalarPair decompose_relu(const ConvTerms& z) {
    const auto l = linearize3(z.beta, z.gamma, z.bias, relu);
    return {l[0], l[1] + l[2]};
}

struct PoolChoice {
    ScalarPair value;
    std::size_t position = 0;
};

/// Propagates the pair at the first position with the largest activation.
inline PoolChoice decompose_maxpool(std::span<const ScalarPair> pairs, std::span<const double> activation) {
    if (pairs.empty() || pairs.size() != activation.size()) {
        throw std::invalid_argument("decompose_maxpool: need one activation per nonempty position");
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < activation.size(); ++t) {
        if (activation[t] > activation[best]) best = t;
    }
    return {pairs[best], best};
}

/// Full decomposition of the pooled CNN representation.
inline Decomposition cd_cnn(const CnnWeights& w, std::span<const int> ids, const IndexSet& s) {
    const auto in_s = index_mask(s, ids);
    const std::size_t d = w.embed_dim();
    const std::vector<double> x = detail::embed_rows(w.embedding, ids);
    Decomposition out;
    out.beta.reserve(w.output_dim());
    out.gamma.reserve(w.output_dim());
    std::vector<ScalarPair> pairs;
    std::vector<double> act;
    for (const auto& bank : w.banks) {
        const std::size_t span_len = bank.width * d;
        const std::size_t windows = pooled_windows(ids, bank.width);
        for (std::size_t f = 0; f < bank.count(); ++f) {
            const std::span<const double> filter = bank.weight.value.row(f);
            const double b = bank.bias.value[f];
            pairs.clear();
            act.clear();
            for (std::size_t t = 0; t < windows; ++t) {
                // Same arithmetic as the forward pass so the pooled position agrees.
                act.push_back(relu(dot(filter.data(), x.data() + t * d, span_len) + b));
                pairs.push_back(decompose_relu(decompose_conv(filter, b, x, d, in_s, t)));
            }
            const PoolChoice c = decompose_maxpool(pairs, act);
            out.beta.push_back(c.value.beta);
            out.gamma.push_back(c.value.gamma);
        }
    }
    return out;
}

/// Decomposes one word under many index sets. The pooled window of every
/// filter does not depend on S, so only the per-offset products at that
/// window are kept; results equal cd_cnn bit for bit.
class CnnWordDecomposer {
public:
    CnnWordDecomposer(const CnnWeights& w, std::vector<int> ids) : ids_(std::move(ids)) {
        const std::size_t d = w.embed_dim();
        const std::vector<double> x = detail::embed_rows(w.embedding, ids_);
        const CnnOutput fwd = cnn_forward(w, ids_);
        std::size_t unit = 0;
        for (const auto& bank : w.banks) {
            for (std::size_t f = 0; f < bank.count(); ++f, ++unit) {
                Unit u;
                u.start = fwd.argmax[unit];
                u.width = bank.width;
                u.bias = bank.bias.value[f];
                u.offset_begin = products_.size();
                const double* filter = bank.weight.value.row(f).data();
                for (std::size_t i = 0; i < bank.width; ++i) {
                    products_.push_back(dot(filter + i * d, x.data() + (u.start + i) * d, d));
                }
                units_.push_back(u);
            }
        }
    }

    const std::vector<int>& ids() const { return ids_; }
    std::size_t size() const { return units_.size(); }

    Decomposition operator()(const IndexSet& s) const {
        const auto in_s = index_mask(s, ids_);
        Decomposition out;
        out.beta.resize(units_.size());
        out.gamma.resize(units_.size());
        for (std::size_t k = 0; k < units_.size(); ++k) {
            const Unit& u = units_[k];
            ConvTerms z;
            z.bias = u.bias;
            for (std::size_t i = 0; i < u.width; ++i) {
                (in_s[u.start + i] ? z.beta : z.gamma) += products_[u.offset_begin + i];
            }
            const ScalarPair p = decompose_relu(z);
            out.beta[k] = p.beta;
            out.gamma[k] = p.gamma;
        }
        return out;
    }

private:
    struct Unit {
        std::size_t start = 0;
        std::size_t width = 0;
        std::size_t offset_begin = 0;
        double bias = 0.0;
    };
    std::vector<int> ids_;
    std::vector<Unit> units_;
    std::vector<double> products_;
};

}  // namespace chardecomp::cd
