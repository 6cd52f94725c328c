#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chardecomp/autodiff.hpp"
#include "chardecomp/corpus/schema.hpp"
#include "chardecomp/corpus/vocab.hpp"
#include "chardecomp/tensor.hpp"

namespace chardecomp {

enum class Architecture { Cnn, Bilstm };

inline std::string to_string(Architecture a) { return a == Architecture::Cnn ? "cnn" : "bilstm"; }

inline Architecture parse_architecture(std::string_view s) {
    if (s == "cnn") return Architecture::Cnn;
    if (s == "bilstm") return Architecture::Bilstm;
    throw std::invalid_argument("unknown architecture '" + std::string(s) + "' (expected cnn or bilstm)");
}

struct CnnConfig {
    std::size_t embed_dim = 50;
    std::vector<std::size_t> widths{1, 2, 3, 4, 5, 6};
    std::vector<std::size_t> counts{25, 50, 75, 100, 125, 150};

    std::size_t max_width() const { return *std::max_element(widths.begin(), widths.end()); }
    std::size_t output_dim() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
};

struct LstmConfig {
    std::size_t embed_dim = 50;
    std::size_t hidden = 100;
};

/// `count` filters of one width. Row f of `weight` is filter f flattened as
/// [offset 0 embedding | offset 1 embedding | ...].
struct FilterBank {
    std::size_t width = 0;
    Parameter weight;  // count x (width * embed_dim)
    Parameter bias;    // count

    std::size_t count() const { return weight.value.rows(); }
};

struct CnnWeights {
    Parameter embedding;  // vocab x embed_dim
    std::vector<FilterBank> banks;

    std::size_t embed_dim() const { return embedding.value.cols(); }
    std::size_t output_dim() const {
        std::size_t d = 0;
        for (const auto& b : banks) d += b.count();
        return d;
    }
    std::size_t max_width() const {
        std::size_t w = 0;
        for (const auto& b : banks) w = std::max(w, b.width);
        return w;
    }
};

/// Gate blocks are stacked [input, forget, cell candidate, output].
struct LstmCell {
    Parameter input_weight;      // 4H x embed_dim
    Parameter recurrent_weight;  // 4H x H
    Parameter bias;              // 4H

    std::size_t hidden() const { return recurrent_weight.value.cols(); }
};

struct BilstmWeights {
    Parameter embedding;
    LstmCell forward;
    LstmCell backward;

    std::size_t embed_dim() const { return embedding.value.cols(); }
    std::size_t hidden() const { return forward.hidden(); }
    std::size_t output_dim() const { return 2 * hidden(); }
};

/// One multinomial logistic regression layer per feature class. Row j of
/// `weight` scores label j.
struct ClassifierHead {
    Parameter weight;  // labels x d2
    Parameter bias;    // labels
};

struct Model {
    Architecture architecture = Architecture::Cnn;
    FeatureSchema schema;
    CharVocab vocab;
    std::variant<CnnWeights, BilstmWeights> encoder;
    std::vector<ClassifierHead> heads;

    const CnnWeights& cnn() const { return std::get<CnnWeights>(encoder); }
    const BilstmWeights& bilstm() const { return std::get<BilstmWeights>(encoder); }

    std::size_t representation_dim() const {
        return std::visit([](const auto& e) { return e.output_dim(); }, encoder);
    }

    /// Minimum encoded length: the widest filter for the CNN, none for the BiLSTM.
    std::size_t min_length() const { return architecture == Architecture::Cnn ? cnn().max_width() : 0; }

    std::vector<int> encode(std::u32string_view surface) const { return encode_word(surface, vocab, min_length()); }

    /// All trainable parameters in a fixed canonical order.
    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out;
        if (auto* c = std::get_if<CnnWeights>(&encoder)) {
            out.push_back(&c->embedding);
            for (auto& b : c->banks) {
                out.push_back(&b.weight);
                out.push_back(&b.bias);
            }
        } else {
            auto& l = std::get<BilstmWeights>(encoder);
            out.push_back(&l.embedding);
            for (LstmCell* cell : {&l.forward, &l.backward}) {
                out.push_back(&cell->input_weight);
                out.push_back(&cell->recurrent_weight);
                out.push_back(&cell->bias);
            }
        }
        for (auto& h : heads) {
            out.push_back(&h.weight);
            out.push_back(&h.bias);
        }
        return out;
    }

    std::vector<const Parameter*> parameters() const {
        auto ps = const_cast<Model*>(this)->parameters();
        return {ps.begin(), ps.end()};
    }
};

inline CnnWeights init_cnn(std::size_t vocab_size, const CnnConfig& cfg, Rng& rng) {
    if (cfg.widths.size() != cfg.counts.size() || cfg.widths.empty()) {
        throw std::invalid_argument("CnnConfig: widths and counts must be non-empty and equally long");
    }
    CnnWeights w;
    w.embedding = Parameter("embedding", uniform_init({vocab_size, cfg.embed_dim}, -0.01, 0.01, rng));
    for (std::size_t i = 0; i < cfg.widths.size(); ++i) {
        const std::size_t n = cfg.widths[i], k = cfg.counts[i];
        if (n == 0 || k == 0) throw std::invalid_argument("CnnConfig: widths and counts must be positive");
        FilterBank b;
        b.width = n;
        const std::string prefix = "conv" + std::to_string(n);
        b.weight = Parameter(prefix + ".weight", orthogonal_init(k, n * cfg.embed_dim, rng));
        b.bias = Parameter(prefix + ".bias", Tensor({k}));
        w.banks.push_back(std::move(b));
    }
    return w;
}

inline LstmCell init_lstm_cell(const std::string& prefix, std::size_t input_dim, std::size_t hidden, Rng& rng) {
    LstmCell c;
    c.input_weight = Parameter(prefix + ".input_weight", orthogonal_init(4 * hidden, input_dim, rng));
    c.recurrent_weight = Parameter(prefix + ".recurrent_weight", orthogonal_init(4 * hidden, hidden, rng));
    c.bias = Parameter(prefix + ".bias", Tensor({4 * hidden}));
    return c;
}

inline BilstmWeights init_bilstm(std::size_t vocab_size, const LstmConfig& cfg, Rng& rng) {
    if (cfg.embed_dim == 0 || cfg.hidden == 0) throw std::invalid_argument("LstmConfig: dimensions must be positive");
    BilstmWeights w;
    w.embedding = Parameter("embedding", uniform_init({vocab_size, cfg.embed_dim}, -0.01, 0.01, rng));
    w.forward = init_lstm_cell("lstm.forward", cfg.embed_dim, cfg.hidden, rng);
    w.backward = init_lstm_cell("lstm.backward", cfg.embed_dim, cfg.hidden, rng);
    return w;
}

inline std::vector<ClassifierHead> init_heads(const FeatureSchema& schema, std::size_t input_dim, Rng& rng) {
    std::vector<ClassifierHead> heads;
    for (const auto& c : schema.classes) {
        ClassifierHead h;
        h.weight = Parameter("head." + c.name + ".weight", orthogonal_init(c.labels.size(), input_dim, rng));
        h.bias = Parameter("head." + c.name + ".bias", Tensor({c.labels.size()}));
        heads.push_back(std::move(h));
    }
    return heads;
}

struct ModelDims {
    CnnConfig cnn;
    LstmConfig lstm;
};

/// Freshly initialised model: embeddings uniform in [-0.01, 0.01), weight
/// matrices orthogonal, biases zero.
inline Model init_model(Architecture arch, FeatureSchema schema, CharVocab vocab, const ModelDims& dims, Rng& rng) {
    schema.validate();
    Model m;
    m.architecture = arch;
    m.schema = std::move(schema);
    m.vocab = std::move(vocab);
    if (arch == Architecture::Cnn) {
        m.encoder = init_cnn(m.vocab.size(), dims.cnn, rng);
    } else {
        m.encoder = init_bilstm(m.vocab.size(), dims.lstm, rng);
    }
    m.heads = init_heads(m.schema, m.representation_dim(), rng);
    return m;
}

}  // namespace chardecomp
