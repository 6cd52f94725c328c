#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chardecomp/cd/cnn.hpp"
#include "chardecomp/cd/lstm.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp::cd {

/// score + gamma_score + bias == logit.
struct ClassContribution {
    double score = 0.0;        // W_j . beta
    double gamma_score = 0.0;  // W_j . gamma
    double bias = 0.0;         // b_j
    double logit = 0.0;
};

inline ClassContribution class_contribution(const ClassifierHead& head, const Decomposition& dec, std::size_t label) {
    const Tensor& W = head.weight.value;
    if (label >= W.rows()) {
        throw std::out_of_range("class_contribution: label index " + std::to_string(label) + " out of range (" +
                                std::to_string(W.rows()) + " labels)");
    }
    if (dec.beta.size() != W.cols() || dec.gamma.size() != W.cols()) {
        throw std::invalid_argument("class_contribution: decomposition has dimension " +
                                    std::to_string(dec.beta.size()) + ", head expects " + std::to_string(W.cols()));
    }
    ClassContribution c;
    c.score = dot(W.row(label), dec.beta);
    c.gamma_score = dot(W.row(label), dec.gamma);
    c.bias = head.bias.value[label];
    c.logit = c.score + c.gamma_score + c.bias;
    return c;
}

/// Architecture-independent decomposer for one word of a model.
class WordDecomposer {
public:
    WordDecomposer(const Model& m, std::vector<int> ids) : model_(&m), impl_(make(m, std::move(ids))) {}

    const Model& model() const { return *model_; }
    const std::vector<int>& ids() const {
        return std::visit([](const auto& d) -> const std::vector<int>& { return d.ids(); }, impl_);
    }

    Decomposition decompose(const IndexSet& s) const {
        return std::visit([&](const auto& d) { return d(s); }, impl_);
    }

    ClassContribution contribution(const IndexSet& s, std::size_t head, std::size_t label) const {
        if (head >= model_->heads.size()) throw std::out_of_range("contribution: head index out of range");
        return class_contribution(model_->heads[head], decompose(s), label);
    }

private:
    using Impl = std::variant<CnnWordDecomposer, LstmWordDecomposer>;

    static Impl make(const Model& m, std::vector<int> ids) {
        if (m.architecture == Architecture::Cnn) return CnnWordDecomposer(m.cnn(), std::move(ids));
        return LstmWordDecomposer(m.bilstm(), std::move(ids));
    }

    const Model* model_;
    Impl impl_;
};

/// Plain decomposition of the representation of `ids` under S.
inline Decomposition decompose(const Model& m, std::span<const int> ids, const IndexSet& s) {
    if (m.architecture == Architecture::Cnn) return cd_cnn(m.cnn(), ids, s);
    return cd_lstm(m.bilstm(), ids, s);
}

}  // namespace chardecomp::cd
