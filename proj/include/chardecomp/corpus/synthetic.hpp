#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chardecomp/corpus/word.hpp"
#include "chardecomp/tensor.hpp"

namespace chardecomp {

/// Binary target for the synthetic-token experiment. Words labelled
/// `positive_value` are class t=1, `negative_value` t=0.
struct SyntheticConfig {
    double p_syn = 1.0;
    char32_t symbol = U'‡';
    std::string target_class = "Number";
    std::string positive_value = "Sing";
    std::string negative_value = "Plur";

    bool is_positive(const WordSample& w) const { return w.label(target_class) == positive_value; }
    bool is_binary(const WordSample& w) const {
        const auto& l = w.label(target_class);
        return l == positive_value || l == negative_value;
    }
};

/// Samples whose target label is one of the two binary values.
inline std::vector<WordSample> binary_subset(std::span<const WordSample> samples, const SyntheticConfig& config) {
    std::vector<WordSample> out;
    for (const auto& w : samples) {
        if (config.is_binary(w)) out.push_back(w);
    }
    return out;
}

struct InjectionResult {
    std::vector<WordSample> samples;
    std::vector<bool> injected;
};

/// Prepends the synthetic symbol (as the first real character, inside the
/// word-boundary markers) with probability p_syn for t=1 words and 1 - p_syn
/// for t=0 words, one independent draw per word.
inline InjectionResult inject_synthetic(std::span<const WordSample> samples, const SyntheticConfig& config, Rng& rng) {
    if (!(config.p_syn >= 0.0 && config.p_syn <= 1.0)) {
        throw std::invalid_argument("inject_synthetic: p_syn must lie in [0, 1]");
    }
    InjectionResult r;
    r.samples.reserve(samples.size());
    for (const auto& w : samples) {
        if (!config.is_binary(w)) {
            throw std::invalid_argument("inject_synthetic: word without a binary '" + config.target_class + "' label");
        }
        if (w.surface.find(config.symbol) != std::u32string::npos) {
            throw std::invalid_argument("inject_synthetic: synthetic symbol occurs in the base alphabet");
        }
        const double p = config.is_positive(w) ? config.p_syn : 1.0 - config.p_syn;
        const bool add = rng.bernoulli(p);
        WordSample out = w;
        if (add) out.surface.insert(out.surface.begin(), config.symbol);
        r.samples.push_back(std::move(out));
        r.injected.push_back(add);
    }
    return r;
}

}  // namespace chardecomp
