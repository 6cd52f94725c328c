#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "chardecomp/autodiff.hpp"
#include "chardecomp/tensor.hpp"

namespace chardecomp {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moment accumulators, one pair per parameter, in the order
/// the parameters are passed to adam_step.
struct AdamState {
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step = 0;

    static AdamState for_parameters(std::span<Parameter* const> params) {
        AdamState s;
        for (const Parameter* p : params) {
            s.first_moment.emplace_back(p->value.shape());
            s.second_moment.emplace_back(p->value.shape());
        }
        return s;
    }
};

/// One bias-corrected Adam update using each parameter's accumulated `grad`.
/// lr = 0 is accepted and leaves the parameters unchanged.
inline void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& cfg) {
    if (!(cfg.lr >= 0.0)) throw std::invalid_argument("adam_step: learning rate must be non-negative");
    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
        throw std::invalid_argument("adam_step: state holds a different number of parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Parameter& p = *params[i];
        if (!state.first_moment[i].same_shape(p.value) || !state.second_moment[i].same_shape(p.value) ||
            !p.grad.same_shape(p.value)) {
            throw std::invalid_argument("adam_step: shape mismatch for parameter '" + p.name + "'");
        }
    }
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto w = params[i]->value.data();
        const auto g = params[i]->grad.data();
        auto m = state.first_moment[i].data();
        auto v = state.second_moment[i].data();
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            const double m_hat = m[k] / correction1;
            const double v_hat = v[k] / correction2;
            w[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

}  // namespace chardecomp
