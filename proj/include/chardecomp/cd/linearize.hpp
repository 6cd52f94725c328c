#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "chardecomp/autodiff.hpp"

namespace chardecomp::cd {

inline constexpr std::size_t kMaxLinearizeComponents = 6;

/// Splits f(y_1 + ... + y_N) - f(0) into one share per component: the share
/// of y_k is f(s + y_k) - f(s) averaged over all N! orders, where s is the sum
/// of the components preceding y_k. Orders are visited lexicographically.
template <class F>
void linearize_activation(std::span<const double> y, F&& f, std::span<double> out) {
    const std::size_t n = y.size();
    if (n > kMaxLinearizeComponents) {
        throw std::invalid_argument("linearize_activation: " + std::to_string(n) + " components exceed the limit of " +
                                    std::to_string(kMaxLinearizeComponents));
    }
    if (out.size() != n) throw std::invalid_argument("linearize_activation: output size mismatch");
    std::array<std::size_t, kMaxLinearizeComponents> perm{};
    std::array<double, kMaxLinearizeComponents> acc{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
    std::size_t count = 0;
    do {
        double s = 0.0;
        double fs = f(0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t c = perm[k];
            const double next = s + y[c];
            const double fnext = f(next);
            acc[c] += fnext - fs;
            s = next;
            fs = fnext;
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n)));
    for (std::size_t k = 0; k < n; ++k) out[k] = acc[k] / static_cast<double>(count);
}

template <class F>
std::vector<double> linearize_activation(std::span<const double> y, F&& f) {
    std::vector<double> out(y.size());
    linearize_activation(y, std::forward<F>(f), std::span<double>(out));
    return out;
}

inline double relu(double v) { return v > 0.0 ? v : 0.0; }
inline double sigmoid(double v) { return ad::sigmoid_value(v); }

/// Shares of (a, b, c) under f.
template <class F>
std::array<double, 3> linearize3(double a, double b, double c, F&& f) {
    const std::array<double, 3> y{a, b, c};
    std::array<double, 3> out{};
    linearize_activation(std::span<const double>(y), std::forward<F>(f), std::span<double>(out));
    return out;
}

template <class F>
std::array<double, 2> linearize2(double a, double b, F&& f) {
    const std::array<double, 2> y{a, b};
    std::array<double, 2> out{};
    linearize_activation(std::span<const double>(y), std::forward<F>(f), std::span<double>(out));
    return out;
}

}  // namespace chardecomp::cd
