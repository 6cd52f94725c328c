#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chardecomp/error.hpp"

namespace chardecomp {

/// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the
/// models need; a scalar is a rank-1 tensor of extent 1.
class Tensor {
public:
    using Shape = std::vector<std::size_t>;

    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0) : shape_(std::move(shape)) {
        validate_shape();
        data_.assign(extent_product(), fill);
    }

    Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        validate_shape();
        if (data_.size() != extent_product()) {
            throw std::invalid_argument("tensor data length does not match shape");
        }
    }

    static Tensor scalar(double value) { return Tensor({1}, std::vector<double>{value}); }

    static Tensor vector(std::vector<double> values) {
        const std::size_t n = values.size();
        return Tensor({n}, std::move(values));
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
        return Tensor({rows, cols}, std::move(values));
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> row(std::size_t r) { return std::span<double>(data_).subspan(r * cols(), cols()); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data_).subspan(r * cols(), cols());
    }

    double item() const {
        if (data_.size() != 1) throw std::invalid_argument("item() on a non-scalar tensor");
        return data_[0];
    }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    void validate_shape() const {
        if (shape_.empty()) throw std::invalid_argument("tensor shape must have at least one extent");
        for (std::size_t e : shape_) {
            if (e == 0) throw std::invalid_argument("tensor extents must be positive");
        }
    }

    std::size_t extent_product() const {
        return std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    }

    Shape shape_;
    std::vector<double> data_;
};

inline std::string shape_string(const Tensor::Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

/// Dot product with four independent accumulators. Summation order is fixed,
/// so results are reproducible run to run.
inline double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return dot(a.data(), b.data(), std::min(a.size(), b.size()));
}

/// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

/// Seeded 64-bit Mersenne Twister (std::mt19937_64). Floating-point draws are
/// derived from the raw 64-bit stream here rather than through the standard
/// distributions, whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        double v = lo + (hi - lo) * uniform01();
        return v < hi ? v : std::nextafter(hi, lo);
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t draw = 0;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Tensor uniform_init(Tensor::Shape shape, double lo, double hi, Rng& rng) {
    if (!(lo < hi)) throw std::invalid_argument("uniform_init requires lo < hi");
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Matrix with orthonormal rows (rows <= cols) or orthonormal columns
/// (rows > cols). Built from the QR factorisation of a Gaussian matrix; the
/// Gram-Schmidt construction below yields the Q whose R has a positive diagonal.
inline Tensor orthogonal_init(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("orthogonal_init requires rows, cols >= 1");
    const bool wide = rows < cols;
    const std::size_t tall_rows = wide ? cols : rows;
    const std::size_t tall_cols = wide ? rows : cols;

    // Columns of the tall matrix, each stored contiguously.
    std::vector<std::vector<double>> columns(tall_cols, std::vector<double>(tall_rows));
    for (auto& column : columns) {
        for (double& v : column) v = rng.normal();
    }
    for (std::size_t j = 0; j < tall_cols; ++j) {
        auto& v = columns[j];
        // Two passes of modified Gram-Schmidt keep the loss of orthogonality
        // at the level of rounding error.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                const double r = dot(columns[i].data(), v.data(), tall_rows);
                axpy(-r, columns[i].data(), v.data(), tall_rows);
            }
        }
        const double norm = std::sqrt(dot(v.data(), v.data(), tall_rows));
        if (!(norm > 1e-12)) throw NumericError("orthogonal_init: rank-deficient Gaussian draw");
        for (double& x : v) x /= norm;
    }

    Tensor out({rows, cols});
    for (std::size_t j = 0; j < tall_cols; ++j) {
        for (std::size_t i = 0; i < tall_rows; ++i) {
            if (wide) {
                out(j, i) = columns[j][i];
            } else {
                out(i, j) = columns[j][i];
            }
        }
    }
    return out;
}

}  // namespace chardecomp
