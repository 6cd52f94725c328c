#pragma once

// Tape-based reverse-mode differentiation over the fixed op set the two
// word encoders need. A Tape lives for one forward/backward pass and is
// confined to a single thread.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chardecomp/error.hpp"
#include "chardecomp/tensor.hpp"

namespace chardecomp {

/// Trainable tensor plus its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

    void zero_grad() {
        if (!grad.same_shape(value)) {
            grad = Tensor(value.shape());
        } else {
            grad.fill(0.0);
        }
    }
};

class Tape;

class Var {
public:
    Var() = default;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    const Tensor& value() const;
    std::size_t id() const noexcept { return id_; }
    Tape& tape() const { return *tape_; }

private:
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

struct BackwardReport {
    /// Parameters recorded on the tape that the loss does not depend on.
    /// Their gradients are left untouched (zero contribution).
    std::vector<std::string> unreachable;
};

class Tape {
public:
    using Backprop = std::function<void(Tape&, std::size_t self)>;

    Var constant(Tensor value) { return record(std::move(value), {}, nullptr, "constant", false); }

    Var parameter(Parameter& p) {
        Var v = record(p.value, {}, nullptr, "parameter", true);
        nodes_.back().param = &p;
        return v;
    }

    /// Appends a node. `op` names the operation in non-finite diagnostics.
    Var record(Tensor value, std::vector<std::size_t> inputs, Backprop backprop, const char* op) {
        bool needs = false;
        for (std::size_t in : inputs) needs = needs || nodes_[in].requires_grad;
        return record(std::move(value), std::move(inputs), std::move(backprop), op, needs);
    }

    const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }

    /// Gradient buffer of a node, allocated as zeros on first use.
    Tensor& grad(std::size_t id) {
        Node& n = nodes_[id];
        if (n.grad.empty()) n.grad = Tensor(n.value.shape());
        return n.grad;
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    /// Propagates d(loss)/d(node) back through the tape and adds the result
    /// into each recorded Parameter's `grad`.
    BackwardReport backward(const Var& loss) {
        if (&loss.tape() != this) throw std::invalid_argument("backward: loss belongs to another tape");
        if (nodes_[loss.id()].value.size() != 1) {
            throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                        shape_string(nodes_[loss.id()].value.shape()));
        }
        grad(loss.id())[0] = 1.0;
        for (std::size_t i = loss.id() + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (n.grad.empty() || !n.backprop) continue;
            n.backprop(*this, i);
        }
        BackwardReport report;
        for (Node& n : nodes_) {
            if (n.param == nullptr) continue;
            if (n.grad.empty()) {
                report.unreachable.push_back(n.param->name);
                continue;
            }
            Tensor& g = n.param->grad;
            if (!g.same_shape(n.value)) g = Tensor(n.value.shape());
            auto src = n.grad.data();
            auto dst = g.data();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
        return report;
    }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<std::size_t> inputs;
        Backprop backprop;
        Parameter* param = nullptr;
        bool requires_grad = false;
    };

    Var record(Tensor value, std::vector<std::size_t> inputs, Backprop backprop, const char* op, bool needs) {
        if (!value.all_finite()) throw NumericError(std::string(op) + " produced a non-finite value");
        Node n;
        n.value = std::move(value);
        n.inputs = std::move(inputs);
        n.requires_grad = needs;
        if (needs) n.backprop = std::move(backprop);
        nodes_.push_back(std::move(n));
        return Var(this, nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

namespace ad {

namespace detail {

inline void require_same_tape(const Var& a, const Var& b) {
    if (&a.tape() != &b.tape()) throw std::invalid_argument("vars belong to different tapes");
}

inline void accumulate(Tape& tape, std::size_t id, std::span<const double> delta, double scale = 1.0) {
    if (!tape.requires_grad(id)) return;
    auto g = tape.grad(id).data();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * delta[i];
}

template <typename F, typename D>
Var elementwise(const Var& x, F f, D derivative_from_output, const char* op) {
    Tape& tape = x.tape();
    Tensor out = x.value();
    for (double& v : out.data()) v = f(v);
    const std::size_t in = x.id();
    return tape.record(std::move(out), {in},
                       [in, derivative_from_output](Tape& t, std::size_t self) {
                           if (!t.requires_grad(in)) return;
                           const auto y = t.value(self).data();
                           const auto x_val = t.value(in).data();
                           const Tensor& gy = t.grad(self);
                           auto gx = t.grad(in).data();
                           for (std::size_t i = 0; i < gx.size(); ++i) {
                               gx[i] += gy[i] * derivative_from_output(x_val[i], y[i]);
                           }
                       },
                       op);
}

}  // namespace detail

inline Var add(const Var& a, const Var& b) {
    detail::require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) throw std::invalid_argument("add: shape mismatch");
    Tensor out = a.value();
    auto bd = b.value().data();
    auto od = out.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] += bd[i];
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib},
                           [ia, ib](Tape& t, std::size_t self) {
                               const Tensor& g = t.grad(self);
                               detail::accumulate(t, ia, g.data());
                               detail::accumulate(t, ib, g.data());
                           },
                           "add");
}

inline Var mul(const Var& a, const Var& b) {
    detail::require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) throw std::invalid_argument("mul: shape mismatch");
    Tensor out = a.value();
    auto bd = b.value().data();
    auto od = out.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] *= bd[i];
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib},
                           [ia, ib](Tape& t, std::size_t self) {
                               const Tensor& g = t.grad(self);
                               const auto av = t.value(ia).data();
                               const auto bv = t.value(ib).data();
                               if (t.requires_grad(ia)) {
                                   auto ga = t.grad(ia).data();
                                   for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * bv[i];
                               }
                               if (t.requires_grad(ib)) {
                                   auto gb = t.grad(ib).data();
                                   for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * av[i];
                               }
                           },
                           "mul");
}

inline Var scale(const Var& a, double c) {
    Tensor out = a.value();
    for (double& v : out.data()) v *= c;
    const std::size_t ia = a.id();
    return a.tape().record(std::move(out), {ia},
                           [ia, c](Tape& t, std::size_t self) {
                               const Tensor& g = t.grad(self);
                               detail::accumulate(t, ia, g.data(), c);
                           },
                           "scale");
}

/// Sum of all elements, as a scalar.
inline Var sum(const Var& a) {
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    const std::size_t ia = a.id();
    return a.tape().record(Tensor::scalar(s), {ia},
                           [ia](Tape& t, std::size_t self) {
                               if (!t.requires_grad(ia)) return;
                               const double g = t.grad(self)[0];
                               for (double& v : t.grad(ia).data()) v += g;
                           },
                           "sum");
}

/// Sum of equally-shaped vars.
inline Var add_n(std::span<const Var> terms) {
    if (terms.empty()) throw std::invalid_argument("add_n: no terms");
    Var acc = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
    return acc;
}

inline Var relu(const Var& x) {
    return detail::elementwise(
        x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double in, double) { return in > 0.0 ? 1.0 : 0.0; },
        "relu");
}

inline Var tanh(const Var& x) {
    return detail::elementwise(
        x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; }, "tanh");
}

inline double sigmoid_value(double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

inline Var sigmoid(const Var& x) {
    return detail::elementwise(
        x, sigmoid_value, [](double, double y) { return y * (1.0 - y); }, "sigmoid");
}

/// W (m x n) times x (n), plus b (m) when given.
inline Var affine(const Var& w, const Var& x, const Var* b = nullptr) {
    const Tensor& W = w.value();
    const Tensor& X = x.value();
    if (W.rank() != 2 || X.size() != W.cols()) {
        throw std::invalid_argument("affine: shape mismatch " + shape_string(W.shape()) + " x " +
                                    shape_string(X.shape()));
    }
    const std::size_t m = W.rows(), n = W.cols();
    Tensor out({m});
    for (std::size_t r = 0; r < m; ++r) out[r] = dot(W.data().data() + r * n, X.data().data(), n);
    std::vector<std::size_t> inputs{w.id(), x.id()};
    if (b != nullptr) {
        if (b->value().size() != m) throw std::invalid_argument("affine: bias length mismatch");
        for (std::size_t r = 0; r < m; ++r) out[r] += b->value()[r];
        inputs.push_back(b->id());
    }
    const std::size_t iw = w.id(), ix = x.id();
    const bool has_bias = b != nullptr;
    const std::size_t ib = has_bias ? b->id() : 0;
    return w.tape().record(std::move(out), std::move(inputs),
                           [iw, ix, ib, has_bias, m, n](Tape& t, std::size_t self) {
                               const Tensor& g = t.grad(self);
                               const double* Wd = t.value(iw).data().data();
                               const double* Xd = t.value(ix).data().data();
                               if (t.requires_grad(iw)) {
                                   double* gw = t.grad(iw).data().data();
                                   for (std::size_t r = 0; r < m; ++r) {
                                       if (g[r] != 0.0) axpy(g[r], Xd, gw + r * n, n);
                                   }
                               }
                               if (t.requires_grad(ix)) {
                                   double* gx = t.grad(ix).data().data();
                                   for (std::size_t r = 0; r < m; ++r) {
                                       if (g[r] != 0.0) axpy(g[r], Wd + r * n, gx, n);
                                   }
                               }
                               if (has_bias) detail::accumulate(t, ib, g.data());
                           },
                           "affine");
}

inline Var affine(const Var& w, const Var& x, const Var& b) { return affine(w, x, &b); }

/// Flattened concatenation into a rank-1 tensor.
inline Var concat(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no parts");
    std::vector<double> data;
    std::vector<std::size_t> ids;
    std::vector<std::size_t> offsets;
    for (const Var& p : parts) {
        offsets.push_back(data.size());
        ids.push_back(p.id());
        auto d = p.value().data();
        data.insert(data.end(), d.begin(), d.end());
    }
    return parts[0].tape().record(Tensor::vector(std::move(data)), ids,
                                  [ids, offsets](Tape& t, std::size_t self) {
                                      const Tensor& g = t.grad(self);
                                      for (std::size_t k = 0; k < ids.size(); ++k) {
                                          if (!t.requires_grad(ids[k])) continue;
                                          auto gk = t.grad(ids[k]).data();
                                          for (std::size_t i = 0; i < gk.size(); ++i) gk[i] += g[offsets[k] + i];
                                      }
                                  },
                                  "concat");
}

/// Contiguous range [offset, offset + length) of the flattened tensor.
inline Var slice(const Var& a, std::size_t offset, std::size_t length) {
    const Tensor& A = a.value();
    if (length == 0 || offset + length > A.size()) throw std::invalid_argument("slice: out of range");
    std::vector<double> data(A.data().begin() + static_cast<std::ptrdiff_t>(offset),
                             A.data().begin() + static_cast<std::ptrdiff_t>(offset + length));
    const std::size_t ia = a.id();
    return a.tape().record(Tensor::vector(std::move(data)), {ia},
                           [ia, offset](Tape& t, std::size_t self) {
                               if (!t.requires_grad(ia)) return;
                               const Tensor& g = t.grad(self);
                               auto ga = t.grad(ia).data();
                               for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
                           },
                           "slice");
}

/// Row r of a matrix as a vector.
inline Var row(const Var& a, std::size_t r) {
    const Tensor& A = a.value();
    if (A.rank() != 2 || r >= A.rows()) throw std::invalid_argument("row: out of range");
    return slice(a, r * A.cols(), A.cols());
}

/// Gathers rows of an embedding table: result is (ids.size() x dim).
inline Var embed(const Var& table, std::span<const int> ids) {
    const Tensor& E = table.value();
    if (E.rank() != 2) throw std::invalid_argument("embed: table must be a matrix");
    if (ids.empty()) throw std::invalid_argument("embed: empty id sequence");
    const std::size_t dim = E.cols();
    Tensor out({ids.size(), dim});
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= E.rows()) {
            throw std::out_of_range("embed: id " + std::to_string(ids[t]) + " outside vocabulary");
        }
        auto src = E.row(static_cast<std::size_t>(ids[t]));
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    const std::size_t ie = table.id();
    std::vector<int> id_copy(ids.begin(), ids.end());
    return table.tape().record(std::move(out), {ie},
                               [ie, id_copy = std::move(id_copy), dim](Tape& t, std::size_t self) {
                                   if (!t.requires_grad(ie)) return;
                                   const Tensor& g = t.grad(self);
                                   Tensor& ge = t.grad(ie);
                                   for (std::size_t r = 0; r < id_copy.size(); ++r) {
                                       axpy(1.0, g.data().data() + r * dim,
                                            ge.data().data() + static_cast<std::size_t>(id_copy[r]) * dim, dim);
                                   }
                               },
                               "embed");
}

/// One bank of `count` filters of width n over a (T x d) sequence:
/// z[t][f] = sum_i W_f[i] . x[t+i] + b_f. The filter matrix is
/// (count x n*d), offset i occupying columns [i*d, (i+1)*d).
inline Var conv1d(const Var& x, const Var& w, const Var& b, std::size_t width) {
    const Tensor& X = x.value();
    const Tensor& W = w.value();
    if (X.rank() != 2 || W.rank() != 2) throw std::invalid_argument("conv1d: expected matrices");
    const std::size_t T = X.rows(), d = X.cols(), k = W.rows(), span_len = width * d;
    if (W.cols() != span_len) throw std::invalid_argument("conv1d: filter width mismatch");
    if (b.value().size() != k) throw std::invalid_argument("conv1d: bias length mismatch");
    if (width == 0 || T < width) {
        throw std::invalid_argument("conv1d: sequence length " + std::to_string(T) + " shorter than filter width " +
                                    std::to_string(width));
    }
    const std::size_t P = T - width + 1;
    Tensor out({P, k});
    const double* Xd = X.data().data();
    const double* Wd = W.data().data();
    const auto bd = b.value().data();
    for (std::size_t t = 0; t < P; ++t) {
        const double* window = Xd + t * d;
        for (std::size_t f = 0; f < k; ++f) out(t, f) = dot(Wd + f * span_len, window, span_len) + bd[f];
    }
    const std::size_t ix = x.id(), iw = w.id(), ib = b.id();
    return x.tape().record(std::move(out), {ix, iw, ib},
                           [ix, iw, ib, P, k, d, span_len](Tape& t, std::size_t self) {
                               const Tensor& g = t.grad(self);
                               const double* Xv = t.value(ix).data().data();
                               const double* Wv = t.value(iw).data().data();
                               double* gx = t.requires_grad(ix) ? t.grad(ix).data().data() : nullptr;
                               double* gw = t.requires_grad(iw) ? t.grad(iw).data().data() : nullptr;
                               double* gb = t.requires_grad(ib) ? t.grad(ib).data().data() : nullptr;
                               for (std::size_t p = 0; p < P; ++p) {
                                   for (std::size_t f = 0; f < k; ++f) {
                                       const double gz = g(p, f);
                                       if (gz == 0.0) continue;
                                       if (gw) axpy(gz, Xv + p * d, gw + f * span_len, span_len);
                                       if (gx) axpy(gz, Wv + f * span_len, gx + p * d, span_len);
                                       if (gb) gb[f] += gz;
                                   }
                               }
                           },
                           "conv1d");
}

/// Column-wise maximum over the first `valid_rows` rows (first row wins ties).
inline Var max_over_time(const Var& z, std::size_t valid_rows) {
    const Tensor& Z = z.value();
    if (Z.rank() != 2) throw std::invalid_argument("max_over_time: expected a matrix");
    const std::size_t rows = std::min(valid_rows, Z.rows()), k = Z.cols();
    if (rows == 0) throw std::invalid_argument("max_over_time: no valid rows");
    Tensor out({k});
    std::vector<std::size_t> argmax(k, 0);
    for (std::size_t f = 0; f < k; ++f) {
        double best = Z(0, f);
        for (std::size_t t = 1; t < rows; ++t) {
            if (Z(t, f) > best) {
                best = Z(t, f);
                argmax[f] = t;
            }
        }
        out[f] = best;
    }
    const std::size_t iz = z.id();
    return z.tape().record(std::move(out), {iz},
                           [iz, argmax = std::move(argmax), k](Tape& t, std::size_t self) {
                               if (!t.requires_grad(iz)) return;
                               const Tensor& g = t.grad(self);
                               Tensor& gz = t.grad(iz);
                               for (std::size_t f = 0; f < k; ++f) gz(argmax[f], f) += g[f];
                           },
                           "max_over_time");
}

/// -log softmax(logits)[gold], computed through log-sum-exp.
inline Var softmax_cross_entropy(const Var& logits, std::size_t gold) {
    const Tensor& L = logits.value();
    if (gold >= L.size()) throw std::out_of_range("softmax_cross_entropy: gold index out of range");
    double m = L[0];
    for (double v : L.data()) m = std::max(m, v);
    double z = 0.0;
    for (double v : L.data()) z += std::exp(v - m);
    const double lse = m + std::log(z);
    const double loss = lse - L[gold];
    const std::size_t il = logits.id();
    return logits.tape().record(Tensor::scalar(loss), {il},
                                [il, gold, lse](Tape& t, std::size_t self) {
                                    if (!t.requires_grad(il)) return;
                                    const double g = t.grad(self)[0];
                                    const auto lv = t.value(il).data();
                                    auto gl = t.grad(il).data();
                                    for (std::size_t i = 0; i < gl.size(); ++i) {
                                        gl[i] += g * (std::exp(lv[i] - lse) - (i == gold ? 1.0 : 0.0));
                                    }
                                },
                                "softmax_cross_entropy");
}

}  // namespace ad
}  // namespace chardecomp
