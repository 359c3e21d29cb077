#pragma once

#include <memory>
#include <numeric>

#include "rangeudf/common.hpp"

namespace rangeudf {

template <class S>
struct TensorT {
    std::vector<std::int64_t> shape;
    std::vector<S> data;

    TensorT() = default;
    explicit TensorT(std::vector<std::int64_t> shp) : shape(std::move(shp)) {
        data.assign(static_cast<size_t>(numel_of(shape)), S(0));
    }
    TensorT(std::vector<std::int64_t> shp, std::vector<S> d) : shape(std::move(shp)), data(std::move(d)) {
        if (static_cast<std::int64_t>(data.size()) != numel_of(shape))
            throw ValidationError("tensor data length does not match shape");
    }

    static std::int64_t numel_of(const std::vector<std::int64_t>& shp) {
        std::int64_t n = 1;
        for (auto d : shp) {
            if (d < 0) throw ValidationError("negative tensor dimension");
            n *= d;
        }
        return n;
    }

    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
    std::int64_t last_dim() const { return shape.empty() ? 1 : shape.back(); }
    std::int64_t rows() const { return last_dim() == 0 ? 0 : numel() / last_dim(); }

    S* ptr() { return data.data(); }
    const S* ptr() const { return data.data(); }

    template <class T>
    TensorT<T> cast() const {
        TensorT<T> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<T>(data[i]);
        return out;
    }

    bool finite() const {
        for (S v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

using Tensor = TensorT<float>;

// A named learnable tensor. Gradients live on tape nodes during a step and
// are copied here for the optimizer.
template <class S>
struct ParamT {
    std::string name;
    TensorT<S> value;
    TensorT<S> grad;  // filled after backward, zeroed at step start

    ParamT() = default;
    ParamT(std::string n, TensorT<S> v) : name(std::move(n)), value(std::move(v)) {
        grad = TensorT<S>(value.shape);
    }
    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), S(0)); }
};

using Parameter = ParamT<float>;

template <class S>
struct NodeT {
    TensorT<S> value;
    TensorT<S> grad;  // allocated only when needs_grad
    bool needs_grad = false;

    void ensure_grad() {
        if (grad.data.empty() && !value.data.empty()) grad = TensorT<S>(value.shape);
    }
};

template <class S>
using VarT = std::shared_ptr<NodeT<S>>;

// Reverse-mode tape. Operations record backward closures in execution order;
// backward() replays them once in reverse, which is a valid reverse
// topological order because the graph is built by executing forward ops.
template <class S>
class TapeT {
public:
    VarT<S> leaf(TensorT<S> value, bool needs_grad = false) {
        auto node = std::make_shared<NodeT<S>>();
        node->value = std::move(value);
        node->needs_grad = needs_grad;
        if (needs_grad) node->ensure_grad();
        return node;
    }

    VarT<S> constant(TensorT<S> value) { return leaf(std::move(value), false); }

    VarT<S> scalar(S v, bool needs_grad = false) {
        TensorT<S> t({1});
        t.data[0] = v;
        return leaf(std::move(t), needs_grad);
    }

    // y = x W + b over the last axis; leading axes are batch.
    VarT<S> linear(const VarT<S>& x, const VarT<S>& w, const VarT<S>& b) {
        const std::int64_t in = x->value.last_dim();
        if (w->value.shape.size() != 2 || w->value.shape[0] != in)
            throw ValidationError("linear: weight shape mismatch (in=" + std::to_string(in) + ")");
        const std::int64_t out_dim = w->value.shape[1];
        if (b->value.numel() != out_dim) throw ValidationError("linear: bias shape mismatch");
        const std::int64_t rows = x->value.rows();

        std::vector<std::int64_t> out_shape = x->value.shape;
        if (out_shape.empty()) out_shape = {1};
        out_shape.back() = out_dim;
        auto y = make_out(out_shape, {x, w, b});

        const S* xp = x->value.ptr();
        const S* wp = w->value.ptr();
        const S* bp = b->value.ptr();
        S* yp = y->value.ptr();
        auto forward_rows = [&](std::int64_t r0, std::int64_t r1) {
            for (std::int64_t r = r0; r < r1; ++r) {
                S* yr = yp + r * out_dim;
                for (std::int64_t o = 0; o < out_dim; ++o) yr[o] = bp[o];
                const S* xr = xp + r * in;
                for (std::int64_t i = 0; i < in; ++i) {
                    S xv = xr[i];
                    const S* wr = wp + i * out_dim;
                    for (std::int64_t o = 0; o < out_dim; ++o) yr[o] += xv * wr[o];
                }
            }
        };
        // Row-independent kernel: splitting across threads cannot change the
        // per-row arithmetic, so results are identical for any thread count.
        if (rows * in * out_dim >= (1 << 20)) parallel_for(rows, forward_rows);
        else forward_rows(0, rows);

        if (y->needs_grad) {
            record([x, w, b, y, rows, in, out_dim] {
                const S* gy = y->grad.ptr();
                const S* xp = x->value.ptr();
                const S* wp = w->value.ptr();
                if (x->needs_grad) {
                    S* gx = x->grad.ptr();
                    parallel_for(rows, [&](std::int64_t r0, std::int64_t r1) {
                        for (std::int64_t r = r0; r < r1; ++r) {
                            const S* gyr = gy + r * out_dim;
                            S* gxr = gx + r * in;
                            for (std::int64_t i = 0; i < in; ++i) {
                                const S* wr = wp + i * out_dim;
                                S acc = 0;
                                for (std::int64_t o = 0; o < out_dim; ++o) acc += gyr[o] * wr[o];
                                gxr[i] += acc;
                            }
                        }
                    });
                }
                if (w->needs_grad) {
                    S* gw = w->grad.ptr();
                    for (std::int64_t r = 0; r < rows; ++r) {
                        const S* xr = xp + r * in;
                        const S* gyr = gy + r * out_dim;
                        for (std::int64_t i = 0; i < in; ++i) {
                            S xv = xr[i];
                            S* gwr = gw + i * out_dim;
                            for (std::int64_t o = 0; o < out_dim; ++o) gwr[o] += xv * gyr[o];
                        }
                    }
                }
                if (b->needs_grad) {
                    S* gb = b->grad.ptr();
                    for (std::int64_t r = 0; r < rows; ++r) {
                        const S* gyr = gy + r * out_dim;
                        for (std::int64_t o = 0; o < out_dim; ++o) gb[o] += gyr[o];
                    }
                }
            });
        }
        return y;
    }

    VarT<S> leaky_relu(const VarT<S>& x, S slope = S(0.2)) {
        auto y = make_out(x->value.shape, {x});
        const std::int64_t n = x->value.numel();
        const S* xp = x->value.ptr();
        S* yp = y->value.ptr();
        for (std::int64_t i = 0; i < n; ++i) yp[i] = xp[i] >= 0 ? xp[i] : slope * xp[i];
        if (y->needs_grad) {
            record([x, y, n, slope] {
                if (!x->needs_grad) return;
                const S* xp = x->value.ptr();
                const S* gy = y->grad.ptr();
                S* gx = x->grad.ptr();
                for (std::int64_t i = 0; i < n; ++i) gx[i] += xp[i] >= 0 ? gy[i] : slope * gy[i];
            });
        }
        return y;
    }

    VarT<S> relu(const VarT<S>& x) { return leaky_relu(x, S(0)); }

    // Attention pooling core: x and logits are [M*K, D] row blocks; per (m, d)
    // the K logits are softmaxed and used as weights over x. Output [M, D].
    VarT<S> attset_combine(const VarT<S>& x, const VarT<S>& logits, std::int64_t k) {
        if (k < 1) throw ValidationError("attset_combine: empty set (K=0)");
        const std::int64_t d = x->value.last_dim();
        const std::int64_t rows = x->value.rows();
        if (rows % k != 0) throw ValidationError("attset_combine: rows not divisible by K");
        if (logits->value.numel() != x->value.numel())
            throw ValidationError("attset_combine: logits shape mismatch");
        const std::int64_t m = rows / k;

        auto y = make_out({m, d}, {x, logits});
        auto alpha = std::make_shared<TensorT<S>>(std::vector<std::int64_t>{rows, d});

        const S* xp = x->value.ptr();
        const S* lp = logits->value.ptr();
        S* yp = y->value.ptr();
        S* ap = alpha->ptr();
        auto pool_rows = [&](std::int64_t m0, std::int64_t m1) {
            for (std::int64_t mi = m0; mi < m1; ++mi) {
                const S* lb = lp + mi * k * d;
                const S* xb = xp + mi * k * d;
                S* ab = ap + mi * k * d;
                S* yb = yp + mi * d;
                for (std::int64_t c = 0; c < d; ++c) {
                    S mx = lb[c];
                    for (std::int64_t j = 1; j < k; ++j) mx = std::max(mx, lb[j * d + c]);
                    double denom = 0;
                    for (std::int64_t j = 0; j < k; ++j) {
                        S e = std::exp(lb[j * d + c] - mx);
                        ab[j * d + c] = e;
                        denom += static_cast<double>(e);
                    }
                    double acc = 0;
                    for (std::int64_t j = 0; j < k; ++j) {
                        S a = static_cast<S>(ab[j * d + c] / denom);
                        ab[j * d + c] = a;
                        acc += static_cast<double>(a) * static_cast<double>(xb[j * d + c]);
                    }
                    yb[c] = static_cast<S>(acc);
                }
            }
        };
        if (m * k * d >= (1 << 19)) parallel_for(m, pool_rows);
        else pool_rows(0, m);

        if (y->needs_grad) {
            record([x, logits, y, alpha, m, k, d] {
                const S* gy = y->grad.ptr();
                const S* xp = x->value.ptr();
                const S* yp = y->value.ptr();
                const S* ap = alpha->ptr();
                for (std::int64_t mi = 0; mi < m; ++mi) {
                    const S* gyb = gy + mi * d;
                    const S* xb = xp + mi * k * d;
                    const S* ab = ap + mi * k * d;
                    const S* yb = yp + mi * d;
                    for (std::int64_t c = 0; c < d; ++c) {
                        S g = gyb[c];
                        for (std::int64_t j = 0; j < k; ++j) {
                            S a = ab[j * d + c];
                            if (x->needs_grad) x->grad.ptr()[(mi * k + j) * d + c] += g * a;
                            if (logits->needs_grad)
                                logits->grad.ptr()[(mi * k + j) * d + c] += g * a * (xb[j * d + c] - yb[c]);
                        }
                    }
                }
            });
        }
        return y;
    }

    // AttSets pooling: per-element linear logits, softmax across the set,
    // weighted sum. x is [K, D] (or [M*K, D] with k dividing rows).
    VarT<S> attset_pool(const VarT<S>& x, const VarT<S>& a_w, const VarT<S>& a_b, std::int64_t k) {
        auto logits = linear(x, a_w, a_b);
        return attset_combine(x, logits, k);
    }

    // Mean of -log softmax(logits)[label] over rows where mask is nonzero
    // (empty mask = all rows). Max-subtracted, f64 accumulation.
    VarT<S> softmax_cross_entropy(const VarT<S>& logits, const std::vector<std::int32_t>& labels,
                                  const std::vector<std::uint8_t>& mask = {}) {
        const std::int64_t c = logits->value.last_dim();
        const std::int64_t m = logits->value.rows();
        if (static_cast<std::int64_t>(labels.size()) != m)
            throw ValidationError("softmax_cross_entropy: label count mismatch");
        if (!mask.empty() && static_cast<std::int64_t>(mask.size()) != m)
            throw ValidationError("softmax_cross_entropy: mask length mismatch");
        std::int64_t active = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            if (!mask.empty() && !mask[i]) continue;
            if (labels[i] < 0 || labels[i] >= c)
                throw ValidationError("softmax_cross_entropy: label " + std::to_string(labels[i]) +
                                      " outside [0, " + std::to_string(c) + ")");
            ++active;
        }
        if (active == 0) throw ValidationError("softmax_cross_entropy: no labeled rows");

        auto probs = std::make_shared<TensorT<S>>(logits->value.shape);
        const S* lp = logits->value.ptr();
        S* pp = probs->ptr();
        double loss = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            const S* row = lp + i * c;
            S* prow = pp + i * c;
            S mx = row[0];
            for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
            double denom = 0;
            for (std::int64_t j = 0; j < c; ++j) denom += std::exp(static_cast<double>(row[j] - mx));
            for (std::int64_t j = 0; j < c; ++j)
                prow[j] = static_cast<S>(std::exp(static_cast<double>(row[j] - mx)) / denom);
            if (mask.empty() || mask[i])
                loss += std::log(denom) - static_cast<double>(row[labels[i]] - mx);
        }
        auto y = make_out({1}, {logits});
        y->value.data[0] = static_cast<S>(loss / static_cast<double>(active));

        if (y->needs_grad) {
            auto labels_copy = labels;
            auto mask_copy = mask;
            record([logits, y, probs, labels_copy, mask_copy, m, c, active] {
                if (!logits->needs_grad) return;
                S g = y->grad.data[0] / static_cast<S>(active);
                S* gl = logits->grad.ptr();
                const S* pp = probs->ptr();
                for (std::int64_t i = 0; i < m; ++i) {
                    if (!mask_copy.empty() && !mask_copy[i]) continue;
                    const S* prow = pp + i * c;
                    S* grow = gl + i * c;
                    for (std::int64_t j = 0; j < c; ++j) grow[j] += g * prow[j];
                    grow[labels_copy[i]] -= g;
                }
            });
        }
        return y;
    }

    // Mean absolute error. Sign convention at ties: sign(0) = 0.
    VarT<S> l1_loss(const VarT<S>& pred, const VarT<S>& target) {
        if (pred->value.numel() != target->value.numel())
            throw ValidationError("l1_loss: shape mismatch");
        const std::int64_t n = pred->value.numel();
        if (n == 0) throw ValidationError("l1_loss: empty input");
        double acc = 0;
        const S* pp = pred->value.ptr();
        const S* tp = target->value.ptr();
        for (std::int64_t i = 0; i < n; ++i) acc += std::abs(static_cast<double>(pp[i] - tp[i]));
        auto y = make_out({1}, {pred, target});
        y->value.data[0] = static_cast<S>(acc / static_cast<double>(n));
        if (y->needs_grad) {
            record([pred, target, y, n] {
                S g = y->grad.data[0] / static_cast<S>(n);
                const S* pp = pred->value.ptr();
                const S* tp = target->value.ptr();
                for (std::int64_t i = 0; i < n; ++i) {
                    S diff = pp[i] - tp[i];
                    S s = diff > 0 ? S(1) : (diff < 0 ? S(-1) : S(0));
                    if (pred->needs_grad) pred->grad.data[i] += g * s;
                    if (target->needs_grad) target->grad.data[i] -= g * s;
                }
            });
        }
        return y;
    }

    // min(x, cap); gradient passes through where x <= cap.
    VarT<S> clamp_max(const VarT<S>& x, S cap) {
        auto y = make_out(x->value.shape, {x});
        const std::int64_t n = x->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = std::min(x->value.data[i], cap);
        if (y->needs_grad) {
            record([x, y, n, cap] {
                if (!x->needs_grad) return;
                for (std::int64_t i = 0; i < n; ++i)
                    if (x->value.data[i] <= cap) x->grad.data[i] += y->grad.data[i];
            });
        }
        return y;
    }

    VarT<S> add(const VarT<S>& a, const VarT<S>& b) {
        if (a->value.numel() != b->value.numel()) throw ValidationError("add: shape mismatch");
        auto y = make_out(a->value.shape, {a, b});
        const std::int64_t n = a->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = a->value.data[i] + b->value.data[i];
        if (y->needs_grad) {
            record([a, b, y, n] {
                for (std::int64_t i = 0; i < n; ++i) {
                    if (a->needs_grad) a->grad.data[i] += y->grad.data[i];
                    if (b->needs_grad) b->grad.data[i] += y->grad.data[i];
                }
            });
        }
        return y;
    }

    VarT<S> sub(const VarT<S>& a, const VarT<S>& b) {
        if (a->value.numel() != b->value.numel()) throw ValidationError("sub: shape mismatch");
        auto y = make_out(a->value.shape, {a, b});
        const std::int64_t n = a->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = a->value.data[i] - b->value.data[i];
        if (y->needs_grad) {
            record([a, b, y, n] {
                for (std::int64_t i = 0; i < n; ++i) {
                    if (a->needs_grad) a->grad.data[i] += y->grad.data[i];
                    if (b->needs_grad) b->grad.data[i] -= y->grad.data[i];
                }
            });
        }
        return y;
    }

    VarT<S> mul(const VarT<S>& a, const VarT<S>& b) {
        if (a->value.numel() != b->value.numel()) throw ValidationError("mul: shape mismatch");
        auto y = make_out(a->value.shape, {a, b});
        const std::int64_t n = a->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = a->value.data[i] * b->value.data[i];
        if (y->needs_grad) {
            record([a, b, y, n] {
                for (std::int64_t i = 0; i < n; ++i) {
                    if (a->needs_grad) a->grad.data[i] += y->grad.data[i] * b->value.data[i];
                    if (b->needs_grad) b->grad.data[i] += y->grad.data[i] * a->value.data[i];
                }
            });
        }
        return y;
    }

    VarT<S> scale(const VarT<S>& x, S c) {
        auto y = make_out(x->value.shape, {x});
        const std::int64_t n = x->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = x->value.data[i] * c;
        if (y->needs_grad) {
            record([x, y, n, c] {
                if (!x->needs_grad) return;
                for (std::int64_t i = 0; i < n; ++i) x->grad.data[i] += y->grad.data[i] * c;
            });
        }
        return y;
    }

    VarT<S> exp(const VarT<S>& x) {
        auto y = make_out(x->value.shape, {x});
        const std::int64_t n = x->value.numel();
        for (std::int64_t i = 0; i < n; ++i) y->value.data[i] = std::exp(x->value.data[i]);
        if (y->needs_grad) {
            record([x, y, n] {
                if (!x->needs_grad) return;
                for (std::int64_t i = 0; i < n; ++i) x->grad.data[i] += y->grad.data[i] * y->value.data[i];
            });
        }
        return y;
    }

    VarT<S> sum_all(const VarT<S>& x) {
        double acc = 0;
        for (S v : x->value.data) acc += static_cast<double>(v);
        auto y = make_out({1}, {x});
        y->value.data[0] = static_cast<S>(acc);
        if (y->needs_grad) {
            record([x, y] {
                if (!x->needs_grad) return;
                S g = y->grad.data[0];
                for (auto& gv : x->grad.data) gv += g;
            });
        }
        return y;
    }

    VarT<S> mean_all(const VarT<S>& x) {
        if (x->value.numel() == 0) throw ValidationError("mean_all: empty input");
        return scale(sum_all(x), S(1) / static_cast<S>(x->value.numel()));
    }

    // Concatenation along the last axis; all inputs share the row count.
    VarT<S> concat_last(const std::vector<VarT<S>>& xs) {
        if (xs.empty()) throw ValidationError("concat_last: no inputs");
        const std::int64_t rows = xs[0]->value.rows();
        std::int64_t total = 0;
        for (const auto& x : xs) {
            if (x->value.rows() != rows) throw ValidationError("concat_last: row count mismatch");
            total += x->value.last_dim();
        }
        auto y = make_out({rows, total}, xs);
        S* yp = y->value.ptr();
        std::int64_t off = 0;
        for (const auto& x : xs) {
            const std::int64_t d = x->value.last_dim();
            const S* xp = x->value.ptr();
            for (std::int64_t r = 0; r < rows; ++r)
                std::memcpy(yp + r * total + off, xp + r * d, d * sizeof(S));
            off += d;
        }
        if (y->needs_grad) {
            record([xs, y, rows, total] {
                std::int64_t off = 0;
                for (const auto& x : xs) {
                    const std::int64_t d = x->value.last_dim();
                    if (x->needs_grad) {
                        S* gx = x->grad.ptr();
                        const S* gy = y->grad.ptr();
                        for (std::int64_t r = 0; r < rows; ++r)
                            for (std::int64_t i = 0; i < d; ++i) gx[r * d + i] += gy[r * total + off + i];
                    }
                    off += d;
                }
            });
        }
        return y;
    }

    // out[m, :] = x[idx[m], :]; backward scatter-adds.
    VarT<S> gather_rows(const VarT<S>& x, const std::vector<std::int32_t>& idx) {
        const std::int64_t d = x->value.last_dim();
        const std::int64_t n = x->value.rows();
        const std::int64_t m = static_cast<std::int64_t>(idx.size());
        for (auto i : idx)
            if (i < 0 || i >= n) throw ValidationError("gather_rows: index out of range");
        auto y = make_out({m, d}, {x});
        const S* xp = x->value.ptr();
        S* yp = y->value.ptr();
        for (std::int64_t r = 0; r < m; ++r) std::memcpy(yp + r * d, xp + idx[r] * d, d * sizeof(S));
        if (y->needs_grad) {
            auto idx_copy = idx;
            record([x, y, idx_copy, m, d] {
                if (!x->needs_grad) return;
                S* gx = x->grad.ptr();
                const S* gy = y->grad.ptr();
                for (std::int64_t r = 0; r < m; ++r) {
                    S* dst = gx + static_cast<std::int64_t>(idx_copy[r]) * d;
                    const S* src = gy + r * d;
                    for (std::int64_t i = 0; i < d; ++i) dst[i] += src[i];
                }
            });
        }
        return y;
    }

    // Repeats each row K times: [M, D] -> [M*K, D].
    VarT<S> expand_rows(const VarT<S>& x, std::int64_t k) {
        if (k < 1) throw ValidationError("expand_rows: K must be >= 1");
        const std::int64_t d = x->value.last_dim();
        const std::int64_t m = x->value.rows();
        auto y = make_out({m * k, d}, {x});
        const S* xp = x->value.ptr();
        S* yp = y->value.ptr();
        for (std::int64_t r = 0; r < m; ++r)
            for (std::int64_t j = 0; j < k; ++j) std::memcpy(yp + (r * k + j) * d, xp + r * d, d * sizeof(S));
        if (y->needs_grad) {
            record([x, y, m, k, d] {
                if (!x->needs_grad) return;
                S* gx = x->grad.ptr();
                const S* gy = y->grad.ptr();
                for (std::int64_t r = 0; r < m; ++r)
                    for (std::int64_t j = 0; j < k; ++j)
                        for (std::int64_t i = 0; i < d; ++i) gx[r * d + i] += gy[(r * k + j) * d + i];
            });
        }
        return y;
    }

    void backward(const VarT<S>& loss) {
        if (loss->value.numel() != 1) throw ValidationError("backward: loss must be scalar");
        if (ran_backward_) throw ValidationError("backward: tape already consumed");
        ran_backward_ = true;
        if (!loss->needs_grad) return;  // nothing on this tape requires gradients
        loss->grad.data[0] = S(1);
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    }

    size_t op_count() const { return steps_.size(); }

private:
    VarT<S> make_out(const std::vector<std::int64_t>& shape, const std::vector<VarT<S>>& inputs) {
        auto node = std::make_shared<NodeT<S>>();
        node->value = TensorT<S>(shape);
        for (const auto& in : inputs) node->needs_grad = node->needs_grad || in->needs_grad;
        if (node->needs_grad) node->ensure_grad();
        return node;
    }

    void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }

    std::vector<std::function<void()>> steps_;
    bool ran_backward_ = false;
};

using Tape = TapeT<float>;
using Var = VarT<float>;

// Kaiming-style uniform init for leaky networks: U(+-sqrt(6 / (fan_in * (1 + slope^2)))).
template <class S>
TensorT<S> kaiming_uniform(std::vector<std::int64_t> shape, std::int64_t fan_in, Rng& rng,
                           double slope = 0.2) {
    TensorT<S> t(std::move(shape));
    double bound = std::sqrt(6.0 / (static_cast<double>(fan_in) * (1.0 + slope * slope)));
    for (auto& v : t.data) v = static_cast<S>(rng.uniform(-bound, bound));
    return t;
}

}  // namespace rangeudf
