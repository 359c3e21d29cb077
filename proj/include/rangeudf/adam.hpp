#pragma once

#include "rangeudf/tensor.hpp"

namespace rangeudf {

struct AdamConfig {
    float lr = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

// One ADAM update with bias correction on a single tensor.
template <class S>
void adam_step(TensorT<S>& value, const TensorT<S>& grad, TensorT<S>& m, TensorT<S>& v,
               std::int64_t t, const AdamConfig& cfg) {
    if (grad.numel() != value.numel() || m.numel() != value.numel() || v.numel() != value.numel())
        throw ValidationError("adam_step: state shape mismatch");
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t));
    const std::int64_t n = value.numel();
    for (std::int64_t i = 0; i < n; ++i) {
        double g = static_cast<double>(grad.data[i]);
        double mi = b1 * static_cast<double>(m.data[i]) + (1.0 - b1) * g;
        double vi = b2 * static_cast<double>(v.data[i]) + (1.0 - b2) * g * g;
        m.data[i] = static_cast<S>(mi);
        v.data[i] = static_cast<S>(vi);
        double mhat = mi / corr1;
        double vhat = vi / corr2;
        value.data[i] -= static_cast<S>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
}

// Optimizer over a fixed parameter list; state rows align with the list order.
template <class S>
class AdamT {
public:
    AdamT() = default;
    AdamT(const std::vector<ParamT<S>*>& params, AdamConfig cfg) : cfg_(cfg) { init(params); }

    void init(const std::vector<ParamT<S>*>& params) {
        m_.clear();
        v_.clear();
        for (const auto* p : params) {
            m_.emplace_back(p->value.shape);
            v_.emplace_back(p->value.shape);
        }
        t_ = 0;
    }

    void step(const std::vector<ParamT<S>*>& params) {
        if (params.size() != m_.size()) throw ValidationError("AdamT::step: parameter list changed");
        ++t_;
        for (size_t i = 0; i < params.size(); ++i)
            adam_step(params[i]->value, params[i]->grad, m_[i], v_[i], t_, cfg_);
    }

    AdamConfig& config() { return cfg_; }
    const AdamConfig& config() const { return cfg_; }
    std::int64_t steps_taken() const { return t_; }
    std::vector<TensorT<S>>& m_state() { return m_; }
    std::vector<TensorT<S>>& v_state() { return v_; }
    void set_steps_taken(std::int64_t t) { t_ = t; }

    // Clears the first/second-moment state of one parameter (by list index).
    void reset_state(size_t idx) {
        if (idx >= m_.size()) throw ValidationError("AdamT::reset_state: index out of range");
        std::fill(m_[idx].data.begin(), m_[idx].data.end(), S(0));
        std::fill(v_[idx].data.begin(), v_[idx].data.end(), S(0));
    }

private:
    AdamConfig cfg_;
    std::vector<TensorT<S>> m_, v_;
    std::int64_t t_ = 0;
};

using Adam = AdamT<float>;

}  // namespace rangeudf
