#pragma once

#include "rangeudf/tensor.hpp"

namespace rangeudf {

// Central-finite-difference gradient verification, always in f64. The builder
// receives a fresh tape plus parameter leaves (same order as the input
// tensors) and returns a scalar loss. Returns the maximum relative error over
// all parameter entries.
//
// Builder signature: VarT<double>(TapeT<double>&, const std::vector<VarT<double>>&)
template <class Builder>
double grad_check(const Builder& build, std::vector<TensorT<double>> params, double h = 1e-3) {
    auto eval = [&](const std::vector<TensorT<double>>& vals) {
        TapeT<double> tape;
        std::vector<VarT<double>> leaves;
        leaves.reserve(vals.size());
        for (const auto& t : vals) leaves.push_back(tape.leaf(t, false));
        auto loss = build(tape, leaves);
        if (loss->value.numel() != 1) throw ValidationError("grad_check: loss must be scalar");
        return static_cast<double>(loss->value.data[0]);
    };

    // Analytic gradients.
    TapeT<double> tape;
    std::vector<VarT<double>> leaves;
    leaves.reserve(params.size());
    for (const auto& t : params) leaves.push_back(tape.leaf(t, true));
    auto loss = build(tape, leaves);
    tape.backward(loss);

    double max_rel = 0;
    for (size_t p = 0; p < params.size(); ++p) {
        for (std::int64_t i = 0; i < params[p].numel(); ++i) {
            double orig = params[p].data[i];
            params[p].data[i] = orig + h;
            double fp = eval(params);
            params[p].data[i] = orig - h;
            double fm = eval(params);
            params[p].data[i] = orig;
            double fd = (fp - fm) / (2.0 * h);
            double an = leaves[p]->grad.data[i];
            double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            max_rel = std::max(max_rel, std::abs(fd - an) / denom);
        }
    }
    return max_rel;
}

}  // namespace rangeudf
