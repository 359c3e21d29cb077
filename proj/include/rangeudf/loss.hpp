#pragma once

#include "rangeudf/model.hpp"

namespace rangeudf {

template <class S>
struct LossTerms {
    VarT<S> total;     // scalar on the tape
    double l1 = 0;     // distance term value
    double ce = 0;     // semantic term value (0 when no labeled queries)
    std::int64_t labeled = 0;
};

// Multi-task objective. The distance term is mean |min(d_pred, clamp) -
// min(d_gt, clamp)| (clamp <= 0 disables clamping); the semantic term is mean
// cross-entropy over the labeled queries only. With uncertainty weighting the
// total is exp(-s1) * L1 + s1 + exp(-s2) * CE + s2; the CE branch (and s2)
// drops out entirely when no query is labeled.
template <class S>
LossTerms<S> combined_loss(TapeT<S>& tape, const VarT<S>& d_pred, const VarT<S>& d_gt,
                           const VarT<S>& logits, const std::vector<std::int32_t>& labels,
                           const std::vector<std::uint8_t>& label_mask, const VarT<S>& s1,
                           const VarT<S>& s2, double clamp, bool uncertainty, bool semantic) {
    if (d_pred->value.numel() != d_gt->value.numel())
        throw ValidationError("combined_loss: prediction/target shape mismatch");

    auto p = clamp > 0 ? tape.clamp_max(d_pred, static_cast<S>(clamp)) : d_pred;
    auto g = clamp > 0 ? tape.clamp_max(d_gt, static_cast<S>(clamp)) : d_gt;
    auto l1 = tape.l1_loss(p, g);

    LossTerms<S> out;
    out.l1 = static_cast<double>(l1->value.data[0]);
    if (!label_mask.empty())
        for (auto m : label_mask) out.labeled += m ? 1 : 0;
    else
        out.labeled = static_cast<std::int64_t>(labels.size());

    VarT<S> ce;
    bool has_ce = semantic && out.labeled > 0;
    if (has_ce) {
        ce = tape.softmax_cross_entropy(logits, labels, label_mask);
        out.ce = static_cast<double>(ce->value.data[0]);
    } else {
        out.labeled = 0;
    }

    if (uncertainty) {
        auto l1_term = tape.add(tape.mul(tape.exp(tape.scale(s1, S(-1))), l1), s1);
        if (has_ce) {
            auto ce_term = tape.add(tape.mul(tape.exp(tape.scale(s2, S(-1))), ce), s2);
            out.total = tape.add(l1_term, ce_term);
        } else {
            out.total = l1_term;
        }
    } else {
        out.total = has_ce ? tape.add(l1, ce) : l1;
    }
    return out;
}

}  // namespace rangeudf
