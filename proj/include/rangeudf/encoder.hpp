#pragma once

#include <array>

#include "rangeudf/kdtree.hpp"
#include "rangeudf/tensor.hpp"

namespace rangeudf {

template <class S>
struct DenseLayerT {
    ParamT<S> w, b;

    DenseLayerT() = default;
    DenseLayerT(const std::string& name, std::int64_t in, std::int64_t out, Rng& rng)
        : w(name + ".w", kaiming_uniform<S>({in, out}, in, rng)), b(name + ".b", TensorT<S>({out})) {}

    std::int64_t in_dim() const { return w.value.shape[0]; }
    std::int64_t out_dim() const { return w.value.shape[1]; }

    template <class T>
    DenseLayerT<T> cast() const {
        DenseLayerT<T> out;
        out.w = ParamT<T>(w.name, w.value.template cast<T>());
        out.b = ParamT<T>(b.name, b.value.template cast<T>());
        return out;
    }
};

// AttSets pooling weights plus the output projection mapping the pooled
// D-vector to the module width.
template <class S>
struct AttPoolWeightsT {
    ParamT<S> att_w, att_b;
    DenseLayerT<S> proj;

    AttPoolWeightsT() = default;
    AttPoolWeightsT(const std::string& name, std::int64_t d, std::int64_t out, Rng& rng)
        : att_w(name + ".att_w", kaiming_uniform<S>({d, d}, d, rng)),
          att_b(name + ".att_b", TensorT<S>({d})),
          proj(name + ".proj", d, out, rng) {}

    std::int64_t set_dim() const { return att_w.value.shape[0]; }

    template <class T>
    AttPoolWeightsT<T> cast() const {
        AttPoolWeightsT<T> out;
        out.att_w = ParamT<T>(att_w.name, att_w.value.template cast<T>());
        out.att_b = ParamT<T>(att_b.name, att_b.value.template cast<T>());
        out.proj = proj.template cast<T>();
        return out;
    }
};

// Mounts persistent parameters as tape leaves (one leaf per parameter per
// tape). harvest() accumulates node gradients back into the parameters.
template <class S>
class ParamBankT {
public:
    ParamBankT(TapeT<S>& tape, bool trainable) : tape_(&tape), trainable_(trainable) {}

    VarT<S> operator()(ParamT<S>& p) {
        for (auto& [param, var] : bound_)
            if (param == &p) return var;
        auto var = tape_->leaf(p.value, trainable_);
        bound_.emplace_back(&p, var);
        return var;
    }

    VarT<S> linear(const VarT<S>& x, DenseLayerT<S>& layer) {
        return tape_->linear(x, (*this)(layer.w), (*this)(layer.b));
    }

    // Attention pooling over sets of k rows followed by the output projection.
    VarT<S> attpool(const VarT<S>& x, AttPoolWeightsT<S>& p, std::int64_t k) {
        auto pooled = tape_->attset_pool(x, (*this)(p.att_w), (*this)(p.att_b), k);
        return linear(pooled, p.proj);
    }

    void harvest() {
        for (auto& [param, var] : bound_) {
            if (!var->needs_grad) continue;
            auto& g = param->grad.data;
            const auto& ng = var->grad.data;
            for (size_t i = 0; i < g.size(); ++i) g[i] += ng[i];
        }
    }

private:
    TapeT<S>* tape_;
    bool trainable_;
    std::vector<std::pair<ParamT<S>*, VarT<S>>> bound_;
};

// Simplified 4-level encoder-decoder. Each level aggregates `neighbors`
// nearest points through a relative-position encoding
// p_i (+) p_j (+) (p_i - p_j) (+) |p_i - p_j| (10-D), a shared dense layer
// and attention pooling; levels downsample to a seeded random quarter. The
// decoder upsamples by nearest-neighbor feature copy with skip concatenation
// and ends in a 32-D projection.
template <class S>
struct EncoderParamsT {
    static constexpr int kLevels = 4;
    static constexpr std::int64_t kRelDim = 10;
    static constexpr std::int64_t kFeatureDim = 32;

    std::array<DenseLayerT<S>, kLevels> enc_mlp;
    std::array<AttPoolWeightsT<S>, kLevels> enc_pool;
    std::array<DenseLayerT<S>, kLevels - 1> dec_mlp;
    DenseLayerT<S> out_proj;
    int neighbors = 8;

    static std::array<std::int64_t, kLevels> level_widths() { return {32, 64, 128, 256}; }

    EncoderParamsT() = default;
    explicit EncoderParamsT(Rng& rng, int neighbors_ = 8) : neighbors(neighbors_) {
        auto widths = level_widths();
        std::int64_t prev = 0;
        for (int l = 0; l < kLevels; ++l) {
            std::int64_t in = kRelDim + prev;
            std::string tag = "encoder.level" + std::to_string(l);
            enc_mlp[l] = DenseLayerT<S>(tag + ".mlp", in, widths[l], rng);
            enc_pool[l] = AttPoolWeightsT<S>(tag + ".pool", widths[l], widths[l], rng);
            prev = widths[l];
        }
        for (int l = 0; l < kLevels - 1; ++l)
            dec_mlp[l] = DenseLayerT<S>("encoder.up" + std::to_string(l), widths[l] + widths[l + 1],
                                        widths[l], rng);
        out_proj = DenseLayerT<S>("encoder.out_proj", widths[0], kFeatureDim, rng);
    }

    void collect(std::vector<ParamT<S>*>& out) {
        for (int l = 0; l < kLevels; ++l) {
            out.push_back(&enc_mlp[l].w);
            out.push_back(&enc_mlp[l].b);
            out.push_back(&enc_pool[l].att_w);
            out.push_back(&enc_pool[l].att_b);
            out.push_back(&enc_pool[l].proj.w);
            out.push_back(&enc_pool[l].proj.b);
        }
        for (int l = 0; l < kLevels - 1; ++l) {
            out.push_back(&dec_mlp[l].w);
            out.push_back(&dec_mlp[l].b);
        }
        out.push_back(&out_proj.w);
        out.push_back(&out_proj.b);
    }

    template <class T>
    EncoderParamsT<T> cast() const {
        EncoderParamsT<T> out;
        out.neighbors = neighbors;
        for (int l = 0; l < kLevels; ++l) {
            out.enc_mlp[l] = enc_mlp[l].template cast<T>();
            out.enc_pool[l] = enc_pool[l].template cast<T>();
        }
        for (int l = 0; l < kLevels - 1; ++l) out.dec_mlp[l] = dec_mlp[l].template cast<T>();
        out.out_proj = out_proj.template cast<T>();
        return out;
    }
};

using EncoderParams = EncoderParamsT<float>;

// Geometry-dependent, parameter-independent part of the encoder: level point
// sets, in-level kNN, relative-position encodings and upsample maps. Built
// once per (cloud, seed) and reused across training steps.
struct EncoderPlan {
    static constexpr int kLevels = 4;
    static constexpr std::int64_t kRelDim = 10;

    std::array<std::vector<Vec3f>, kLevels> positions;
    std::array<std::vector<std::int32_t>, kLevels> keep;    // level l rows into level l-1
    std::array<std::vector<std::int32_t>, kLevels> knn;     // [N_l * nb] in-level neighbor rows
    std::array<Tensor, kLevels> relenc;                     // [N_l * nb, 10]
    std::array<std::vector<std::int32_t>, kLevels - 1> up;  // level l rows -> nearest level l+1 row
    int neighbors = 8;

    size_t point_count() const { return positions[0].size(); }
};

inline EncoderPlan build_encoder_plan(const std::vector<Vec3f>& cloud, std::uint64_t seed,
                                      int neighbors = 8) {
    if (cloud.size() < 64)
        throw ValidationError("encoder needs at least 64 points, got " + std::to_string(cloud.size()));
    if (neighbors < 1) throw ValidationError("encoder neighbors must be >= 1");
    for (const auto& p : cloud)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw ValidationError("non-finite point coordinate in cloud");

    EncoderPlan plan;
    plan.neighbors = neighbors;
    plan.positions[0] = cloud;
    Rng rng(derive_seed(seed, 0xE5C0DEull));

    for (int l = 0; l < EncoderPlan::kLevels; ++l) {
        if (l > 0) {
            const auto& prev = plan.positions[l - 1];
            size_t keep_n = std::max<size_t>(1, prev.size() / 4);
            std::vector<std::int32_t> perm(prev.size());
            for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int32_t>(i);
            for (size_t i = perm.size(); i > 1; --i)
                std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
            perm.resize(keep_n);
            std::sort(perm.begin(), perm.end());
            plan.keep[l] = perm;
            plan.positions[l].reserve(keep_n);
            for (auto i : perm) plan.positions[l].push_back(prev[i]);
        }

        const auto& pts = plan.positions[l];
        KdTree tree(pts);
        size_t nb_avail = std::min<size_t>(neighbors, pts.size());
        plan.knn[l].resize(pts.size() * neighbors);
        plan.relenc[l] = Tensor({static_cast<std::int64_t>(pts.size() * neighbors), EncoderPlan::kRelDim});
        float* rp = plan.relenc[l].ptr();
        for (size_t i = 0; i < pts.size(); ++i) {
            auto idx = tree.knn(pts[i], nb_avail);
            for (int j = 0; j < neighbors; ++j) {
                // Short neighborhoods pad by repeating the farthest neighbor.
                std::int32_t nj = static_cast<std::int32_t>(idx[std::min<size_t>(j, idx.size() - 1)]);
                plan.knn[l][i * neighbors + j] = nj;
                const Vec3f& pi = pts[i];
                const Vec3f& pj = pts[static_cast<size_t>(nj)];
                float* row = rp + (i * neighbors + j) * 10;
                row[0] = pi.x; row[1] = pi.y; row[2] = pi.z;
                row[3] = pj.x; row[4] = pj.y; row[5] = pj.z;
                row[6] = pi.x - pj.x; row[7] = pi.y - pj.y; row[8] = pi.z - pj.z;
                row[9] = norm(pi - pj);
            }
        }
    }

    for (int l = 0; l < EncoderPlan::kLevels - 1; ++l) {
        KdTree tree(plan.positions[l + 1]);
        plan.up[l].resize(plan.positions[l].size());
        for (size_t i = 0; i < plan.positions[l].size(); ++i)
            plan.up[l][i] = static_cast<std::int32_t>(tree.nearest(plan.positions[l][i]).first);
    }
    return plan;
}

// Tape-based encoder forward: [N, 32] per-point features.
template <class S>
VarT<S> encoder_forward(TapeT<S>& tape, ParamBankT<S>& bank, const EncoderPlan& plan,
                        EncoderParamsT<S>& params) {
    const int nb = plan.neighbors;
    std::array<VarT<S>, EncoderPlan::kLevels> enc;

    for (int l = 0; l < EncoderPlan::kLevels; ++l) {
        auto rel = tape.constant(plan.relenc[l].template cast<S>());
        VarT<S> block_in;
        if (l == 0) {
            block_in = rel;
        } else {
            auto own = tape.gather_rows(enc[l - 1], plan.keep[l]);  // [N_l, w_{l-1}]
            auto nb_feat = tape.gather_rows(own, plan.knn[l]);      // [N_l*nb, w_{l-1}]
            block_in = tape.concat_last({rel, nb_feat});
        }
        auto hidden = tape.leaky_relu(bank.linear(block_in, params.enc_mlp[l]));  // [N_l*nb, w_l]
        enc[l] = bank.attpool(hidden, params.enc_pool[l], nb);                    // [N_l, w_l]
    }

    VarT<S> up_feat = enc[EncoderPlan::kLevels - 1];
    for (int l = EncoderPlan::kLevels - 2; l >= 0; --l) {
        auto lifted = tape.gather_rows(up_feat, plan.up[l]);  // [N_l, w_{l+1}]
        auto cat = tape.concat_last({enc[l], lifted});
        up_feat = tape.leaky_relu(bank.linear(cat, params.dec_mlp[l]));  // [N_l, w_l]
    }
    return bank.linear(up_feat, params.out_proj);  // [N, 32]
}

// A point cloud with per-point features and a kNN index, ready for queries.
struct FeatureCloud {
    std::vector<Vec3f> positions;
    Tensor features;  // [N, 32]
    std::shared_ptr<KdTree> tree;

    size_t size() const { return positions.size(); }
};

inline FeatureCloud extract_features(const std::vector<Vec3f>& cloud, EncoderParams& params,
                                     std::uint64_t seed) {
    auto plan = build_encoder_plan(cloud, seed, params.neighbors);
    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto f = encoder_forward(tape, bank, plan, params);
    FeatureCloud out;
    out.positions = cloud;
    out.features = f->value;
    out.tree = std::make_shared<KdTree>(cloud);
    return out;
}

}  // namespace rangeudf
