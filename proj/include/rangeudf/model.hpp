#pragma once

#include "rangeudf/encoder.hpp"

namespace rangeudf {

struct AblationFlags {
    // Removes the query-position information ((q - p_k) and q) from the range
    // encoding input, leaving p_k alone.
    bool no_range_term = false;
    // Appends q to the semantic branch input rows.
    bool sem_with_q = false;

    bool operator==(const AblationFlags& o) const {
        return no_range_term == o.no_range_term && sem_with_q == o.sem_with_q;
    }
};

// All learnable weights: encoder, range MLP (9->32), attention pooling over
// the 64-D distance rows and 35-D semantic rows (each with a 32-D output
// projection), the distance head 32->512->32->32->1, the semantic head
// 32->64->32->C, and the two task log-variance scalars.
template <class S>
struct ModelParamsT {
    static constexpr std::int64_t kRangeDim = 32;
    static constexpr std::int64_t kFeatureDim = 32;

    EncoderParamsT<S> encoder;
    DenseLayerT<S> range_mlp;
    AttPoolWeightsT<S> udf_pool;
    std::array<DenseLayerT<S>, 4> udf_head;
    AttPoolWeightsT<S> sem_pool;
    std::array<DenseLayerT<S>, 3> sem_head;
    ParamT<S> s1, s2;  // log-variances of the two task losses

    std::uint32_t class_count = 1;
    AblationFlags flags;

    ModelParamsT() = default;
    ModelParamsT(std::uint32_t classes, std::uint64_t seed, AblationFlags abl = {},
                 int encoder_neighbors = 8)
        : class_count(classes), flags(abl) {
        if (classes < 1) throw ValidationError("class_count must be >= 1");
        Rng rng(derive_seed(seed, 0x90de1ull));
        encoder = EncoderParamsT<S>(rng, encoder_neighbors);
        const std::int64_t range_in = flags.no_range_term ? 3 : 9;
        range_mlp = DenseLayerT<S>("range_mlp", range_in, kRangeDim, rng);
        udf_pool = AttPoolWeightsT<S>("udf_pool", kRangeDim + kFeatureDim, 32, rng);
        udf_head[0] = DenseLayerT<S>("udf_head.0", 32, 512, rng);
        udf_head[1] = DenseLayerT<S>("udf_head.1", 512, 32, rng);
        udf_head[2] = DenseLayerT<S>("udf_head.2", 32, 32, rng);
        udf_head[3] = DenseLayerT<S>("udf_head.3", 32, 1, rng);
        // The final ReLU clips to d >= 0. A positive bias at the clamped
        // distance scale keeps the output layer from being born with an
        // all-negative pre-activation, which would zero every gradient
        // through the clip.
        udf_head[3].b.value.data[0] = S(0.05);
        const std::int64_t sem_in = 3 + kFeatureDim + (flags.sem_with_q ? 3 : 0);
        sem_pool = AttPoolWeightsT<S>("sem_pool", sem_in, 32, rng);
        sem_head[0] = DenseLayerT<S>("sem_head.0", 32, 64, rng);
        sem_head[1] = DenseLayerT<S>("sem_head.1", 64, 32, rng);
        sem_head[2] = DenseLayerT<S>("sem_head.2", 32, static_cast<std::int64_t>(classes), rng);
        s1 = ParamT<S>("uncertainty.s1", TensorT<S>({1}));
        s2 = ParamT<S>("uncertainty.s2", TensorT<S>({1}));
    }

    std::vector<ParamT<S>*> parameters() {
        std::vector<ParamT<S>*> out;
        encoder.collect(out);
        auto dense = [&](DenseLayerT<S>& d) {
            out.push_back(&d.w);
            out.push_back(&d.b);
        };
        auto pool = [&](AttPoolWeightsT<S>& p) {
            out.push_back(&p.att_w);
            out.push_back(&p.att_b);
            dense(p.proj);
        };
        dense(range_mlp);
        pool(udf_pool);
        for (auto& d : udf_head) dense(d);
        pool(sem_pool);
        for (auto& d : sem_head) dense(d);
        out.push_back(&s1);
        out.push_back(&s2);
        return out;
    }

    template <class T>
    ModelParamsT<T> cast() const {
        ModelParamsT<T> out;
        out.class_count = class_count;
        out.flags = flags;
        out.encoder = encoder.template cast<T>();
        out.range_mlp = range_mlp.template cast<T>();
        out.udf_pool = udf_pool.template cast<T>();
        for (size_t i = 0; i < udf_head.size(); ++i) out.udf_head[i] = udf_head[i].template cast<T>();
        out.sem_pool = sem_pool.template cast<T>();
        for (size_t i = 0; i < sem_head.size(); ++i) out.sem_head[i] = sem_head[i].template cast<T>();
        out.s1 = ParamT<T>(s1.name, s1.value.template cast<T>());
        out.s2 = ParamT<T>(s2.name, s2.value.template cast<T>());
        return out;
    }
};

using ModelParams = ModelParamsT<float>;

// One query's neighborhood: the query position, its K nearest surface points
// and their features.
template <class S>
struct NeighborBundleT {
    Vec3T<S> query;
    std::vector<Vec3T<S>> positions;
    TensorT<S> features;  // [K, 32]

    std::int64_t k() const { return static_cast<std::int64_t>(positions.size()); }
};

using NeighborBundle = NeighborBundleT<float>;

namespace detail {

template <class S>
TensorT<S> flatten_positions(const std::vector<Vec3T<S>>& pts) {
    TensorT<S> t({static_cast<std::int64_t>(pts.size()), 3});
    for (size_t i = 0; i < pts.size(); ++i) {
        t.data[i * 3 + 0] = pts[i].x;
        t.data[i * 3 + 1] = pts[i].y;
        t.data[i * 3 + 2] = pts[i].z;
    }
    return t;
}

}  // namespace detail

// Range encoding input rows for a batch: q expanded to [M*K, 3] against the
// neighbor positions. Full mode concatenates (q - p_k) (+) q (+) p_k (9-D);
// the ablated mode keeps only p_k (3-D). q may require gradients.
template <class S>
VarT<S> range_input_rows(TapeT<S>& tape, const VarT<S>& q, const VarT<S>& nb_pos, std::int64_t k,
                         bool no_range_term) {
    if (no_range_term) return nb_pos;
    auto q_exp = tape.expand_rows(q, k);
    return tape.concat_last({tape.sub(q_exp, nb_pos), q_exp, nb_pos});
}

// R_k^q = leaky_relu(MLP(range input)): [M*K, 32].
template <class S>
VarT<S> encode_range_rows(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& q,
                          const VarT<S>& nb_pos, std::int64_t k, ModelParamsT<S>& params) {
    auto rows = range_input_rows(tape, q, nb_pos, k, params.flags.no_range_term);
    return tape.leaky_relu(bank.linear(rows, params.range_mlp));
}

// Neural interpolation: concat range vectors with neighbor features (64-D
// rows), attention-pool over K, project to the 32-D query feature.
template <class S>
VarT<S> interpolate_udf_rows(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& range_vecs,
                             const VarT<S>& nb_feat, std::int64_t k, ModelParamsT<S>& params) {
    auto rows = tape.concat_last({range_vecs, nb_feat});  // [M*K, 64]
    return bank.attpool(rows, params.udf_pool, k);        // [M, 32]
}

// Pre-clip distance stack: 32 -> 512 -> 32 -> 32 -> 1 with LeakyReLU(0.2)
// between layers. The training loss regresses this value (its optimum equals
// the nonnegative target, and unlike the clipped output it never loses its
// gradient); every inference path clips it with the final ReLU.
template <class S>
VarT<S> distance_head_pre_rows(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& fq,
                               ModelParamsT<S>& params) {
    auto h = tape.leaky_relu(bank.linear(fq, params.udf_head[0]));
    h = tape.leaky_relu(bank.linear(h, params.udf_head[1]));
    h = tape.leaky_relu(bank.linear(h, params.udf_head[2]));
    return bank.linear(h, params.udf_head[3]);  // [M, 1]
}

// Distance head with the final ReLU clipping the distance to >= 0.
template <class S>
VarT<S> regress_distance_rows(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& fq,
                              ModelParamsT<S>& params) {
    return tape.relu(distance_head_pre_rows(tape, bank, fq, params));
}

// Surface-oriented semantic head: rows p_k (+) F_k (35-D; q never enters
// unless the sem_with_q ablation is on), attention pooling, then
// 32 -> 64 -> 32 -> C.
template <class S>
VarT<S> segment_semantics_rows(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& q,
                               const VarT<S>& nb_pos, const VarT<S>& nb_feat, std::int64_t k,
                               ModelParamsT<S>& params) {
    std::vector<VarT<S>> parts = {nb_pos, nb_feat};
    if (params.flags.sem_with_q) parts.push_back(tape.expand_rows(q, k));
    auto rows = tape.concat_last(parts);                 // [M*K, 35(+3)]
    auto fq = bank.attpool(rows, params.sem_pool, k);    // [M, 32]
    auto h = tape.leaky_relu(bank.linear(fq, params.sem_head[0]));
    h = tape.leaky_relu(bank.linear(h, params.sem_head[1]));
    return bank.linear(h, params.sem_head[2]);  // [M, C]
}

template <class S>
struct HeadOutputsT {
    VarT<S> distance_pre;  // [M, 1], unclipped
    VarT<S> distance;      // [M, 1], >= 0
    VarT<S> logits;        // [M, C]
};

// Batched heads over M queries. nb_idx maps each of the M*K neighbor slots to
// a row of `features`.
template <class S>
HeadOutputsT<S> model_heads(TapeT<S>& tape, ParamBankT<S>& bank, const VarT<S>& features,
                            const VarT<S>& q, const VarT<S>& nb_pos,
                            const std::vector<std::int32_t>& nb_idx, std::int64_t k,
                            ModelParamsT<S>& params) {
    if (k < 1) throw ValidationError("model_heads: empty neighbor set (K=0)");
    auto nb_feat = tape.gather_rows(features, nb_idx);  // [M*K, 32]
    auto range_vecs = encode_range_rows(tape, bank, q, nb_pos, k, params);
    auto fq = interpolate_udf_rows(tape, bank, range_vecs, nb_feat, k, params);
    HeadOutputsT<S> out;
    out.distance_pre = distance_head_pre_rows(tape, bank, fq, params);
    out.distance = tape.relu(out.distance_pre);
    out.logits = segment_semantics_rows(tape, bank, q, nb_pos, nb_feat, k, params);
    return out;
}

struct ForwardResult {
    float distance = 0;
    std::vector<float> logits;
};

// Single-query convenience over a precomputed feature cloud; K nearest
// neighbors are fetched from the cloud's kd-tree.
inline ForwardResult forward(const FeatureCloud& scene, const Vec3f& q, std::int64_t k,
                             ModelParams& params) {
    if (k < 1 || static_cast<size_t>(k) > scene.size())
        throw ValidationError("forward: K outside [1, N]");
    auto idx = scene.tree->knn(q, static_cast<size_t>(k));
    std::vector<Vec3f> nb(idx.size());
    std::vector<std::int32_t> nb_idx(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        nb[i] = scene.positions[idx[i]];
        nb_idx[i] = static_cast<std::int32_t>(idx[i]);
    }
    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto features = tape.constant(scene.features);
    auto qv = tape.constant(detail::flatten_positions<float>({q}));
    auto pv = tape.constant(detail::flatten_positions<float>(nb));
    auto heads = model_heads(tape, bank, features, qv, pv, nb_idx, k, params);
    ForwardResult r;
    r.distance = heads.distance->value.data[0];
    r.logits = heads.logits->value.data;
    return r;
}

// Batched inference over M queries; equal to M single-query calls.
struct BatchForwardResult {
    std::vector<float> distances;        // M
    std::vector<std::uint32_t> argmax;   // M (class ids)
    Tensor logits;                       // [M, C]
};

inline BatchForwardResult forward_batch(const FeatureCloud& scene, const std::vector<Vec3f>& queries,
                                        std::int64_t k, ModelParams& params) {
    if (k < 1 || static_cast<size_t>(k) > scene.size())
        throw ValidationError("forward_batch: K outside [1, N]");
    const std::int64_t m = static_cast<std::int64_t>(queries.size());
    BatchForwardResult out;
    out.logits = Tensor({m, static_cast<std::int64_t>(params.class_count)});
    out.distances.resize(m);
    out.argmax.resize(m);
    if (m == 0) return out;

    std::vector<Vec3f> nb_pos(m * k);
    std::vector<std::int32_t> nb_idx(m * k);
    parallel_for(m, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            auto idx = scene.tree->knn(queries[i], static_cast<size_t>(k));
            for (std::int64_t j = 0; j < k; ++j) {
                nb_pos[i * k + j] = scene.positions[idx[j]];
                nb_idx[i * k + j] = static_cast<std::int32_t>(idx[j]);
            }
        }
    });

    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto features = tape.constant(scene.features);
    auto qv = tape.constant(detail::flatten_positions<float>(queries));
    auto pv = tape.constant(detail::flatten_positions<float>(nb_pos));
    auto heads = model_heads(tape, bank, features, qv, pv, nb_idx, k, params);
    for (std::int64_t i = 0; i < m; ++i) {
        out.distances[i] = heads.distance->value.data[i];
        const float* row = heads.logits->value.ptr() + i * params.class_count;
        std::uint32_t best = 0;
        for (std::uint32_t c = 1; c < params.class_count; ++c)
            if (row[c] > row[best]) best = c;
        out.argmax[i] = best;
    }
    out.logits = heads.logits->value;
    return out;
}

// Spec-shaped single-bundle entry points.

template <class S>
TensorT<S> encode_range(const Vec3T<S>& q, const Vec3T<S>& p, ModelParamsT<S>& params) {
    TapeT<S> tape;
    ParamBankT<S> bank(tape, false);
    auto qv = tape.constant(detail::flatten_positions<S>({q}));
    auto pv = tape.constant(detail::flatten_positions<S>({p}));
    return encode_range_rows(tape, bank, qv, pv, 1, params)->value;
}

template <class S>
TensorT<S> interpolate_udf(const NeighborBundleT<S>& bundle, ModelParamsT<S>& params) {
    if (bundle.k() < 1) throw ValidationError("interpolate_udf: empty neighbor set");
    TapeT<S> tape;
    ParamBankT<S> bank(tape, false);
    auto qv = tape.constant(detail::flatten_positions<S>({bundle.query}));
    auto pv = tape.constant(detail::flatten_positions<S>(bundle.positions));
    auto fv = tape.constant(bundle.features);
    auto range_vecs = encode_range_rows(tape, bank, qv, pv, bundle.k(), params);
    return interpolate_udf_rows(tape, bank, range_vecs, fv, bundle.k(), params)->value;
}

template <class S>
S regress_distance(const TensorT<S>& fq, ModelParamsT<S>& params) {
    TapeT<S> tape;
    ParamBankT<S> bank(tape, false);
    auto f = tape.constant(fq);
    return regress_distance_rows(tape, bank, f, params)->value.data[0];
}

template <class S>
TensorT<S> segment_semantics(const NeighborBundleT<S>& bundle, ModelParamsT<S>& params) {
    if (bundle.k() < 1) throw ValidationError("segment_semantics: empty neighbor set");
    TapeT<S> tape;
    ParamBankT<S> bank(tape, false);
    auto qv = tape.constant(detail::flatten_positions<S>({bundle.query}));
    auto pv = tape.constant(detail::flatten_positions<S>(bundle.positions));
    auto fv = tape.constant(bundle.features);
    return segment_semantics_rows(tape, bank, qv, pv, fv, bundle.k(), params)->value;
}

// Ablation baseline: inverse-distance weights over the neighbors instead of
// the learned range-aware pooling. Any two bundles with equal neighbor
// distances and features interpolate to the same vector.
template <class S>
TensorT<S> idw_baseline_interpolate(const NeighborBundleT<S>& bundle) {
    const std::int64_t k = bundle.k();
    if (k < 1) throw ValidationError("idw_baseline_interpolate: empty neighbor set");
    const std::int64_t d = bundle.features.last_dim();
    std::vector<double> w(k);
    double total = 0;
    for (std::int64_t i = 0; i < k; ++i) {
        double dist = norm(bundle.query - bundle.positions[i]);
        w[i] = 1.0 / (dist + 1e-8);
        total += w[i];
    }
    TensorT<S> out({d});
    for (std::int64_t i = 0; i < k; ++i) {
        double wn = w[i] / total;
        for (std::int64_t c = 0; c < d; ++c)
            out.data[c] += static_cast<S>(wn * static_cast<double>(bundle.features.data[i * d + c]));
    }
    return out;
}

}  // namespace rangeudf
