#pragma once

#include "rangeudf/model.hpp"

namespace rangeudf {

// Queryable unsigned distance field with gradients. Implementations must be
// safe for concurrent batched evaluation. A zero gradient signals a singular
// point (the caller discards it unless the distance itself is ~0).
class DistanceField {
public:
    virtual ~DistanceField() = default;

    virtual void evaluate(const std::vector<Vec3f>& q, std::vector<float>& d) const = 0;
    virtual void evaluate_with_gradient(const std::vector<Vec3f>& q, std::vector<float>& d,
                                        std::vector<Vec3f>& grad) const = 0;

    float evaluate_one(const Vec3f& q) const {
        std::vector<float> d;
        evaluate({q}, d);
        return d[0];
    }
};

// d(q) = | |q - c| - r |: the exact unsigned distance to a sphere surface.
class SphereField final : public DistanceField {
public:
    SphereField(Vec3f center, float radius) : center_(center), radius_(radius) {}

    void evaluate(const std::vector<Vec3f>& q, std::vector<float>& d) const override {
        d.resize(q.size());
        for (size_t i = 0; i < q.size(); ++i)
            d[i] = std::abs(norm(q[i] - center_) - radius_);
    }

    void evaluate_with_gradient(const std::vector<Vec3f>& q, std::vector<float>& d,
                                std::vector<Vec3f>& grad) const override {
        d.resize(q.size());
        grad.resize(q.size());
        for (size_t i = 0; i < q.size(); ++i) {
            Vec3f r = q[i] - center_;
            float len = norm(r);
            float s = len - radius_;
            d[i] = std::abs(s);
            if (len < 1e-12f) grad[i] = {0, 0, 0};  // singular at the center
            else grad[i] = r * ((s >= 0 ? 1.0f : -1.0f) / len);
        }
    }

private:
    Vec3f center_;
    float radius_;
};

// d(q) = |q_z - z0|: unsigned distance to a horizontal plane.
class PlaneField final : public DistanceField {
public:
    explicit PlaneField(float z0) : z0_(z0) {}

    void evaluate(const std::vector<Vec3f>& q, std::vector<float>& d) const override {
        d.resize(q.size());
        for (size_t i = 0; i < q.size(); ++i) d[i] = std::abs(q[i].z - z0_);
    }

    void evaluate_with_gradient(const std::vector<Vec3f>& q, std::vector<float>& d,
                                std::vector<Vec3f>& grad) const override {
        d.resize(q.size());
        grad.resize(q.size());
        for (size_t i = 0; i < q.size(); ++i) {
            float s = q[i].z - z0_;
            d[i] = std::abs(s);
            grad[i] = {0, 0, s >= 0 ? 1.0f : -1.0f};
        }
    }

private:
    float z0_;
};

class ConstantField final : public DistanceField {
public:
    explicit ConstantField(float value) : value_(value) {}
    void evaluate(const std::vector<Vec3f>& q, std::vector<float>& d) const override {
        d.assign(q.size(), value_);
    }
    void evaluate_with_gradient(const std::vector<Vec3f>& q, std::vector<float>& d,
                                std::vector<Vec3f>& grad) const override {
        d.assign(q.size(), value_);
        grad.assign(q.size(), Vec3f{0, 0, 0});
    }

private:
    float value_;
};

namespace detail {

struct HeadBatchInputs {
    Tensor q;                          // [M, 3]
    Tensor nb_pos;                     // [M*K, 3]
    std::vector<std::int32_t> nb_idx;  // [M*K]
};

inline HeadBatchInputs gather_head_inputs(const FeatureCloud& scene, const std::vector<Vec3f>& queries,
                                          std::int64_t k) {
    if (k < 1 || static_cast<size_t>(k) > scene.size())
        throw ValidationError("head inputs: K outside [1, N]");
    const std::int64_t m = static_cast<std::int64_t>(queries.size());
    HeadBatchInputs in;
    in.q = Tensor({m, 3});
    in.nb_pos = Tensor({m * k, 3});
    in.nb_idx.resize(m * k);
    parallel_for(m, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            in.q.data[i * 3 + 0] = queries[i].x;
            in.q.data[i * 3 + 1] = queries[i].y;
            in.q.data[i * 3 + 2] = queries[i].z;
            auto idx = scene.tree->knn(queries[i], static_cast<size_t>(k));
            for (std::int64_t j = 0; j < k; ++j) {
                in.nb_idx[i * k + j] = static_cast<std::int32_t>(idx[j]);
                const Vec3f& p = scene.positions[idx[j]];
                in.nb_pos.data[(i * k + j) * 3 + 0] = p.x;
                in.nb_pos.data[(i * k + j) * 3 + 1] = p.y;
                in.nb_pos.data[(i * k + j) * 3 + 2] = p.z;
            }
        }
    });
    return in;
}

}  // namespace detail

// Distance-only batched inference (semantic branch skipped).
inline std::vector<float> model_distances(const FeatureCloud& scene, const std::vector<Vec3f>& queries,
                                          std::int64_t k, ModelParams& params) {
    if (queries.empty()) return {};
    auto in = detail::gather_head_inputs(scene, queries, k);
    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto features = tape.constant(scene.features);
    auto qv = tape.constant(std::move(in.q));
    auto pv = tape.constant(std::move(in.nb_pos));
    auto nb_feat = tape.gather_rows(features, in.nb_idx);
    auto range_vecs = encode_range_rows(tape, bank, qv, pv, k, params);
    auto fq = interpolate_udf_rows(tape, bank, range_vecs, nb_feat, k, params);
    auto d = regress_distance_rows(tape, bank, fq, params);
    return d->value.data;
}

// Distance plus gradient wrt the query position via reverse-mode autodiff.
// Rows are independent, so one backward from sum(d) yields every per-query
// gradient exactly.
inline void model_distances_grad(const FeatureCloud& scene, const std::vector<Vec3f>& queries,
                                 std::int64_t k, ModelParams& params, std::vector<float>& d,
                                 std::vector<Vec3f>& grad) {
    d.clear();
    grad.clear();
    if (queries.empty()) return;
    auto in = detail::gather_head_inputs(scene, queries, k);
    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto features = tape.constant(scene.features);
    auto qv = tape.leaf(std::move(in.q), true);
    auto pv = tape.constant(std::move(in.nb_pos));
    auto nb_feat = tape.gather_rows(features, in.nb_idx);
    auto range_vecs = encode_range_rows(tape, bank, qv, pv, k, params);
    auto fq = interpolate_udf_rows(tape, bank, range_vecs, nb_feat, k, params);
    auto dist = regress_distance_rows(tape, bank, fq, params);
    tape.backward(tape.sum_all(dist));
    d = dist->value.data;
    grad.resize(queries.size());
    for (size_t i = 0; i < queries.size(); ++i)
        grad[i] = {qv->grad.data[i * 3 + 0], qv->grad.data[i * 3 + 1], qv->grad.data[i * 3 + 2]};
}

// Semantic-only batched inference: argmax class per query.
inline std::vector<std::uint32_t> model_labels(const FeatureCloud& scene,
                                               const std::vector<Vec3f>& queries, std::int64_t k,
                                               ModelParams& params) {
    if (queries.empty()) return {};
    auto in = detail::gather_head_inputs(scene, queries, k);
    Tape tape;
    ParamBankT<float> bank(tape, false);
    auto features = tape.constant(scene.features);
    auto qv = tape.constant(std::move(in.q));
    auto pv = tape.constant(std::move(in.nb_pos));
    auto nb_feat = tape.gather_rows(features, in.nb_idx);
    auto logits = segment_semantics_rows(tape, bank, qv, pv, nb_feat, k, params);
    const std::int64_t c = params.class_count;
    std::vector<std::uint32_t> out(queries.size());
    for (size_t i = 0; i < queries.size(); ++i) {
        const float* row = logits->value.ptr() + static_cast<std::int64_t>(i) * c;
        std::uint32_t best = 0;
        for (std::int64_t j = 1; j < c; ++j)
            if (row[j] > row[best]) best = static_cast<std::uint32_t>(j);
        out[i] = best;
    }
    return out;
}

// The learned model as a DistanceField. Gradients come from autodiff by
// default; central finite differences (h = 1e-3) are available as a fallback.
class ModelField final : public DistanceField {
public:
    enum class GradMode { Autodiff, FiniteDifference };

    ModelField(FeatureCloud scene, ModelParams& params, std::int64_t k,
               GradMode mode = GradMode::Autodiff)
        : scene_(std::move(scene)), params_(&params), k_(k), mode_(mode) {}

    const FeatureCloud& scene() const { return scene_; }

    void evaluate(const std::vector<Vec3f>& q, std::vector<float>& d) const override {
        d = model_distances(scene_, q, k_, *params_);
    }

    void evaluate_with_gradient(const std::vector<Vec3f>& q, std::vector<float>& d,
                                std::vector<Vec3f>& grad) const override {
        if (mode_ == GradMode::Autodiff) {
            model_distances_grad(scene_, q, k_, *params_, d, grad);
            return;
        }
        const float h = 1e-3f;
        evaluate(q, d);
        std::vector<Vec3f> shifted(q.size());
        grad.assign(q.size(), Vec3f{0, 0, 0});
        for (int axis = 0; axis < 3; ++axis) {
            std::vector<float> dp, dm;
            shifted = q;
            for (auto& p : shifted) (&p.x)[axis] += h;
            evaluate(shifted, dp);
            shifted = q;
            for (auto& p : shifted) (&p.x)[axis] -= h;
            evaluate(shifted, dm);
            for (size_t i = 0; i < q.size(); ++i) (&grad[i].x)[axis] = (dp[i] - dm[i]) / (2 * h);
        }
    }

private:
    FeatureCloud scene_;
    ModelParams* params_;
    std::int64_t k_;
    GradMode mode_;
};

}  // namespace rangeudf
