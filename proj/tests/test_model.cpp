#include <gtest/gtest.h>

#include "rangeudf/field.hpp"
#include "rangeudf/model.hpp"
#include "test_util.hpp"

using namespace rangeudf;

namespace {

std::vector<Vec3f> random_cloud(size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec3f> pts(n);
    for (auto& p : pts)
        p = {static_cast<float>(rng.uniform(-0.5, 0.5)), static_cast<float>(rng.uniform(-0.5, 0.5)),
             static_cast<float>(rng.uniform(-0.5, 0.5))};
    return pts;
}

NeighborBundle random_bundle(size_t k, std::uint64_t seed) {
    Rng rng(seed);
    NeighborBundle b;
    b.query = {static_cast<float>(rng.uniform(-0.3, 0.3)), static_cast<float>(rng.uniform(-0.3, 0.3)),
               static_cast<float>(rng.uniform(-0.3, 0.3))};
    b.positions.resize(k);
    for (auto& p : b.positions)
        p = {static_cast<float>(rng.uniform(-0.3, 0.3)), static_cast<float>(rng.uniform(-0.3, 0.3)),
             static_cast<float>(rng.uniform(-0.3, 0.3))};
    b.features = Tensor({static_cast<std::int64_t>(k), 32});
    for (auto& v : b.features.data) v = static_cast<float>(rng.uniform(-1, 1));
    return b;
}

}  // namespace

TEST(ModelParams, DimensionsMatchArchitecture) {
    ModelParams m(5, 1);
    EXPECT_EQ(m.range_mlp.in_dim(), 9);  // (q - p) (+) q (+) p
    EXPECT_EQ(m.range_mlp.out_dim(), 32);
    EXPECT_EQ(m.udf_pool.set_dim(), 64);
    EXPECT_EQ(m.udf_pool.proj.out_dim(), 32);
    EXPECT_EQ(m.udf_head[0].in_dim(), 32);
    EXPECT_EQ(m.udf_head[0].out_dim(), 512);
    EXPECT_EQ(m.udf_head[1].out_dim(), 32);
    EXPECT_EQ(m.udf_head[2].out_dim(), 32);
    EXPECT_EQ(m.udf_head[3].out_dim(), 1);
    EXPECT_EQ(m.sem_pool.set_dim(), 35);  // p (+) F
    EXPECT_EQ(m.sem_pool.proj.out_dim(), 32);
    EXPECT_EQ(m.sem_head[0].in_dim(), 32);
    EXPECT_EQ(m.sem_head[0].out_dim(), 64);
    EXPECT_EQ(m.sem_head[1].out_dim(), 32);
    EXPECT_EQ(m.sem_head[2].out_dim(), 5);
    EXPECT_TRUE(std::isfinite(m.s1.value.data[0]));
    EXPECT_TRUE(std::isfinite(m.s2.value.data[0]));

    ModelParams ablated(3, 1, AblationFlags{true, true});
    EXPECT_EQ(ablated.range_mlp.in_dim(), 3);  // p only
    EXPECT_EQ(ablated.sem_pool.set_dim(), 38);  // p (+) F (+) q
}

TEST(EncodeRange, ZeroWeightsGiveZero) {
    ModelParams m(1, 2);
    std::fill(m.range_mlp.w.value.data.begin(), m.range_mlp.w.value.data.end(), 0.f);
    std::fill(m.range_mlp.b.value.data.begin(), m.range_mlp.b.value.data.end(), 0.f);
    auto r = encode_range<float>({0.1f, 0.2f, 0.3f}, {0.0f, -0.1f, 0.2f}, m);
    for (float v : r.data) EXPECT_EQ(v, 0.f);
}

TEST(EncodeRange, SensitiveToNeighborPosition) {
    ModelParams m(1, 3);
    Vec3f q{0.1f, 0.1f, 0.1f};
    auto r1 = encode_range<float>(q, {0.0f, 0.0f, 0.0f}, m);
    auto r2 = encode_range<float>(q, {0.05f, 0.0f, 0.0f}, m);
    EXPECT_EQ(r1.numel(), 32);
    EXPECT_NE(r1.data, r2.data);
    // q = p zeroes the relative term only; the output is still well-defined.
    auto r3 = encode_range<float>(q, q, m);
    EXPECT_TRUE(r3.finite());
}

TEST(InterpolateUdf, PermutationInvariant) {
    ModelParams m(1, 4);
    auto b = random_bundle(5, 9);
    auto base = interpolate_udf(b, m);
    NeighborBundle rot = b;
    std::rotate(rot.positions.begin(), rot.positions.begin() + 2, rot.positions.end());
    Tensor feats(rot.features.shape);
    for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 32; ++c) feats.data[i * 32 + c] = b.features.data[((i + 2) % 5) * 32 + c];
    rot.features = feats;
    auto rotated = interpolate_udf(rot, m);
    for (int c = 0; c < 32; ++c) EXPECT_NEAR(base.data[c], rotated.data[c], 1e-6);
}

TEST(InterpolateUdf, QueryPositionBreaksAmbiguity) {
    // Identical neighbors and features, different query: the range-aware
    // interpolation differs while inverse-distance weighting cannot separate
    // configurations with equal distance sets.
    ModelParams m(1, 5);
    auto b1 = random_bundle(4, 10);
    NeighborBundle b2 = b1;
    b2.query.z += 0.05f;
    auto f1 = interpolate_udf(b1, m);
    auto f2 = interpolate_udf(b2, m);
    double diff = 0;
    for (int c = 0; c < 32; ++c) diff += std::abs(f1.data[c] - f2.data[c]);
    EXPECT_GT(diff, 1e-6);
}

TEST(IdwBaseline, CoincidentNeighborDominates) {
    auto b = random_bundle(4, 11);
    b.query = b.positions[0];
    auto f = idw_baseline_interpolate(b);
    for (int c = 0; c < 32; ++c) EXPECT_NEAR(f.data[c], b.features.data[c], 1e-5);
}

TEST(IdwBaseline, EquidistantNeighborsAverage) {
    NeighborBundle b;
    b.query = {0, 0, 0};
    b.positions = {{0.1f, 0, 0}, {-0.1f, 0, 0}, {0, 0.1f, 0}, {0, -0.1f, 0}};
    b.features = Tensor({4, 2}, {1, 10, 2, 20, 3, 30, 4, 40});
    auto f = idw_baseline_interpolate(b);
    EXPECT_NEAR(f.data[0], 2.5f, 1e-6);
    EXPECT_NEAR(f.data[1], 25.f, 1e-5);
}

TEST(IdwBaseline, MirroredQueriesCollapseToOneFeature) {
    // Two scenes with identical neighbor distance sets but different true
    // distances: inverse-distance weights produce one interpolated feature
    // for both, so any downstream head emits one value for two targets.
    NeighborBundle above;
    above.query = {0, 0, 0.08f};
    above.positions = {{0.05f, 0, 0}, {-0.05f, 0, 0}, {0, 0.05f, 0}, {0, -0.05f, 0}};
    above.features = Tensor({4, 32});
    Rng rng(12);
    for (auto& v : above.features.data) v = static_cast<float>(rng.uniform(-1, 1));
    NeighborBundle below = above;
    below.query = {0, 0, -0.08f};  // same distance multiset to every neighbor
    auto fa = idw_baseline_interpolate(above);
    auto fb = idw_baseline_interpolate(below);
    EXPECT_EQ(fa.data, fb.data);
}

TEST(RegressDistance, NonNegativeForRandomInputsAndWeights) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ModelParams m(1, seed);
        Rng rng(seed + 100);
        Tensor fq({1000, 32});
        for (auto& v : fq.data) v = static_cast<float>(rng.uniform(-3, 3));
        Tape tape;
        ParamBankT<float> bank(tape, false);
        auto d = regress_distance_rows(tape, bank, tape.constant(fq), m);
        for (float v : d->value.data) EXPECT_GE(v, 0.f);
    }
}

TEST(RegressDistance, NegativePreActivationClipsToZero) {
    ModelParams m(1, 6);
    // Force the last layer to a large negative constant.
    std::fill(m.udf_head[3].w.value.data.begin(), m.udf_head[3].w.value.data.end(), 0.f);
    m.udf_head[3].b.value.data[0] = -5.f;
    Tensor fq({1, 32});
    EXPECT_EQ(regress_distance(fq, m), 0.f);
}

TEST(SegmentSemantics, RowDimensionAndQueryIndependence) {
    ModelParams m(4, 7);
    auto b = random_bundle(4, 13);
    auto l1 = segment_semantics(b, m);
    EXPECT_EQ(l1.numel(), 4);
    NeighborBundle moved = b;
    moved.query = {0.4f, -0.4f, 0.2f};
    auto l2 = segment_semantics(moved, m);
    EXPECT_EQ(l1.data, l2.data);  // bit-identical: q is not an input
}

TEST(SegmentSemantics, PermutationInvariant) {
    ModelParams m(3, 8);
    auto b = random_bundle(6, 14);
    auto base = segment_semantics(b, m);
    NeighborBundle rot = b;
    std::rotate(rot.positions.begin(), rot.positions.begin() + 3, rot.positions.end());
    Tensor feats(rot.features.shape);
    for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 32; ++c) feats.data[i * 32 + c] = b.features.data[((i + 3) % 6) * 32 + c];
    rot.features = feats;
    auto rotated = segment_semantics(rot, m);
    for (size_t c = 0; c < base.data.size(); ++c) EXPECT_NEAR(base.data[c], rotated.data[c], 1e-6);
}

TEST(SegmentSemantics, WithQueryAblationReactsToQuery) {
    ModelParams m(3, 9, AblationFlags{false, true});
    auto b = random_bundle(4, 15);
    auto l1 = segment_semantics(b, m);
    NeighborBundle moved = b;
    moved.query.x += 0.1f;
    auto l2 = segment_semantics(moved, m);
    EXPECT_NE(l1.data, l2.data);
}

TEST(Forward, ShapesAndBatchEqualsSingles) {
    Rng rng(16);
    ModelParams m(3, 10);
    auto cloud = random_cloud(128, 17);
    auto fc = extract_features(cloud, m.encoder, 5);
    auto queries = random_cloud(20, 18);
    auto batch = forward_batch(fc, queries, 4, m);
    ASSERT_EQ(batch.distances.size(), 20u);
    ASSERT_EQ(batch.logits.shape, (std::vector<std::int64_t>{20, 3}));
    for (size_t i = 0; i < queries.size(); ++i) {
        auto single = forward(fc, queries[i], 4, m);
        EXPECT_EQ(single.distance, batch.distances[i]);  // bit-identical
        ASSERT_EQ(single.logits.size(), 3u);
        for (int c = 0; c < 3; ++c) EXPECT_EQ(single.logits[c], batch.logits.data[i * 3 + c]);
        EXPECT_GE(single.distance, 0.f);
    }
}

TEST(Forward, KLargerThanCloudFails) {
    ModelParams m(1, 11);
    auto cloud = random_cloud(64, 19);
    auto fc = extract_features(cloud, m.encoder, 1);
    EXPECT_THROW(forward(fc, {0, 0, 0}, 65, m), ValidationError);
}

TEST(HeadGradients, FullStackMatchesFiniteDifferences) {
    // End-to-end head check in f64: encoder features frozen, every head
    // parameter verified against central differences.
    ModelParams mf(3, 12);
    auto model = mf.cast<double>();
    Rng rng(20);
    const std::int64_t n = 40, m_q = 6, k = 4;
    TensorT<double> features({n, 32});
    for (auto& v : features.data) v = rng.uniform(-1, 1);
    TensorT<double> q({m_q, 3}), nb_pos({m_q * k, 3});
    for (auto& v : q.data) v = rng.uniform(-0.4, 0.4);
    for (auto& v : nb_pos.data) v = rng.uniform(-0.4, 0.4);
    std::vector<std::int32_t> nb_idx(m_q * k);
    for (auto& i : nb_idx) i = static_cast<std::int32_t>(rng.uniform_index(n));
    std::vector<std::int32_t> labels = {0, 1, 2, 0, 1, 2};

    auto build = [&](TapeT<double>& tape, ParamBankT<double>& bank, ModelParamsT<double>& mm) {
        auto f = tape.constant(features);
        auto qv = tape.constant(q);
        auto pv = tape.constant(nb_pos);
        auto heads = model_heads(tape, bank, f, qv, pv, nb_idx, k, mm);
        auto dloss = tape.mean_all(heads.distance);
        auto closs = tape.softmax_cross_entropy(heads.logits, labels);
        return tape.add(dloss, closs);
    };

    std::vector<ParamT<double>*> check = {&model.range_mlp.w,    &model.range_mlp.b,
                                          &model.udf_pool.att_w, &model.udf_pool.att_b,
                                          &model.udf_pool.proj.w, &model.udf_head[0].b,
                                          &model.udf_head[1].b,  &model.udf_head[3].w,
                                          &model.sem_pool.att_w, &model.sem_pool.proj.b,
                                          &model.sem_head[0].b,  &model.sem_head[2].w};
    auto stats = testutil::model_grad_check(model, build, check, 1e-3, 256);
    EXPECT_LT(stats.max_rel, 1e-4);
    EXPECT_GT(stats.checked, 10 * stats.kink_skipped);  // kink exclusions stay rare
}

TEST(ModelField, QueryGradientMatchesFiniteDifferences) {
    ModelParams m(1, 13);
    auto cloud = random_cloud(128, 21);
    auto fc = extract_features(cloud, m.encoder, 6);
    ModelField auto_field(fc, m, 4, ModelField::GradMode::Autodiff);
    ModelField fd_field(fc, m, 4, ModelField::GradMode::FiniteDifference);
    auto queries = random_cloud(10, 22);
    std::vector<float> da, dfd;
    std::vector<Vec3f> ga, gfd;
    auto_field.evaluate_with_gradient(queries, da, ga);
    fd_field.evaluate_with_gradient(queries, dfd, gfd);
    for (size_t i = 0; i < queries.size(); ++i) {
        EXPECT_EQ(da[i], dfd[i]);
        // FD across kNN cell boundaries can disagree; compare only where the
        // gradient is clearly nonzero and smooth.
        if (norm(ga[i]) > 1e-3f && norm(gfd[i]) > 1e-3f)
            EXPECT_LT(norm(ga[i] - gfd[i]) / norm(ga[i]), 0.2f);
    }
}
