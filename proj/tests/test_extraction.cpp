#include <gtest/gtest.h>

#include "rangeudf/extraction.hpp"
#include "test_util.hpp"

using namespace rangeudf;

TEST(ProjectStep, SphereAnalyticProjection) {
    SphereField field({0, 0, 0}, 0.3f);
    auto r = project_step(field, {0.5f, 0, 0});
    ASSERT_TRUE(r.ok);
    EXPECT_NEAR(r.point.x, 0.3f, 1e-6);
    EXPECT_NEAR(r.point.y, 0.f, 1e-9);
}

TEST(ProjectStep, OnSurfacePointUnchanged) {
    SphereField field({0, 0, 0}, 0.3f);
    auto r = project_step(field, {0.3f, 0, 0});
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.point.x, 0.3f);
}

TEST(ProjectStep, SingularGradientDiscards) {
    SphereField field({0, 0, 0}, 0.3f);
    auto r = project_step(field, {0, 0, 0});  // center: gradient undefined
    EXPECT_FALSE(r.ok);
}

TEST(ProjectStep, ContractsResidualOnAnalyticFields) {
    SphereField sphere({0, 0, 0}, 0.3f);
    PlaneField plane(0.1f);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        Vec3f q{static_cast<float>(rng.uniform(-0.5, 0.5)), static_cast<float>(rng.uniform(-0.5, 0.5)),
                static_cast<float>(rng.uniform(-0.5, 0.5))};
        for (const DistanceField* f : {static_cast<const DistanceField*>(&sphere),
                                       static_cast<const DistanceField*>(&plane)}) {
            float before = f->evaluate_one(q);
            auto r = project_step(*f, q);
            if (!r.ok) continue;
            float after = f->evaluate_one(r.point);
            EXPECT_LE(after, before + 1e-6f);
        }
    }
}

TEST(ExtractDensePoints, SphereResiduals) {
    SphereField field({0, 0, 0}, 0.3f);
    ExtractParams params;
    params.n_min = 2000;
    params.seed = 3;
    auto pts = extract_dense_points(field, params);
    ASSERT_GE(pts.positions.size(), 2000u);
    size_t close = 0;
    for (const auto& p : pts.positions) close += std::abs(norm(p) - 0.3f) < 0.005f;
    EXPECT_GE(static_cast<double>(close) / pts.positions.size(), 0.99);
}

TEST(ExtractDensePoints, PlaneResiduals) {
    PlaneField field(0.0f);
    ExtractParams params;
    params.n_min = 2000;
    params.seed = 4;
    auto pts = extract_dense_points(field, params);
    for (const auto& p : pts.positions) EXPECT_LT(std::abs(p.z), 0.005f);
}

TEST(ExtractDensePoints, ConstantFieldFails) {
    ConstantField field(1.0f);
    ExtractParams params;
    params.n_min = 100;
    params.max_rounds = 5;
    try {
        extract_dense_points(field, params);
        FAIL() << "expected ExtractionFailure";
    } catch (const ExtractionFailure& e) {
        EXPECT_EQ(e.survivors, 0u);
    }
}

TEST(ExtractDensePoints, DeterministicPerSeed) {
    SphereField field({0, 0, 0}, 0.3f);
    ExtractParams params;
    params.n_min = 500;
    params.seed = 9;
    auto a = extract_dense_points(field, params);
    auto b = extract_dense_points(field, params);
    ASSERT_EQ(a.positions.size(), b.positions.size());
    for (size_t i = 0; i < a.positions.size(); ++i) EXPECT_EQ(a.positions[i], b.positions[i]);
}

TEST(ExtractMesh, SphereVertexRadialError) {
    SphereField field({0, 0, 0}, 0.3f);
    const int res = 64;
    auto mesh = extract_mesh(field, res, 0.003f);
    ASSERT_GT(mesh.faces.size(), 0u);
    const float bound = 2.0f / (res - 1) + 0.003f;
    for (const auto& v : mesh.vertices) EXPECT_LT(std::abs(norm(v) - 0.3f), bound);
}

TEST(ExtractMesh, LevelAboveMaxFails) {
    SphereField field({0, 0, 0}, 0.3f);
    EXPECT_THROW(extract_mesh(field, 32, 10.0f), EmptyMeshError);
}

TEST(ExtractMesh, RefinementShrinksError) {
    // Doubling the resolution reduces the max vertex radial error while the
    // grid error dominates the level offset (once the error floor `level` is
    // reached, refinement saturates).
    SphereField field({0, 0, 0}, 0.3f);
    const float level = 0.02f;
    auto worst = [&](int res) {
        auto mesh = extract_mesh(field, res, level);
        float w = 0;
        for (const auto& v : mesh.vertices) w = std::max(w, std::abs(norm(v) - 0.3f));
        return w;
    };
    float w12 = worst(12), w24 = worst(24), w48 = worst(48);
    EXPECT_LT(w24, w12);
    EXPECT_LT(w48, w24);
}

TEST(ExtractMesh, FieldOnlyNoCloudInput) {
    // Meshing consumes nothing but the field: an analytic field with no
    // associated point cloud meshes fine.
    PlaneField field(0.05f);
    auto mesh = extract_mesh(field, 32, 0.01f);
    EXPECT_GT(mesh.faces.size(), 0u);
    for (const auto& v : mesh.vertices) EXPECT_NEAR(v.z, 0.05f, 0.01f + 2.0f / 31);
}

TEST(LabelPoints, EmptyInputGivesEmptyLabels) {
    ModelParams m(3, 1);
    Rng rng(1);
    std::vector<Vec3f> cloud(100);
    for (auto& p : cloud)
        p = {static_cast<float>(rng.uniform(-0.5, 0.5)), static_cast<float>(rng.uniform(-0.5, 0.5)),
             static_cast<float>(rng.uniform(-0.5, 0.5))};
    auto fc = extract_features(cloud, m.encoder, 2);
    EXPECT_TRUE(label_points(fc, {}, 4, m).empty());
}

TEST(LabelPoints, IdenticalBundlesShareLabels) {
    // Points whose kNN bundles coincide get identical labels: the semantic
    // head never sees the query position.
    ModelParams m(3, 2);
    std::vector<Vec3f> cloud;
    for (int i = 0; i < 100; ++i)
        cloud.push_back({static_cast<float>(i % 10) * 0.1f - 0.45f,
                         static_cast<float>(i / 10) * 0.1f - 0.45f, 0.f});
    auto fc = extract_features(cloud, m.encoder, 3);
    std::vector<Vec3f> pts = {{0.01f, 0.01f, 0.2f}, {0.01f, 0.01f, -0.35f}};  // same 4-NN set
    auto idx0 = fc.tree->knn(pts[0], 4);
    auto idx1 = fc.tree->knn(pts[1], 4);
    ASSERT_EQ(idx0, idx1);
    auto labels = label_points(fc, pts, 4, m);
    EXPECT_EQ(labels[0], labels[1]);
}
