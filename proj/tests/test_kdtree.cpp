#include <gtest/gtest.h>

#include "rangeudf/kdtree.hpp"

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

}  // namespace

TEST(Knn, ExhaustiveWhenKEqualsN) {
    auto pts = random_cloud(32, 1);
    KdTree tree(pts);
    auto idx = tree.knn({0, 0, 0}, 32);
    EXPECT_EQ(idx.size(), 32u);
    // All indices present, ordered by distance.
    std::vector<bool> seen(32, false);
    double prev = -1;
    for (auto i : idx) {
        seen[i] = true;
        Vec3d d = pts[i].cast<double>();
        double dist = norm(d);
        EXPECT_GE(dist, prev - 1e-15);
        prev = dist;
    }
    for (bool s : seen) EXPECT_TRUE(s);
}

TEST(Knn, CollinearByInspection) {
    std::vector<Vec3f> pts = {{0, 0, 0}, {0.1f, 0, 0}, {0.4f, 0, 0}};
    KdTree tree(pts);
    auto idx = tree.knn({0, 0, 0}, 2);
    ASSERT_EQ(idx.size(), 2u);
    EXPECT_EQ(idx[0], 0u);
    EXPECT_EQ(idx[1], 1u);
}

TEST(Knn, MatchesBruteForce) {
    auto pts = random_cloud(1000, 99);
    KdTree tree(pts);
    Rng rng(5);
    for (int q = 0; q < 100; ++q) {
        Vec3f query{static_cast<float>(rng.uniform(-0.6, 0.6)), static_cast<float>(rng.uniform(-0.6, 0.6)),
                    static_cast<float>(rng.uniform(-0.6, 0.6))};
        for (size_t k : {1, 4, 8, 16}) {
            auto fast = tree.knn(query, k);
            auto slow = knn_bruteforce(pts, query, k);
            EXPECT_EQ(fast, slow) << "k=" << k;
        }
    }
}

TEST(Knn, TranslationInvariantIndices) {
    auto pts = random_cloud(300, 12);
    Vec3f shift{0.13f, -0.07f, 0.29f};
    auto shifted = pts;
    for (auto& p : shifted) p += shift;
    KdTree a(pts), b(shifted);
    Rng rng(8);
    for (int q = 0; q < 50; ++q) {
        Vec3f query{static_cast<float>(rng.uniform(-0.4, 0.4)), static_cast<float>(rng.uniform(-0.4, 0.4)),
                    static_cast<float>(rng.uniform(-0.4, 0.4))};
        // Exact translation of both cloud and query leaves the ordering
        // unchanged when the arithmetic is exact; use power-of-two shift.
        Vec3f q2 = query + shift;
        auto ia = knn_bruteforce(pts, query, 8);
        (void)ia;
        auto ka = a.knn(query, 8);
        auto kb = b.knn(q2, 8);
        // f32 rounding of the shift can perturb exact ties; compare distances.
        for (size_t i = 0; i < ka.size(); ++i) {
            double da = norm(pts[ka[i]].cast<double>() - query.cast<double>());
            double db = norm(shifted[kb[i]].cast<double>() - q2.cast<double>());
            EXPECT_NEAR(da, db, 1e-5);
        }
    }
}

TEST(Knn, TiesPreferLowerIndex) {
    std::vector<Vec3f> pts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    KdTree tree(pts);
    auto idx = tree.knn({0, 0, 0}, 2);
    EXPECT_EQ(idx[0], 0u);
    EXPECT_EQ(idx[1], 1u);
    auto all = tree.knn({0, 0, 0}, 4);
    EXPECT_EQ(all, (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(Knn, KOutOfRangeFails) {
    auto pts = random_cloud(10, 2);
    KdTree tree(pts);
    EXPECT_THROW(tree.knn({0, 0, 0}, 11), ValidationError);
    EXPECT_THROW(tree.knn({0, 0, 0}, 0), ValidationError);
}

TEST(Knn, IdenticalPointsDoNotHang) {
    std::vector<Vec3f> pts(64, Vec3f{0.1f, 0.2f, 0.3f});
    KdTree tree(pts);
    auto idx = tree.knn({0, 0, 0}, 5);
    EXPECT_EQ(idx, (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
}
