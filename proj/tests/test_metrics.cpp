#include <gtest/gtest.h>

#include "rangeudf/metrics.hpp"

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

TEST(Chamfer, IdenticalCloudsAreZero) {
    auto pts = random_cloud(100, 1);
    auto [l1, l2] = chamfer(pts, pts);
    EXPECT_EQ(l1, 0.0);
    EXPECT_EQ(l2, 0.0);
}

TEST(Chamfer, SinglePairByHand) {
    auto [l1, l2] = chamfer({{0, 0, 0}}, {{0, 0, 1}});
    EXPECT_DOUBLE_EQ(l1, 1.0);
    EXPECT_DOUBLE_EQ(l2, 1.0);
}

TEST(Chamfer, KdTreeMatchesBruteForce) {
    auto pred = random_cloud(2000, 2);
    auto gt = random_cloud(2000, 3);
    auto fast = chamfer(pred, gt);
    auto slow = chamfer_bruteforce(pred, gt);
    EXPECT_NEAR(fast.first, slow.first, 1e-9);
    EXPECT_NEAR(fast.second, slow.second, 1e-9);
}

TEST(Chamfer, SymmetricUnderSwap) {
    auto a = random_cloud(300, 4);
    auto b = random_cloud(400, 5);
    auto ab = chamfer(a, b);
    auto ba = chamfer(b, a);
    EXPECT_DOUBLE_EQ(ab.first, ba.first);
    EXPECT_DOUBLE_EQ(ab.second, ba.second);
}

TEST(Chamfer, EmptyCloudFails) {
    EXPECT_THROW(chamfer({}, {{0, 0, 0}}), ValidationError);
}

TEST(Fscore, IdenticalCloudsScoreOne) {
    auto pts = random_cloud(200, 6);
    EXPECT_DOUBLE_EQ(fscore(pts, pts, 0.005), 1.0);
}

TEST(Fscore, JustBeyondThresholdScoresZero) {
    std::vector<Vec3f> pred = {{0, 0, 0.0051f}}, gt = {{0, 0, 0}};
    EXPECT_EQ(fscore(pred, gt, 0.005), 0.0);
}

TEST(Fscore, HandEnumeratedConfiguration) {
    // 4 vs 4 points; delta = 0.1. Enumerated: 2 of 4 pred within delta of gt
    // (precision 0.5), 3 of 4 gt within delta of pred (recall 0.75).
    std::vector<Vec3f> pred = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0.05f}, {5, 5, 5}};
    std::vector<Vec3f> gt = {{0, 0, 0.05f}, {0, 1, 0}, {1.05f, 0, 0}, {0.95f, 0, 0}};
    double p = 0.75, r = 1.0;  // recomputed below by enumeration
    size_t np = 0;
    for (const auto& a : pred) {
        double best = 1e9;
        for (const auto& b : gt) best = std::min(best, static_cast<double>(norm(a - b)));
        np += best <= 0.1;
    }
    size_t ng = 0;
    for (const auto& b : gt) {
        double best = 1e9;
        for (const auto& a : pred) best = std::min(best, static_cast<double>(norm(a - b)));
        ng += best <= 0.1;
    }
    p = np / 4.0;
    r = ng / 4.0;
    double expected = 2 * p * r / (p + r);
    EXPECT_NEAR(fscore(pred, gt, 0.1), expected, 1e-12);
    EXPECT_NEAR(fscore_bruteforce(pred, gt, 0.1), expected, 1e-12);
}

TEST(Fscore, MonotoneInDelta) {
    auto pred = random_cloud(500, 7);
    auto gt = random_cloud(500, 8);
    auto r = reconstruction_report(pred, gt, 0.005);
    EXPECT_LE(r.fs_delta, r.fs_2delta);
    EXPECT_LE(r.fs_2delta, r.fs_4delta);
    EXPECT_GE(r.fs_delta, 0.0);
    EXPECT_LE(r.fs_4delta, 1.0);
}

TEST(Fscore, KdTreeMatchesBruteForce) {
    auto pred = random_cloud(800, 9);
    auto gt = random_cloud(700, 10);
    for (double d : {0.01, 0.05, 0.2})
        EXPECT_NEAR(fscore(pred, gt, d), fscore_bruteforce(pred, gt, d), 1e-12);
}

TEST(SegMetrics, PerfectPrediction) {
    std::vector<std::uint32_t> gt = {0, 1, 2, 1, 0};
    auto r = seg_metrics(gt, gt, 3);
    EXPECT_DOUBLE_EQ(r.miou, 1.0);
    EXPECT_DOUBLE_EQ(r.oa, 1.0);
}

TEST(SegMetrics, HandConfusionMatrix) {
    // Two classes, prediction all class 0, ground truth half/half.
    std::vector<std::uint32_t> pred(100, 0);
    std::vector<std::uint32_t> gt(100, 0);
    for (size_t i = 50; i < 100; ++i) gt[i] = 1;
    auto r = seg_metrics(pred, gt, 2);
    EXPECT_DOUBLE_EQ(r.oa, 0.5);
    EXPECT_DOUBLE_EQ(r.per_class_iou[0], 0.5);
    EXPECT_DOUBLE_EQ(r.per_class_iou[1], 0.0);
    EXPECT_DOUBLE_EQ(r.miou, 0.25);
}

TEST(SegMetrics, AbsentClassExcludedFromMiou) {
    std::vector<std::uint32_t> pred = {0, 1, 0, 1};
    std::vector<std::uint32_t> gt = {0, 1, 0, 1};  // class 2 never appears
    auto r = seg_metrics(pred, gt, 3);
    EXPECT_FALSE(r.class_present[2]);
    EXPECT_DOUBLE_EQ(r.miou, 1.0);  // averaged over classes 0 and 1 only
}

TEST(SegMetrics, LabelOutOfRangeFails) {
    EXPECT_THROW(seg_metrics({3}, {0}, 3), ValidationError);
    EXPECT_THROW(seg_metrics({0}, {5}, 3), ValidationError);
}

TEST(Reports, JsonFieldsPresent) {
    auto pred = random_cloud(50, 11);
    auto r = reconstruction_report(pred, pred, 0.005);
    nlohmann::json j = r;
    EXPECT_EQ(j["cd_l1"], 0.0);
    EXPECT_EQ(j["fs_delta"], 1.0);
    EXPECT_EQ(j["delta"], 0.005);
    auto sr = seg_metrics({0, 1}, {0, 1}, 2);
    nlohmann::json js = sr;
    EXPECT_EQ(js["miou"], 1.0);
    EXPECT_EQ(js["oa"], 1.0);
}
