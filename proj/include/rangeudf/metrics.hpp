#pragma once

#include <json.hpp>

#include "rangeudf/kdtree.hpp"

namespace rangeudf {

struct ReconstructionReport {
    double cd_l1 = 0;  // raw; conventionally displayed x 1e2
    double cd_l2 = 0;  // raw; conventionally displayed x 1e4
    double fs_delta = 0;
    double fs_2delta = 0;
    double fs_4delta = 0;
    double delta = 0.005;
    size_t pred_count = 0;
    size_t gt_count = 0;
};

struct SegmentationReport {
    std::vector<double> per_class_iou;  // NaN-free: absent classes carry 0 and are excluded from miou
    std::vector<bool> class_present;    // present in ground truth
    double miou = 0;
    double oa = 0;
    std::vector<std::int64_t> confusion;  // C x C row-major, rows = ground truth
    std::uint32_t class_count = 0;
};

namespace detail {

struct DirectedStats {
    double mean_dist = 0;
    double mean_sq = 0;
    std::vector<double> dists;
};

inline DirectedStats directed_nn(const std::vector<Vec3f>& from, const KdTree& to_tree) {
    DirectedStats s;
    s.dists.resize(from.size());
    parallel_for(static_cast<std::int64_t>(from.size()), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) s.dists[i] = to_tree.nearest(from[i]).second;
    });
    double acc = 0, acc2 = 0;
    for (double d : s.dists) {
        acc += d;
        acc2 += d * d;
    }
    s.mean_dist = acc / static_cast<double>(from.size());
    s.mean_sq = acc2 / static_cast<double>(from.size());
    return s;
}

}  // namespace detail

// Symmetric Chamfer distances: the mean of the two directed mean (squared)
// nearest-neighbor distances.
inline std::pair<double, double> chamfer(const std::vector<Vec3f>& pred, const std::vector<Vec3f>& gt) {
    if (pred.empty() || gt.empty()) throw ValidationError("chamfer: empty point cloud");
    KdTree pred_tree(pred), gt_tree(gt);
    auto a = detail::directed_nn(pred, gt_tree);
    auto b = detail::directed_nn(gt, pred_tree);
    return {0.5 * (a.mean_dist + b.mean_dist), 0.5 * (a.mean_sq + b.mean_sq)};
}

// F-score at threshold delta: harmonic mean of precision (pred within delta
// of gt) and recall (gt within delta of pred); 0 when both are 0.
inline double fscore(const std::vector<Vec3f>& pred, const std::vector<Vec3f>& gt, double delta) {
    if (pred.empty() || gt.empty()) throw ValidationError("fscore: empty point cloud");
    KdTree pred_tree(pred), gt_tree(gt);
    auto a = detail::directed_nn(pred, gt_tree);
    auto b = detail::directed_nn(gt, pred_tree);
    auto frac_within = [delta](const std::vector<double>& d) {
        size_t n = 0;
        for (double v : d) n += v <= delta;
        return static_cast<double>(n) / static_cast<double>(d.size());
    };
    double precision = frac_within(a.dists);
    double recall = frac_within(b.dists);
    if (precision + recall <= 0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

inline ReconstructionReport reconstruction_report(const std::vector<Vec3f>& pred,
                                                  const std::vector<Vec3f>& gt, double delta = 0.005) {
    ReconstructionReport r;
    r.delta = delta;
    r.pred_count = pred.size();
    r.gt_count = gt.size();
    if (pred.empty() || gt.empty()) throw ValidationError("reconstruction_report: empty point cloud");
    KdTree pred_tree(pred), gt_tree(gt);
    auto a = detail::directed_nn(pred, gt_tree);
    auto b = detail::directed_nn(gt, pred_tree);
    r.cd_l1 = 0.5 * (a.mean_dist + b.mean_dist);
    r.cd_l2 = 0.5 * (a.mean_sq + b.mean_sq);
    auto f = [&](double d) {
        auto frac = [d](const std::vector<double>& v) {
            size_t n = 0;
            for (double x : v) n += x <= d;
            return static_cast<double>(n) / static_cast<double>(v.size());
        };
        double p = frac(a.dists), rec = frac(b.dists);
        return p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
    };
    r.fs_delta = f(delta);
    r.fs_2delta = f(2 * delta);
    r.fs_4delta = f(4 * delta);
    return r;
}

// Brute-force O(M*N) reference for the kd-tree metric path.
inline std::pair<double, double> chamfer_bruteforce(const std::vector<Vec3f>& pred,
                                                    const std::vector<Vec3f>& gt) {
    if (pred.empty() || gt.empty()) throw ValidationError("chamfer_bruteforce: empty point cloud");
    auto directed = [](const std::vector<Vec3f>& from, const std::vector<Vec3f>& to) {
        double acc = 0, acc2 = 0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, norm2(p.cast<double>() - q.cast<double>()));
            acc += std::sqrt(best);
            acc2 += best;
        }
        return std::pair<double, double>{acc / from.size(), acc2 / from.size()};
    };
    auto a = directed(pred, gt);
    auto b = directed(gt, pred);
    return {0.5 * (a.first + b.first), 0.5 * (a.second + b.second)};
}

inline double fscore_bruteforce(const std::vector<Vec3f>& pred, const std::vector<Vec3f>& gt,
                                double delta) {
    auto frac_within = [delta](const std::vector<Vec3f>& from, const std::vector<Vec3f>& to) {
        size_t n = 0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, norm2(p.cast<double>() - q.cast<double>()));
            n += std::sqrt(best) <= delta;
        }
        return static_cast<double>(n) / static_cast<double>(from.size());
    };
    double p = frac_within(pred, gt), r = frac_within(gt, pred);
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

// Confusion-matrix segmentation metrics. IoU_c = TP / (TP + FP + FN); mIoU
// averages only the classes present in ground truth; OA = trace / total.
inline SegmentationReport seg_metrics(const std::vector<std::uint32_t>& pred,
                                      const std::vector<std::uint32_t>& gt, std::uint32_t class_count) {
    if (pred.size() != gt.size()) throw ValidationError("seg_metrics: length mismatch");
    if (pred.empty()) throw ValidationError("seg_metrics: empty label arrays");
    SegmentationReport r;
    r.class_count = class_count;
    r.confusion.assign(static_cast<size_t>(class_count) * class_count, 0);
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] >= class_count || gt[i] >= class_count)
            throw ValidationError("seg_metrics: label >= class count");
        r.confusion[static_cast<size_t>(gt[i]) * class_count + pred[i]]++;
    }
    r.per_class_iou.assign(class_count, 0.0);
    r.class_present.assign(class_count, false);
    std::int64_t trace = 0;
    double iou_sum = 0;
    int present = 0;
    for (std::uint32_t c = 0; c < class_count; ++c) {
        std::int64_t tp = r.confusion[static_cast<size_t>(c) * class_count + c];
        std::int64_t fp = 0, fn = 0, gt_total = 0;
        for (std::uint32_t o = 0; o < class_count; ++o) {
            gt_total += r.confusion[static_cast<size_t>(c) * class_count + o];
            if (o != c) {
                fn += r.confusion[static_cast<size_t>(c) * class_count + o];
                fp += r.confusion[static_cast<size_t>(o) * class_count + c];
            }
        }
        trace += tp;
        if (gt_total > 0) {
            r.class_present[c] = true;
            std::int64_t denom = tp + fp + fn;
            r.per_class_iou[c] = denom > 0 ? static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
            iou_sum += r.per_class_iou[c];
            ++present;
        }
    }
    r.oa = static_cast<double>(trace) / static_cast<double>(pred.size());
    r.miou = present > 0 ? iou_sum / present : 0.0;
    return r;
}

inline void to_json(nlohmann::json& j, const ReconstructionReport& r) {
    j = {{"cd_l1", r.cd_l1},     {"cd_l2", r.cd_l2},         {"fs_delta", r.fs_delta},
         {"fs_2delta", r.fs_2delta}, {"fs_4delta", r.fs_4delta}, {"delta", r.delta},
         {"pred_count", r.pred_count}, {"gt_count", r.gt_count}};
}

inline void to_json(nlohmann::json& j, const SegmentationReport& r) {
    j = {{"per_class_iou", r.per_class_iou},
         {"miou", r.miou},
         {"oa", r.oa},
         {"confusion", r.confusion},
         {"class_count", r.class_count}};
}

}  // namespace rangeudf
