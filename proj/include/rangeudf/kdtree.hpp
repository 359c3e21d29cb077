#pragma once

#include "rangeudf/common.hpp"

namespace rangeudf {

// Static kd-tree over a point set. Neighbors are ordered by (distance, index)
// ascending; equal distances resolve to the lower index, exactly matching the
// brute-force reference (both paths compute squared distances in f64 from the
// same f32 coordinates). Immutable after construction; queries are thread-safe.
class KdTree {
public:
    explicit KdTree(std::vector<Vec3f> points) : points_(std::move(points)) {
        if (points_.empty()) throw ValidationError("KdTree: empty point set");
        order_.resize(points_.size());
        for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, order_.size());
    }

    size_t size() const { return points_.size(); }
    const std::vector<Vec3f>& points() const { return points_; }

    // K nearest neighbors of q, ascending by (distance, index).
    std::vector<std::uint32_t> knn(const Vec3f& q, size_t k) const {
        if (k < 1 || k > points_.size())
            throw ValidationError("knn: K=" + std::to_string(k) + " outside [1, " +
                                  std::to_string(points_.size()) + "]");
        std::vector<Neighbor> heap;  // max-heap on (d2, idx)
        heap.reserve(k);
        search(0, q.cast<double>(), k, heap);
        std::sort_heap(heap.begin(), heap.end());
        std::vector<std::uint32_t> out(heap.size());
        for (size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].idx;
        return out;
    }

    // Nearest single neighbor plus its distance (for metric loops).
    std::pair<std::uint32_t, double> nearest(const Vec3f& q) const {
        std::vector<Neighbor> heap;
        heap.reserve(1);
        search(0, q.cast<double>(), 1, heap);
        return {heap[0].idx, std::sqrt(heap[0].d2)};
    }

private:
    static constexpr size_t kLeafSize = 16;

    struct Neighbor {
        double d2;
        std::uint32_t idx;
        bool operator<(const Neighbor& o) const {
            if (d2 != o.d2) return d2 < o.d2;
            return idx < o.idx;
        }
    };

    struct Node {
        float lo[3], hi[3];
        std::uint32_t left = 0, right = 0;
        bool leaf = false;
    };

    static double dist2(const Vec3d& q, const Vec3f& p) {
        double dx = q.x - p.x, dy = q.y - p.y, dz = q.z - p.z;
        return dx * dx + dy * dy + dz * dz;
    }

    double box_dist2(const Node& n, const Vec3d& q) const {
        double d2 = 0;
        for (int i = 0; i < 3; ++i) {
            double v = (&q.x)[i];
            if (v < n.lo[i]) { double d = n.lo[i] - v; d2 += d * d; }
            else if (v > n.hi[i]) { double d = v - n.hi[i]; d2 += d * d; }
        }
        return d2;
    }

    std::uint32_t build(size_t begin, size_t end) {
        std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Node& n = nodes_[idx];
        for (int a = 0; a < 3; ++a) {
            n.lo[a] = std::numeric_limits<float>::infinity();
            n.hi[a] = -std::numeric_limits<float>::infinity();
        }
        for (size_t i = begin; i < end; ++i) {
            const Vec3f& p = points_[order_[i]];
            for (int a = 0; a < 3; ++a) {
                n.lo[a] = std::min(n.lo[a], (&p.x)[a]);
                n.hi[a] = std::max(n.hi[a], (&p.x)[a]);
            }
        }
        if (end - begin <= kLeafSize) {
            n.leaf = true;
            n.left = static_cast<std::uint32_t>(begin);
            n.right = static_cast<std::uint32_t>(end);
            return idx;
        }
        int axis = 0;
        float ext[3] = {n.hi[0] - n.lo[0], n.hi[1] - n.lo[1], n.hi[2] - n.lo[2]};
        if (ext[1] > ext[0]) axis = 1;
        if (ext[2] > ext[axis]) axis = 2;
        size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             float va = (&points_[a].x)[axis], vb = (&points_[b].x)[axis];
                             if (va != vb) return va < vb;
                             return a < b;  // coincident points split by index
                         });
        std::uint32_t l = build(begin, mid);
        std::uint32_t r = build(mid, end);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    void push_candidate(std::vector<Neighbor>& heap, size_t k, double d2, std::uint32_t idx) const {
        Neighbor c{d2, idx};
        if (heap.size() < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    void search(std::uint32_t node_idx, const Vec3d& q, size_t k, std::vector<Neighbor>& heap) const {
        const Node& node = nodes_[node_idx];
        if (heap.size() == k && box_dist2(node, q) > heap.front().d2) return;

        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.right; ++i) {
                std::uint32_t idx = order_[i];
                push_candidate(heap, k, dist2(q, points_[idx]), idx);
            }
            return;
        }
        double dl = box_dist2(nodes_[node.left], q);
        double dr = box_dist2(nodes_[node.right], q);
        if (dl <= dr) {
            search(node.left, q, k, heap);
            search(node.right, q, k, heap);
        } else {
            search(node.right, q, k, heap);
            search(node.left, q, k, heap);
        }
    }

    std::vector<Vec3f> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

// Brute-force kNN with the identical ordering rule.
inline std::vector<std::uint32_t> knn_bruteforce(const std::vector<Vec3f>& points, const Vec3f& q,
                                                 size_t k) {
    if (k < 1 || k > points.size()) throw ValidationError("knn_bruteforce: bad K");
    std::vector<std::pair<double, std::uint32_t>> all(points.size());
    Vec3d qd = q.cast<double>();
    for (std::uint32_t i = 0; i < points.size(); ++i) {
        double dx = qd.x - points[i].x, dy = qd.y - points[i].y, dz = qd.z - points[i].z;
        all[i] = {dx * dx + dy * dy + dz * dz, i};
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end());
    std::vector<std::uint32_t> out(k);
    for (size_t i = 0; i < k; ++i) out[i] = all[i].second;
    return out;
}

}  // namespace rangeudf
