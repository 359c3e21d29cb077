#pragma once

#include "rangeudf/mesh.hpp"
#include "rangeudf/triangle.hpp"

namespace rangeudf {

struct NearestHit {
    std::uint32_t face_id = 0;
    double distance = 0;
    Vec3d point;
};

namespace detail {

// Tracks the running minimum plus all faces within the tie band
// [min, min + tol]; the final answer is the lowest face index in the band.
struct NearestAccumulator {
    explicit NearestAccumulator(double tol) : tol_(tol) {}

    void feed(double d, std::uint32_t face, const Vec3d& point) {
        if (d > dmin_ + tol_) return;
        if (d < dmin_) {
            dmin_ = d;
            cands_.erase(std::remove_if(cands_.begin(), cands_.end(),
                                        [&](const Cand& c) { return c.d > dmin_ + tol_; }),
                         cands_.end());
        }
        cands_.push_back({d, face, point});
    }

    double bound() const { return dmin_ + tol_; }
    bool empty() const { return cands_.empty(); }

    NearestHit result() const {
        if (cands_.empty()) throw ValidationError("nearest query on empty candidate set");
        const Cand* best = &cands_[0];
        for (const auto& c : cands_)
            if (c.f < best->f) best = &c;
        return {best->f, best->d, best->p};
    }

private:
    struct Cand {
        double d;
        std::uint32_t f;
        Vec3d p;
    };
    double tol_;
    double dmin_ = std::numeric_limits<double>::infinity();
    std::vector<Cand> cands_;
};

}  // namespace detail

// Binary BVH over mesh faces: median split on the longest centroid axis,
// leaves hold at most 8 faces. The mesh is referenced, not copied; the index
// is immutable after construction and safe for concurrent queries.
class SpatialIndex {
public:
    static constexpr size_t kLeafSize = 8;
    static constexpr double kTieTolerance = 1e-9;

    explicit SpatialIndex(const TriangleMesh& mesh) : mesh_(&mesh) {
        if (mesh.faces.empty()) throw ValidationError("SpatialIndex: mesh has no faces");
        mesh.validate();
        order_.resize(mesh.faces.size());
        for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
        centroids_.reserve(mesh.faces.size());
        for (size_t f = 0; f < mesh.faces.size(); ++f) {
            Vec3d a = mesh.vertices[mesh.faces[f][0]].cast<double>();
            Vec3d b = mesh.vertices[mesh.faces[f][1]].cast<double>();
            Vec3d c = mesh.vertices[mesh.faces[f][2]].cast<double>();
            centroids_.push_back((a + b + c) / 3.0);
        }
        nodes_.reserve(2 * mesh.faces.size() / kLeafSize + 2);
        build(0, order_.size());
    }

    const TriangleMesh& mesh() const { return *mesh_; }

    // Global nearest point on the mesh. Ties within kTieTolerance of the
    // minimum resolve to the lowest face index.
    NearestHit nearest(const Vec3d& q) const {
        detail::NearestAccumulator acc(kTieTolerance);
        search(0, q, acc);
        return acc.result();
    }

    NearestHit nearest(const Vec3f& q) const { return nearest(q.cast<double>()); }

private:
    struct Node {
        Aabb box;
        std::uint32_t left = 0;   // child index, or face range begin for leaves
        std::uint32_t right = 0;  // child index, or face range end for leaves
        bool leaf = false;
    };

    std::uint32_t build(size_t begin, size_t end) {
        std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Aabb box;
        for (size_t i = begin; i < end; ++i) {
            const auto& f = mesh_->faces[order_[i]];
            for (int k = 0; k < 3; ++k) box.grow(mesh_->vertices[f[k]].cast<double>());
        }
        nodes_[idx].box = box;

        if (end - begin <= kLeafSize) {
            nodes_[idx].leaf = true;
            nodes_[idx].left = static_cast<std::uint32_t>(begin);
            nodes_[idx].right = static_cast<std::uint32_t>(end);
            return idx;
        }

        Aabb cbox;
        for (size_t i = begin; i < end; ++i) cbox.grow(centroids_[order_[i]]);
        Vec3d ext = cbox.extent();
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (ext.z > ext[axis]) axis = 2;

        size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             if (centroids_[a][axis] != centroids_[b][axis])
                                 return centroids_[a][axis] < centroids_[b][axis];
                             return a < b;  // stable split for degenerate spreads
                         });

        std::uint32_t l = build(begin, mid);
        std::uint32_t r = build(mid, end);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    void search(std::uint32_t node_idx, const Vec3d& q, detail::NearestAccumulator& acc) const {
        const Node& node = nodes_[node_idx];
        double bd2 = node.box.dist2(q);
        double bound = acc.bound();
        if (!acc.empty() && bd2 > bound * bound) return;

        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.right; ++i) {
                std::uint32_t f = order_[i];
                const auto& face = mesh_->faces[f];
                auto r = closest_point_triangle(q, mesh_->vertices[face[0]].cast<double>(),
                                                mesh_->vertices[face[1]].cast<double>(),
                                                mesh_->vertices[face[2]].cast<double>());
                acc.feed(r.distance, f, r.point);
            }
            return;
        }

        double dl = nodes_[node.left].box.dist2(q);
        double dr = nodes_[node.right].box.dist2(q);
        if (dl <= dr) {
            search(node.left, q, acc);
            search(node.right, q, acc);
        } else {
            search(node.right, q, acc);
            search(node.left, q, acc);
        }
    }

    const TriangleMesh* mesh_;
    std::vector<std::uint32_t> order_;
    std::vector<Vec3d> centroids_;
    std::vector<Node> nodes_;
};

// Brute-force reference for SpatialIndex::nearest with the same tie rule.
inline NearestHit nearest_on_mesh_bruteforce(const TriangleMesh& mesh, const Vec3d& q) {
    detail::NearestAccumulator acc(SpatialIndex::kTieTolerance);
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        auto r = closest_point_triangle(q, mesh.vertices[face[0]].cast<double>(),
                                        mesh.vertices[face[1]].cast<double>(),
                                        mesh.vertices[face[2]].cast<double>());
        acc.feed(r.distance, f, r.point);
    }
    return acc.result();
}

}  // namespace rangeudf
