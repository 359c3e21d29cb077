#pragma once

#include <unordered_map>

#include "rangeudf/field.hpp"
#include "rangeudf/mc_tables.hpp"
#include "rangeudf/mesh.hpp"

namespace rangeudf {

struct ExtractionFailure : ValidationError {
    size_t survivors;
    ExtractionFailure(size_t n, size_t wanted)
        : ValidationError("dense extraction failed: " + std::to_string(n) + " survivors (< " +
                          std::to_string(wanted) + " requested)"),
          survivors(n) {}
};

struct EmptyMeshError : ValidationError {
    using ValidationError::ValidationError;
};

struct DensePoints {
    std::vector<Vec3f> positions;
    std::vector<float> residuals;  // field value at each point, < the residual bound
    std::vector<std::uint32_t> labels;  // optional, filled by label_points
};

struct ProjectionResult {
    Vec3f point;
    bool ok = true;  // false when the gradient vanished away from the surface
};

namespace detail {

inline Vec3f clamp_cube(Vec3f p) {
    p.x = std::clamp(p.x, -0.5f, 0.5f);
    p.y = std::clamp(p.y, -0.5f, 0.5f);
    p.z = std::clamp(p.z, -0.5f, 0.5f);
    return p;
}

// Moves each point one Newton-like step toward the zero set:
// q' = q - d(q) * grad / |grad|, clamped to the cube. Points whose gradient
// vanishes while d is far from zero are flagged dead.
inline void project_batch(const DistanceField& field, std::vector<Vec3f>& pts,
                          std::vector<std::uint8_t>& alive) {
    std::vector<float> d;
    std::vector<Vec3f> g;
    field.evaluate_with_gradient(pts, d, g);
    for (size_t i = 0; i < pts.size(); ++i) {
        if (!alive[i]) continue;
        if (d[i] <= 1e-7f) continue;  // already on the zero set
        float glen = norm(g[i]);
        if (glen <= 1e-8f) {
            alive[i] = 0;
            continue;
        }
        pts[i] = clamp_cube(pts[i] - g[i] * (d[i] / glen));
    }
}

}  // namespace detail

// One gradient-projection step. A zero distance returns the point unchanged;
// a vanishing gradient away from the surface signals a discard.
inline ProjectionResult project_step(const DistanceField& field, const Vec3f& q) {
    std::vector<Vec3f> pts{q};
    std::vector<std::uint8_t> alive{1};
    detail::project_batch(field, pts, alive);
    return {pts[0], alive[0] != 0};
}

struct ExtractParams {
    size_t n_min = 100000;
    float threshold = 0.1f;    // candidates farther than this are dropped
    int iters = 5;             // projection passes per round
    float residual = 0.005f;   // acceptance bound on the final field value
    int max_rounds = 50;
    std::uint64_t seed = 0;
};

// Dense point extraction: seed uniform samples in the cube, keep those within
// `threshold`, run `iters` projection steps, accept survivors with field
// value below `residual`, then multiply the survivor set by re-noising with
// sigma = threshold / 3 and re-projecting until n_min points accumulate.
inline DensePoints extract_dense_points(const DistanceField& field, const ExtractParams& params) {
    if (params.n_min < 1) throw ValidationError("extract_dense_points: n_min must be >= 1");
    Rng rng(derive_seed(params.seed, 0xdeedull));
    DensePoints out;
    const size_t batch = std::max<size_t>(params.n_min, 4096);
    const float sigma = params.threshold / 3.0f;

    for (int round = 0; round < params.max_rounds && out.positions.size() < params.n_min; ++round) {
        // Candidate generation: uniform cube samples on the first round (or
        // whenever nothing has survived), noisy copies of survivors after.
        std::vector<Vec3f> cand(batch);
        if (out.positions.empty()) {
            for (auto& p : cand)
                p = {static_cast<float>(rng.uniform(-0.5, 0.5)), static_cast<float>(rng.uniform(-0.5, 0.5)),
                     static_cast<float>(rng.uniform(-0.5, 0.5))};
        } else {
            for (auto& p : cand) {
                const Vec3f& base = out.positions[rng.uniform_index(out.positions.size())];
                p = detail::clamp_cube({base.x + sigma * static_cast<float>(rng.normal()),
                                        base.y + sigma * static_cast<float>(rng.normal()),
                                        base.z + sigma * static_cast<float>(rng.normal())});
            }
        }

        std::vector<float> d;
        field.evaluate(cand, d);
        std::vector<Vec3f> kept;
        kept.reserve(cand.size());
        for (size_t i = 0; i < cand.size(); ++i)
            if (d[i] <= params.threshold) kept.push_back(cand[i]);
        if (kept.empty()) continue;

        std::vector<std::uint8_t> alive(kept.size(), 1);
        for (int it = 0; it < params.iters; ++it) detail::project_batch(field, kept, alive);

        field.evaluate(kept, d);
        for (size_t i = 0; i < kept.size(); ++i) {
            if (alive[i] && d[i] < params.residual) {
                out.positions.push_back(kept[i]);
                out.residuals.push_back(d[i]);
            }
        }
    }

    if (out.positions.size() < params.n_min)
        throw ExtractionFailure(out.positions.size(), params.n_min);
    return out;
}

// Marching cubes over the regular grid on [-0.5, 0.5]^3 with spacing
// 1/(resolution-1), polygonizing the iso-surface d = level. On an unsigned
// field the thin positive shell yields a two-sided approximate mesh.
inline TriangleMesh extract_mesh(const DistanceField& field, int resolution = 128,
                                 float level = 0.003f) {
    if (resolution < 8) throw ValidationError("extract_mesh: resolution must be >= 8");
    const int n = resolution;
    const float spacing = 1.0f / static_cast<float>(n - 1);
    auto coord = [&](int i) { return -0.5f + spacing * static_cast<float>(i); };

    // Evaluate the field slab by slab to bound memory.
    std::vector<std::vector<float>> slabs(n);
    {
        std::vector<Vec3f> pts(static_cast<size_t>(n) * n);
        for (int z = 0; z < n; ++z) {
            size_t c = 0;
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x) pts[c++] = {coord(x), coord(y), coord(z)};
            field.evaluate(pts, slabs[z]);
        }
    }
    auto value = [&](int x, int y, int z) -> float { return slabs[z][static_cast<size_t>(y) * n + x]; };

    TriangleMesh mesh;
    // Weld vertices through an edge-keyed map: an edge is identified by its
    // lower grid endpoint and axis.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    auto edge_key = [&](int x, int y, int z, int axis) {
        return (static_cast<std::uint64_t>(axis) << 60) |
               (static_cast<std::uint64_t>(z) << 40) |
               (static_cast<std::uint64_t>(y) << 20) | static_cast<std::uint64_t>(x);
    };

    auto edge_point = [&](int cx, int cy, int cz, int edge) -> std::uint32_t {
        const int* c0 = mc::kCorner[mc::kEdgeCorners[edge][0]];
        const int* c1 = mc::kCorner[mc::kEdgeCorners[edge][1]];
        int x0 = cx + c0[0], y0 = cy + c0[1], z0 = cz + c0[2];
        int x1 = cx + c1[0], y1 = cy + c1[1], z1 = cz + c1[2];
        int axis = (x1 != x0) ? 0 : (y1 != y0 ? 1 : 2);
        // Key on the lower endpoint along the axis.
        int kx = std::min(x0, x1), ky = std::min(y0, y1), kz = std::min(z0, z1);
        std::uint64_t key = edge_key(kx, ky, kz, axis);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;

        float v0 = value(x0, y0, z0), v1 = value(x1, y1, z1);
        float t = std::abs(v1 - v0) > 1e-12f ? (level - v0) / (v1 - v0) : 0.5f;
        t = std::clamp(t, 0.0f, 1.0f);
        Vec3f p0{coord(x0), coord(y0), coord(z0)};
        Vec3f p1{coord(x1), coord(y1), coord(z1)};
        Vec3f p = p0 + (p1 - p0) * t;
        auto id = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int z = 0; z + 1 < n; ++z)
        for (int y = 0; y + 1 < n; ++y)
            for (int x = 0; x + 1 < n; ++x) {
                int cube_index = 0;
                for (int corner = 0; corner < 8; ++corner) {
                    const int* c = mc::kCorner[corner];
                    // "Inside" = below the iso level; shift so the iso-surface
                    // sits at value zero for the interpolator.
                    if (value(x + c[0], y + c[1], z + c[2]) - level < 0) cube_index |= 1 << corner;
                }
                if (mc::kEdgeTable[cube_index] == 0) continue;
                std::uint32_t everts[12];
                for (int e = 0; e < 12; ++e)
                    if (mc::kEdgeTable[cube_index] & (1 << e)) everts[e] = edge_point(x, y, z, e);
                const std::int8_t* tri = mc::kTriTable[cube_index];
                for (int t = 0; tri[t] != -1; t += 3)
                    mesh.faces.push_back({everts[tri[t]], everts[tri[t + 1]], everts[tri[t + 2]]});
            }

    if (mesh.faces.empty()) throw EmptyMeshError("extract_mesh: no grid cell crosses the level set");
    return mesh;
}

// Semantic labels for arbitrary points from the trained semantic head.
inline std::vector<std::uint32_t> label_points(const FeatureCloud& scene, const std::vector<Vec3f>& pts,
                                               std::int64_t k, ModelParams& params) {
    return model_labels(scene, pts, k, params);
}

}  // namespace rangeudf
