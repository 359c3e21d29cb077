#pragma once

#include "rangeudf/mesh.hpp"

namespace rangeudf {

struct SurfaceSamples {
    std::vector<Vec3f> positions;
    std::vector<std::uint32_t> face_ids;
    std::vector<std::uint32_t> labels;  // 0 when the mesh has no labels
};

// Area-weighted surface sampling: faces chosen proportionally to area, points
// uniform within each face via barycentric sampling. Reproducible per seed.
inline SurfaceSamples sample_surface(const TriangleMesh& mesh, size_t n, std::uint64_t seed) {
    SurfaceSamples out;
    if (n == 0) return out;
    if (mesh.faces.empty()) throw ValidationError("sample_surface: mesh has no faces");

    std::vector<double> cdf(mesh.faces.size());
    double total = 0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        total += mesh.face_area(f);
        cdf[f] = total;
    }
    if (total <= 0) throw ValidationError("sample_surface: all faces are degenerate (zero area)");

    out.positions.resize(n);
    out.face_ids.resize(n);
    out.labels.resize(n);

    Rng rng(seed);
    for (size_t i = 0; i < n; ++i) {
        double u = rng.uniform01() * total;
        size_t f = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (f >= cdf.size()) f = cdf.size() - 1;

        // Uniform barycentric point via square-root warp.
        double r1 = std::sqrt(rng.uniform01());
        double r2 = rng.uniform01();
        double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;

        Vec3d a = mesh.vertices[mesh.faces[f][0]].cast<double>();
        Vec3d b = mesh.vertices[mesh.faces[f][1]].cast<double>();
        Vec3d c = mesh.vertices[mesh.faces[f][2]].cast<double>();
        Vec3d p = a * wa + b * wb + c * wc;

        out.positions[i] = p.cast<float>();
        out.face_ids[i] = static_cast<std::uint32_t>(f);
        out.labels[i] = mesh.has_labels() ? mesh.face_labels[f] : 0u;
    }
    return out;
}

}  // namespace rangeudf
