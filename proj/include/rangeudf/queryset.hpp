#pragma once

#include "rangeudf/bvh.hpp"
#include "rangeudf/sampling.hpp"

namespace rangeudf {

struct QuerySample {
    Vec3f position;       // inside [-0.5, 0.5]^3
    float udf = 0;        // unsigned distance, >= 0; exactly 0 on-surface
    std::uint32_t label = 0;

    bool operator==(const QuerySample& o) const {
        return position == o.position && udf == o.udf && label == o.label;
    }
};

struct QuerySet {
    std::vector<QuerySample> on_surface;
    std::vector<QuerySample> off_surface;
    std::uint32_t class_count = 1;
    std::uint64_t mesh_id = 0;
    std::uint64_t seed = 0;

    void validate() const {
        for (const auto& s : on_surface)
            if (s.udf != 0.0f) throw ValidationError("on-surface sample with nonzero udf");
        auto check = [&](const std::vector<QuerySample>& v) {
            for (const auto& s : v) {
                if (s.udf < 0) throw ValidationError("negative udf");
                if (s.label >= class_count)
                    throw ValidationError("label " + std::to_string(s.label) + " >= class count " +
                                          std::to_string(class_count));
            }
        };
        check(on_surface);
        check(off_surface);
    }
};

struct QueryGenConfig {
    size_t n_on = 10000;
    size_t n_off = 100000;
    std::vector<double> noise_sigmas = {0.01, 0.03, 0.08};
    double uniform_fraction = 0.1;
    std::uint64_t seed = 0;
};

// Samples the training corpus for one mesh: on-surface points carry udf = 0
// and the source-face label; off-surface points are surface samples plus
// isotropic Gaussian noise (sigma drawn uniformly from noise_sigmas), with a
// uniform_fraction share drawn uniformly in the cube. Off-surface targets are
// exact nearest-face distances/labels. Positions are clamped to the cube.
inline QuerySet generate_query_set(const TriangleMesh& mesh, const QueryGenConfig& cfg) {
    if (cfg.uniform_fraction < 0 || cfg.uniform_fraction > 1)
        throw ValidationError("uniform_fraction outside [0, 1]");
    if (cfg.noise_sigmas.empty()) throw ValidationError("noise_sigmas must be non-empty");
    Aabb box = mesh.bounds();
    if (box.valid() && (box.lo.x < -0.5 - 1e-6 || box.hi.x > 0.5 + 1e-6 || box.lo.y < -0.5 - 1e-6 ||
                        box.hi.y > 0.5 + 1e-6 || box.lo.z < -0.5 - 1e-6 || box.hi.z > 0.5 + 1e-6))
        throw ValidationError("generate_query_set: mesh is not normalized to the unit cube");

    QuerySet qs;
    qs.seed = cfg.seed;
    qs.class_count = 1;
    if (mesh.has_labels()) {
        for (auto l : mesh.face_labels) qs.class_count = std::max(qs.class_count, l + 1);
    }

    auto on = sample_surface(mesh, cfg.n_on, derive_seed(cfg.seed, 1));
    qs.on_surface.resize(cfg.n_on);
    for (size_t i = 0; i < cfg.n_on; ++i)
        qs.on_surface[i] = {on.positions[i], 0.0f, on.labels[i]};

    SpatialIndex index(mesh);
    auto anchors = sample_surface(mesh, cfg.n_off, derive_seed(cfg.seed, 2));

    // Draw the per-sample noise parameters sequentially for determinism, then
    // resolve distances in parallel against the immutable index.
    std::vector<Vec3f> positions(cfg.n_off);
    {
        Rng rng(derive_seed(cfg.seed, 3));
        for (size_t i = 0; i < cfg.n_off; ++i) {
            Vec3f p;
            if (rng.uniform01() < cfg.uniform_fraction) {
                p = {static_cast<float>(rng.uniform(-0.5, 0.5)), static_cast<float>(rng.uniform(-0.5, 0.5)),
                     static_cast<float>(rng.uniform(-0.5, 0.5))};
            } else {
                double sigma = cfg.noise_sigmas[rng.uniform_index(cfg.noise_sigmas.size())];
                Vec3d base = anchors.positions[i].cast<double>();
                p = Vec3f{static_cast<float>(base.x + sigma * rng.normal()),
                          static_cast<float>(base.y + sigma * rng.normal()),
                          static_cast<float>(base.z + sigma * rng.normal())};
            }
            p.x = std::clamp(p.x, -0.5f, 0.5f);
            p.y = std::clamp(p.y, -0.5f, 0.5f);
            p.z = std::clamp(p.z, -0.5f, 0.5f);
            positions[i] = p;
        }
    }

    qs.off_surface.resize(cfg.n_off);
    parallel_for(static_cast<std::int64_t>(cfg.n_off), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            auto hit = index.nearest(positions[i]);
            std::uint32_t label = mesh.has_labels() ? mesh.face_labels[hit.face_id] : 0u;
            qs.off_surface[i] = {positions[i], static_cast<float>(hit.distance), label};
        }
    });

    qs.validate();
    return qs;
}

namespace detail {

template <class T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void read_raw(std::istream& in, T& v, const char* what) {
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw IoError(std::string("truncated file while reading ") + what);
}

}  // namespace detail

// Dataset file: magic "RUQS", u32 version=1, u32 C, u64 n_on, u64 n_off, then
// samples as (3 x f32 position, f32 udf, u32 label), on-surface first, all
// little-endian. A trailing footer (u64 seed, u64 mesh_id) is appended;
// readers accept files without it.
inline void write_query_set(const QuerySet& qs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const char magic[4] = {'R', 'U', 'Q', 'S'};
    out.write(magic, 4);
    detail::write_raw(out, std::uint32_t{1});
    detail::write_raw(out, qs.class_count);
    detail::write_raw(out, static_cast<std::uint64_t>(qs.on_surface.size()));
    detail::write_raw(out, static_cast<std::uint64_t>(qs.off_surface.size()));
    auto dump = [&](const std::vector<QuerySample>& v) {
        for (const auto& s : v) {
            detail::write_raw(out, s.position.x);
            detail::write_raw(out, s.position.y);
            detail::write_raw(out, s.position.z);
            detail::write_raw(out, s.udf);
            detail::write_raw(out, s.label);
        }
    };
    dump(qs.on_surface);
    dump(qs.off_surface);
    detail::write_raw(out, qs.seed);
    detail::write_raw(out, qs.mesh_id);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline QuerySet read_query_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4)) throw IoError("truncated file while reading magic");
    if (std::memcmp(magic, "RUQS", 4) != 0)
        throw FormatError("bad magic in '" + path + "' (expected RUQS)");
    std::uint32_t version;
    detail::read_raw(in, version, "version");
    if (version != 1)
        throw FormatError("unsupported dataset version " + std::to_string(version) + " (expected 1)");
    QuerySet qs;
    std::uint64_t n_on, n_off;
    detail::read_raw(in, qs.class_count, "class count");
    detail::read_raw(in, n_on, "on-surface count");
    detail::read_raw(in, n_off, "off-surface count");
    auto slurp = [&](std::vector<QuerySample>& v, std::uint64_t n, const char* what) {
        v.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            detail::read_raw(in, v[i].position.x, what);
            detail::read_raw(in, v[i].position.y, what);
            detail::read_raw(in, v[i].position.z, what);
            detail::read_raw(in, v[i].udf, what);
            detail::read_raw(in, v[i].label, what);
        }
    };
    slurp(qs.on_surface, n_on, "on-surface samples");
    slurp(qs.off_surface, n_off, "off-surface samples");
    // Optional footer.
    std::uint64_t seed = 0, mesh_id = 0;
    if (in.read(reinterpret_cast<char*>(&seed), sizeof seed)) {
        detail::read_raw(in, mesh_id, "mesh id footer");
        qs.seed = seed;
        qs.mesh_id = mesh_id;
    }
    qs.validate();
    return qs;
}

// One training scene: the surface cloud fed to the feature extractor plus its
// query samples. The mesh is retained when evaluation needs ground truth.
struct SceneRecord {
    std::vector<Vec3f> cloud;  // N x 3 network input
    QuerySet queries;
    TriangleMesh mesh;  // may be empty for synthetic records
    std::uint64_t scene_id = 0;
    std::uint64_t encoder_seed = 0;
};

inline SceneRecord make_scene_record(const TriangleMesh& normalized_mesh, size_t cloud_points,
                                     const QueryGenConfig& cfg, std::uint64_t scene_id) {
    SceneRecord rec;
    rec.mesh = normalized_mesh;
    rec.scene_id = scene_id;
    rec.encoder_seed = derive_seed(cfg.seed, scene_id ^ 0x5ce9e5ull);
    auto cloud = sample_surface(normalized_mesh, cloud_points, derive_seed(cfg.seed, scene_id ^ 0xc10adull));
    rec.cloud = std::move(cloud.positions);
    QueryGenConfig qcfg = cfg;
    qcfg.seed = derive_seed(cfg.seed, scene_id);
    rec.queries = generate_query_set(normalized_mesh, qcfg);
    rec.queries.mesh_id = scene_id;
    return rec;
}

}  // namespace rangeudf
