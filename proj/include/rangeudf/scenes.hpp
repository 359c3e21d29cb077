#pragma once

#include <json.hpp>

#include "rangeudf/queryset.hpp"

namespace rangeudf {

struct PrimitiveSpec {
    enum class Kind { Box, Sphere, Cylinder, Plane };
    Kind kind = Kind::Box;
    Vec3f center{0, 0, 0};
    Vec3f scale{1, 1, 1};
    float rot_z = 0;  // radians about +z
    std::uint32_t class_id = 0;
};

struct SceneSpec {
    std::vector<PrimitiveSpec> primitives;
    std::uint64_t seed = 0;
    int tessellation = 6;  // grid density; quad counts grow quadratically
};

namespace detail {

inline const char* kind_name(PrimitiveSpec::Kind k) {
    switch (k) {
        case PrimitiveSpec::Kind::Box: return "box";
        case PrimitiveSpec::Kind::Sphere: return "sphere";
        case PrimitiveSpec::Kind::Cylinder: return "cylinder";
        case PrimitiveSpec::Kind::Plane: return "plane";
    }
    return "box";
}

inline PrimitiveSpec::Kind kind_from_name(const std::string& s) {
    if (s == "box") return PrimitiveSpec::Kind::Box;
    if (s == "sphere") return PrimitiveSpec::Kind::Sphere;
    if (s == "cylinder") return PrimitiveSpec::Kind::Cylinder;
    if (s == "plane") return PrimitiveSpec::Kind::Plane;
    throw ValidationError("unknown primitive kind '" + s + "'");
}

// Unit-sized primitives centered at the origin, tessellated on t x t grids.

inline void grid_face(TriangleMesh& mesh, int t, const std::function<Vec3f(float, float)>& surf) {
    std::uint32_t base = static_cast<std::uint32_t>(mesh.vertices.size());
    for (int i = 0; i <= t; ++i)
        for (int j = 0; j <= t; ++j)
            mesh.vertices.push_back(surf(static_cast<float>(i) / t, static_cast<float>(j) / t));
    auto vid = [&](int i, int j) { return base + static_cast<std::uint32_t>(i * (t + 1) + j); };
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) {
            mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
}

inline TriangleMesh unit_plane(int t) {
    TriangleMesh m;
    grid_face(m, t, [](float u, float v) { return Vec3f{u - 0.5f, v - 0.5f, 0.f}; });
    return m;
}

inline TriangleMesh unit_box(int t) {
    TriangleMesh m;
    auto face = [&](Vec3f origin, Vec3f du, Vec3f dv) {
        grid_face(m, t, [&](float u, float v) { return origin + du * u + dv * v; });
    };
    face({-0.5f, -0.5f, -0.5f}, {1, 0, 0}, {0, 1, 0});  // bottom
    face({-0.5f, -0.5f, 0.5f}, {0, 1, 0}, {1, 0, 0});   // top
    face({-0.5f, -0.5f, -0.5f}, {0, 0, 1}, {1, 0, 0});  // front
    face({-0.5f, 0.5f, -0.5f}, {1, 0, 0}, {0, 0, 1});   // back
    face({-0.5f, -0.5f, -0.5f}, {0, 1, 0}, {0, 0, 1});  // left
    face({0.5f, -0.5f, -0.5f}, {0, 0, 1}, {0, 1, 0});   // right
    return m;
}

inline TriangleMesh unit_sphere(int t) {
    // 2t stacks x 2t slices of quads; poles collapse to degenerate-free fans
    // by merging the polar ring into triangles.
    TriangleMesh m;
    const int stacks = 2 * t, slices = 2 * t;
    const double pi = 3.14159265358979323846;
    for (int s = 0; s <= stacks; ++s) {
        double phi = pi * s / stacks;
        for (int j = 0; j < slices; ++j) {
            double theta = 2 * pi * j / slices;
            m.vertices.push_back({0.5f * static_cast<float>(std::sin(phi) * std::cos(theta)),
                                  0.5f * static_cast<float>(std::sin(phi) * std::sin(theta)),
                                  0.5f * static_cast<float>(std::cos(phi))});
        }
    }
    auto vid = [&](int s, int j) { return static_cast<std::uint32_t>(s * slices + (j % slices)); };
    for (int s = 0; s < stacks; ++s)
        for (int j = 0; j < slices; ++j) {
            if (s > 0) m.faces.push_back({vid(s, j), vid(s + 1, j), vid(s + 1, j + 1)});
            if (s + 1 < stacks) m.faces.push_back({vid(s, j), vid(s + 1, j + 1), vid(s, j + 1)});
        }
    return m;
}

inline TriangleMesh unit_cylinder(int t) {
    TriangleMesh m;
    const int slices = 4 * t;
    const double pi = 3.14159265358979323846;
    auto ring = [&](float z) {
        std::uint32_t base = static_cast<std::uint32_t>(m.vertices.size());
        for (int j = 0; j < slices; ++j) {
            double theta = 2 * pi * j / slices;
            m.vertices.push_back({0.5f * static_cast<float>(std::cos(theta)),
                                  0.5f * static_cast<float>(std::sin(theta)), z});
        }
        return base;
    };
    std::vector<std::uint32_t> rings;
    for (int s = 0; s <= t; ++s) rings.push_back(ring(-0.5f + static_cast<float>(s) / t));
    for (int s = 0; s < t; ++s)
        for (int j = 0; j < slices; ++j) {
            std::uint32_t a = rings[s] + j, b = rings[s] + (j + 1) % slices;
            std::uint32_t c = rings[s + 1] + (j + 1) % slices, d = rings[s + 1] + j;
            m.faces.push_back({a, b, c});
            m.faces.push_back({a, c, d});
        }
    for (int cap = 0; cap < 2; ++cap) {
        float z = cap ? 0.5f : -0.5f;
        std::uint32_t center = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back({0, 0, z});
        std::uint32_t base = cap ? rings[t] : rings[0];
        for (int j = 0; j < slices; ++j) {
            std::uint32_t a = base + j, b = base + (j + 1) % slices;
            if (cap) m.faces.push_back({center, a, b});
            else m.faces.push_back({center, b, a});
        }
    }
    return m;
}

inline void append_primitive(TriangleMesh& out, const PrimitiveSpec& prim, int tessellation) {
    TriangleMesh unit;
    switch (prim.kind) {
        case PrimitiveSpec::Kind::Box: unit = unit_box(tessellation); break;
        case PrimitiveSpec::Kind::Sphere: unit = unit_sphere(tessellation); break;
        case PrimitiveSpec::Kind::Cylinder: unit = unit_cylinder(tessellation); break;
        case PrimitiveSpec::Kind::Plane: unit = unit_plane(tessellation); break;
    }
    float c = std::cos(prim.rot_z), s = std::sin(prim.rot_z);
    std::uint32_t base = static_cast<std::uint32_t>(out.vertices.size());
    for (auto& v : unit.vertices) {
        Vec3f p{v.x * prim.scale.x, v.y * prim.scale.y, v.z * prim.scale.z};
        p = Vec3f{c * p.x - s * p.y, s * p.x + c * p.y, p.z} + prim.center;
        out.vertices.push_back(p);
    }
    for (const auto& f : unit.faces) {
        out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
        out.face_labels.push_back(prim.class_id);
    }
}

}  // namespace detail

// Union of tessellated primitives (overlap allowed, no CSG) with per-face
// labels from the primitive classes, normalized into the unit cube.
inline TriangleMesh build_scene(const SceneSpec& spec) {
    if (spec.primitives.empty()) throw ValidationError("build_scene: empty primitive list");
    std::vector<bool> used;
    for (const auto& p : spec.primitives) {
        if (p.class_id >= used.size()) used.resize(p.class_id + 1, false);
        used[p.class_id] = true;
    }
    for (size_t c = 0; c < used.size(); ++c)
        if (!used[c])
            throw ValidationError("build_scene: class ids must be contiguous from 0 (missing " +
                                  std::to_string(c) + ")");

    TriangleMesh mesh;
    for (const auto& prim : spec.primitives) detail::append_primitive(mesh, prim, spec.tessellation);
    auto [normalized, tf] = normalize_unit_cube(mesh);
    normalized.validate();
    return normalized;
}

// A random room: a floor plane (class 0) plus boxes (class 1) and spheres
// (class 2) resting on it.
inline SceneSpec make_random_room(std::uint64_t seed, int min_objects = 2, int max_objects = 5,
                                  int tessellation = 6) {
    if (min_objects < 2 || max_objects < min_objects)
        throw ValidationError("make_random_room: need at least two objects (one box, one sphere)");
    Rng rng(derive_seed(seed, 0x4007ull));
    SceneSpec spec;
    spec.seed = seed;
    spec.tessellation = tessellation;

    PrimitiveSpec floor;
    floor.kind = PrimitiveSpec::Kind::Plane;
    floor.scale = {2.0f, 2.0f, 1.0f};
    floor.center = {0, 0, 0};
    floor.class_id = 0;
    spec.primitives.push_back(floor);

    int n_obj = min_objects + static_cast<int>(rng.uniform_index(max_objects - min_objects + 1));
    for (int i = 0; i < n_obj; ++i) {
        PrimitiveSpec prim;
        bool sphere = i == 1 ? true : (i == 0 ? false : rng.uniform01() < 0.4);
        float x = static_cast<float>(rng.uniform(-0.6, 0.6));
        float y = static_cast<float>(rng.uniform(-0.6, 0.6));
        if (sphere) {
            prim.kind = PrimitiveSpec::Kind::Sphere;
            float r = static_cast<float>(rng.uniform(0.14, 0.28));
            prim.scale = {2 * r, 2 * r, 2 * r};
            prim.center = {x, y, r};
            prim.class_id = 2;
        } else {
            prim.kind = PrimitiveSpec::Kind::Box;
            float sx = static_cast<float>(rng.uniform(0.25, 0.6));
            float sy = static_cast<float>(rng.uniform(0.25, 0.6));
            float sz = static_cast<float>(rng.uniform(0.2, 0.55));
            prim.scale = {sx, sy, sz};
            prim.center = {x, y, sz / 2};
            prim.rot_z = static_cast<float>(rng.uniform(0, 1.5707963267948966));
            prim.class_id = 1;
        }
        spec.primitives.push_back(prim);
    }
    return spec;
}

// Paired supervision with identical neighbor evidence: both records share one
// cloud (a sparse planar patch) and per-query kNN bundles that match
// bit-exactly, but the surface sits `offset` farther from every record-b
// query, so the distance targets of paired queries differ by exactly
// `offset`. Any model blind to the query position must average the two
// targets; a range-aware model can fit both.
struct AmbiguityPair {
    SceneRecord a, b;
    std::vector<Vec3f> shared_queries;  // record-a query positions; record b
                                        // realizes them shifted +offset in z
    float offset = 0;
};

inline AmbiguityPair make_ambiguity_pair(double offset, size_t n_queries = 512,
                                         std::uint64_t seed = 7) {
    if (!(offset > 0 && offset < 0.2)) throw ValidationError("make_ambiguity_pair: offset outside (0, 0.2)");

    AmbiguityPair pair;
    pair.offset = static_cast<float>(offset);

    // Sparse planar patch at z = 0; 16 x 16 points, 0.05 spacing.
    std::vector<Vec3f> cloud;
    const int g = 16;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            cloud.push_back({-0.375f + 0.05f * i, -0.375f + 0.05f * j, 0.f});

    TriangleMesh plane;
    plane.vertices = {{-0.5f, -0.5f, 0}, {0.5f, -0.5f, 0}, {0.5f, 0.5f, 0}, {-0.5f, 0.5f, 0}};
    plane.faces = {{0, 1, 2}, {0, 2, 3}};
    plane.face_labels = {0, 0};

    Rng rng(derive_seed(seed, 0xA3b16ull));
    pair.shared_queries.resize(n_queries);
    QuerySet qa, qb;
    qa.class_count = qb.class_count = 1;
    qa.seed = derive_seed(seed, 1);
    qb.seed = derive_seed(seed, 2);
    for (size_t i = 0; i < n_queries; ++i) {
        float x = static_cast<float>(rng.uniform(-0.3, 0.3));
        float y = static_cast<float>(rng.uniform(-0.3, 0.3));
        float h = static_cast<float>(rng.uniform(0.02, 0.15));
        pair.shared_queries[i] = {x, y, h};
        qa.off_surface.push_back({{x, y, h}, h, 0});
        float hb = h + pair.offset;
        qb.off_surface.push_back({{x, y, hb}, hb, 0});
    }

    pair.a.cloud = cloud;
    pair.b.cloud = cloud;
    pair.a.queries = std::move(qa);
    pair.b.queries = std::move(qb);
    pair.a.mesh = plane;
    pair.b.mesh = plane;
    pair.a.scene_id = 0;
    pair.b.scene_id = 1;
    // One encoder seed for both records: identical clouds must yield
    // bit-identical features.
    pair.a.encoder_seed = derive_seed(seed, 0xFEA7ull);
    pair.b.encoder_seed = pair.a.encoder_seed;
    return pair;
}

inline void to_json(nlohmann::json& j, const PrimitiveSpec& p) {
    j = {{"kind", detail::kind_name(p.kind)},
         {"center", {p.center.x, p.center.y, p.center.z}},
         {"scale", {p.scale.x, p.scale.y, p.scale.z}},
         {"rot_z", p.rot_z},
         {"class", p.class_id}};
}
inline void from_json(const nlohmann::json& j, PrimitiveSpec& p) {
    p.kind = detail::kind_from_name(j.at("kind").get<std::string>());
    auto c = j.at("center").get<std::vector<float>>();
    auto s = j.at("scale").get<std::vector<float>>();
    if (c.size() != 3 || s.size() != 3) throw ValidationError("primitive center/scale must have 3 entries");
    p.center = {c[0], c[1], c[2]};
    p.scale = {s[0], s[1], s[2]};
    p.rot_z = j.value("rot_z", 0.0f);
    p.class_id = j.at("class").get<std::uint32_t>();
}
inline void to_json(nlohmann::json& j, const SceneSpec& s) {
    j = {{"primitives", s.primitives}, {"seed", s.seed}, {"tessellation", s.tessellation}};
}
inline void from_json(const nlohmann::json& j, SceneSpec& s) {
    s.primitives = j.at("primitives").get<std::vector<PrimitiveSpec>>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.tessellation = j.value("tessellation", 6);
}

}  // namespace rangeudf
