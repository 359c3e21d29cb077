#include <gtest/gtest.h>

#include "rangeudf/bvh.hpp"
#include "rangeudf/mesh.hpp"
#include "rangeudf/sampling.hpp"
#include "rangeudf/triangle.hpp"
#include "test_util.hpp"

using namespace rangeudf;

TEST(LoadMesh, SingleTriangleObj) {
    auto path = testutil::scratch_file("tri.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    auto mesh = load_mesh(path);
    EXPECT_EQ(mesh.vertices.size(), 3u);
    EXPECT_EQ(mesh.faces.size(), 1u);
}

TEST(LoadMesh, QuadFanTriangulation) {
    auto path = testutil::scratch_file("quad.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    auto mesh = load_mesh(path);
    ASSERT_EQ(mesh.faces.size(), 2u);
    // Both triangles share the fan diagonal 0-2.
    EXPECT_EQ(mesh.faces[0][0], 0u);
    EXPECT_EQ(mesh.faces[0][2], 2u);
    EXPECT_EQ(mesh.faces[1][0], 0u);
    EXPECT_EQ(mesh.faces[1][1], 2u);
}

TEST(LoadMesh, NegativeObjIndices) {
    auto path = testutil::scratch_file("neg.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    auto mesh = load_mesh(path);
    ASSERT_EQ(mesh.faces.size(), 1u);
    EXPECT_EQ(mesh.faces[0][0], 0u);
    EXPECT_EQ(mesh.faces[0][2], 2u);
}

TEST(LoadMesh, ObjFaceIndexOutOfRange) {
    auto path = testutil::scratch_file("bad_idx.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
    EXPECT_THROW(load_mesh(path), ValidationError);
}

TEST(LoadMesh, ObjParseErrorNamesLine) {
    auto path = testutil::scratch_file("bad_vertex.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 oops 0\n");
    try {
        load_mesh(path);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(LoadMesh, PlyAsciiFaceCountMismatch) {
    auto path = testutil::scratch_file("short.ply");
    testutil::write_text(path,
                         "ply\nformat ascii 1.0\n"
                         "element vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
                         "element face 2\nproperty list uchar int vertex_indices\nend_header\n"
                         "0 0 0\n1 0 0\n0 1 0\n"
                         "3 0 1 2\n");
    EXPECT_THROW(load_mesh(path), ValidationError);
}

TEST(LoadMesh, PlyBinaryRoundtrip) {
    auto mesh = testutil::cube_mesh(-1.f, 1.f);
    mesh.face_labels.assign(mesh.faces.size(), 0);
    for (size_t f = 0; f < mesh.faces.size(); ++f) mesh.face_labels[f] = static_cast<std::uint32_t>(f % 3);
    auto path = testutil::scratch_file("cube.ply");
    save_mesh_ply(mesh, path, /*binary=*/true);
    auto back = load_mesh(path);
    ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
    ASSERT_EQ(back.faces.size(), mesh.faces.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
    ASSERT_EQ(back.face_labels.size(), mesh.face_labels.size());
    EXPECT_EQ(back.face_labels, mesh.face_labels);
}

TEST(LoadMesh, PlyAsciiRoundtrip) {
    auto mesh = testutil::cube_mesh(0.f, 1.f);
    auto path = testutil::scratch_file("cube_ascii.ply");
    save_mesh_ply(mesh, path, /*binary=*/false);
    auto back = load_mesh(path);
    EXPECT_EQ(back.faces.size(), mesh.faces.size());
}

TEST(LoadMesh, LabelSidecarCountMismatch) {
    auto path = testutil::scratch_file("lab.obj");
    testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    testutil::write_text(path + ".labels", "0\n1\n");
    EXPECT_THROW(load_mesh(path), ValidationError);
}

TEST(NormalizeUnitCube, SymmetricCube) {
    auto mesh = testutil::cube_mesh(-1.f, 1.f);
    auto [norm, tf] = normalize_unit_cube(mesh);
    EXPECT_DOUBLE_EQ(tf.scale, 0.5);
    EXPECT_DOUBLE_EQ(tf.offset.x, 0.0);
    Aabb box = norm.bounds();
    EXPECT_FLOAT_EQ(static_cast<float>(box.lo.x), -0.5f);
    EXPECT_FLOAT_EQ(static_cast<float>(box.hi.z), 0.5f);
}

TEST(NormalizeUnitCube, FlatSquareKeepsPlane) {
    TriangleMesh mesh;
    mesh.vertices = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}};
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    auto [norm, tf] = normalize_unit_cube(mesh);
    EXPECT_DOUBLE_EQ(tf.scale, 0.5);
    for (const auto& v : norm.vertices) EXPECT_FLOAT_EQ(v.z, 0.f);
    EXPECT_FLOAT_EQ(norm.vertices[2].x, 0.5f);
}

TEST(NormalizeUnitCube, OffsetSphere) {
    // Discretized unit-diameter sphere centered at (3,0,0): after
    // normalization the center moves to the origin and the largest
    // coordinate magnitude is exactly 0.5.
    auto mesh = testutil::uv_sphere({3.f, 0.f, 0.f}, 1.f);
    auto [norm, tf] = normalize_unit_cube(mesh);
    Aabb box = norm.bounds();
    EXPECT_NEAR(box.center().x, 0.0, 1e-6);
    EXPECT_NEAR(box.center().y, 0.0, 1e-6);
    double maxmag = 0;
    for (const auto& v : norm.vertices)
        maxmag = std::max({maxmag, std::abs(static_cast<double>(v.x)), std::abs(static_cast<double>(v.y)),
                           std::abs(static_cast<double>(v.z))});
    EXPECT_NEAR(maxmag, 0.5, 1e-6);
}

TEST(NormalizeUnitCube, Idempotent) {
    auto mesh = testutil::random_soup(40, 99, 2.0f);
    auto [once, tf1] = normalize_unit_cube(mesh);
    auto [twice, tf2] = normalize_unit_cube(once);
    ASSERT_EQ(once.vertices.size(), twice.vertices.size());
    for (size_t i = 0; i < once.vertices.size(); ++i) {
        EXPECT_NEAR(once.vertices[i].x, twice.vertices[i].x, 1e-7);
        EXPECT_NEAR(once.vertices[i].y, twice.vertices[i].y, 1e-7);
        EXPECT_NEAR(once.vertices[i].z, twice.vertices[i].z, 1e-7);
    }
}

TEST(NormalizeUnitCube, SinglePointFails) {
    TriangleMesh mesh;
    mesh.vertices = {{1, 2, 3}};
    EXPECT_THROW(normalize_unit_cube(mesh), ValidationError);
}

TEST(ClosestPointTriangle, QueryAtVertex) {
    Vec3d a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
    auto r = closest_point_triangle(a, a, b, c);
    EXPECT_DOUBLE_EQ(r.distance, 0.0);
    EXPECT_EQ(r.region, TriRegion::Vertex);
}

TEST(ClosestPointTriangle, InteriorProjection) {
    Vec3d a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
    auto r = closest_point_triangle({0.25, 0.25, 1.0}, a, b, c);
    EXPECT_NEAR(r.distance, 1.0, 1e-12);
    EXPECT_NEAR(r.point.x, 0.25, 1e-12);
    EXPECT_NEAR(r.point.y, 0.25, 1e-12);
    EXPECT_NEAR(r.point.z, 0.0, 1e-12);
    EXPECT_EQ(r.region, TriRegion::Interior);
}

TEST(ClosestPointTriangle, BeyondVertexRegion) {
    // Analytic region walk: p=(2,0,0) projects onto vertex b=(1,0,0).
    Vec3d a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
    auto r = closest_point_triangle({2, 0, 0}, a, b, c);
    EXPECT_NEAR(r.distance, 1.0, 1e-12);
    EXPECT_EQ(r.point.x, 1.0);
    EXPECT_EQ(r.region, TriRegion::Vertex);
}

TEST(ClosestPointTriangle, DegenerateSegmentAndPoint) {
    Vec3d a{0, 0, 0}, b{1, 0, 0};
    auto seg = closest_point_triangle({0.5, 1, 0}, a, b, a);  // collinear triangle
    EXPECT_NEAR(seg.distance, 1.0, 1e-12);
    EXPECT_NEAR(seg.point.x, 0.5, 1e-12);
    auto pt = closest_point_triangle({0, 0, 2}, a, a, a);
    EXPECT_NEAR(pt.distance, 2.0, 1e-12);
    EXPECT_EQ(pt.region, TriRegion::Vertex);
}

TEST(ClosestPointTriangle, FuzzDistanceBoundedByVertices) {
    // For every query, the reported distance never exceeds the distance to
    // any triangle vertex, and matches a dense sampling of the triangle.
    Rng rng(7);
    for (int iter = 0; iter < 2000; ++iter) {
        Vec3d a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d c{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        auto r = closest_point_triangle(p, a, b, c);
        EXPECT_LE(r.distance, norm(p - a) + 1e-12);
        EXPECT_LE(r.distance, norm(p - b) + 1e-12);
        EXPECT_LE(r.distance, norm(p - c) + 1e-12);
        EXPECT_GE(r.distance, 0.0);
    }
}

TEST(ClosestPointTriangle, MatchesBarycentricGridSampling) {
    // Independent oracle: minimize |p - x| over a dense barycentric grid.
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        Vec3d a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d c{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3d p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        auto r = closest_point_triangle(p, a, b, c);
        double grid_min = std::numeric_limits<double>::infinity();
        const int n = 120;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n - i; ++j) {
                double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
                Vec3d x = a * (1 - u - v) + b * u + c * v;
                grid_min = std::min(grid_min, norm(p - x));
            }
        EXPECT_LE(r.distance, grid_min + 1e-9);
        EXPECT_GE(r.distance, grid_min - 2e-2);  // grid resolution bound
    }
}

TEST(NearestOnMesh, VertexQueryIsZero) {
    auto mesh = testutil::random_soup(20, 3);
    SpatialIndex index(mesh);
    for (size_t i = 0; i < mesh.vertices.size(); i += 7) {
        auto hit = index.nearest(mesh.vertices[i]);
        EXPECT_NEAR(hit.distance, 0.0, 1e-12);
    }
}

TEST(NearestOnMesh, MatchesBruteForce) {
    auto mesh = testutil::random_soup(100, 42);
    SpatialIndex index(mesh);
    Rng rng(1234);
    for (int i = 0; i < 200; ++i) {
        Vec3d q{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        auto fast = index.nearest(q);
        auto slow = nearest_on_mesh_bruteforce(mesh, q);
        EXPECT_NEAR(fast.distance, slow.distance, 1e-6);
        EXPECT_EQ(fast.face_id, slow.face_id);
    }
}

TEST(NearestOnMesh, NormalizedCubeTopFace) {
    auto mesh = testutil::cube_mesh(-1.f, 1.f);
    auto [norm_mesh, tf] = normalize_unit_cube(mesh);
    SpatialIndex index(norm_mesh);
    auto hit = index.nearest(Vec3d{0, 0, 1.5});
    EXPECT_NEAR(hit.distance, 1.0, 1e-9);
    EXPECT_NEAR(hit.point.z, 0.5, 1e-9);
}

TEST(NearestOnMesh, EmptyMeshFails) {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}};
    EXPECT_THROW(SpatialIndex index(mesh), ValidationError);
}

TEST(NearestOnMesh, TieBreaksToLowestFace) {
    // Two coincident triangles; any query ties and must report face 0.
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{3, 4, 5}, {0, 1, 2}};
    // face 0 and face 1 are geometrically identical
    SpatialIndex index(mesh);
    auto hit = index.nearest(Vec3d{0.2, 0.2, 0.7});
    EXPECT_EQ(hit.face_id, 0u);
    auto slow = nearest_on_mesh_bruteforce(mesh, Vec3d{0.2, 0.2, 0.7});
    EXPECT_EQ(slow.face_id, 0u);
}

TEST(SampleSurface, PointsLieOnSourceFace) {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{0, 1, 2}};
    auto samples = sample_surface(mesh, 1000, 5);
    ASSERT_EQ(samples.positions.size(), 1000u);
    for (const auto& p : samples.positions) {
        auto r = closest_point_triangle(p.cast<double>(), mesh.vertices[0].cast<double>(),
                                        mesh.vertices[1].cast<double>(), mesh.vertices[2].cast<double>());
        EXPECT_LT(r.distance, 1e-6);
    }
}

TEST(SampleSurface, AreaWeighting) {
    // Two triangles with area ratio 3:1; binomial 3-sigma bound on the split.
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {10, 0, 0}, {11, 0, 0}, {10, 2, 0}};
    mesh.faces = {{0, 1, 2}, {3, 4, 5}};
    ASSERT_NEAR(mesh.face_area(0) / mesh.face_area(1), 3.0, 1e-12);
    const size_t n = 40000;
    auto samples = sample_surface(mesh, n, 17);
    size_t count0 = 0;
    for (auto f : samples.face_ids) count0 += f == 0;
    double sigma = std::sqrt(n * 0.75 * 0.25);
    EXPECT_NEAR(static_cast<double>(count0), 0.75 * n, 3 * sigma);
}

TEST(SampleSurface, EmptyRequest) {
    auto mesh = testutil::cube_mesh(0.f, 1.f);
    auto samples = sample_surface(mesh, 0, 1);
    EXPECT_TRUE(samples.positions.empty());
}

TEST(SampleSurface, DeterministicPerSeed) {
    auto mesh = testutil::random_soup(30, 8);
    auto s1 = sample_surface(mesh, 500, 77);
    auto s2 = sample_surface(mesh, 500, 77);
    ASSERT_EQ(s1.positions.size(), s2.positions.size());
    for (size_t i = 0; i < s1.positions.size(); ++i) {
        EXPECT_EQ(s1.positions[i], s2.positions[i]);
        EXPECT_EQ(s1.face_ids[i], s2.face_ids[i]);
    }
    auto s3 = sample_surface(mesh, 500, 78);
    bool any_diff = false;
    for (size_t i = 0; i < s1.positions.size(); ++i) any_diff |= !(s1.positions[i] == s3.positions[i]);
    EXPECT_TRUE(any_diff);
}

TEST(SampleSurface, AllDegenerateFails) {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 1, 1}};
    mesh.faces = {{0, 0, 1}};
    EXPECT_THROW(sample_surface(mesh, 10, 1), ValidationError);
}

TEST(SampleSurface, LabelsCopiedFromFaces) {
    auto mesh = testutil::cube_mesh(0.f, 1.f);
    mesh.face_labels.resize(mesh.faces.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) mesh.face_labels[f] = static_cast<std::uint32_t>(f);
    auto samples = sample_surface(mesh, 2000, 9);
    for (size_t i = 0; i < samples.positions.size(); ++i)
        EXPECT_EQ(samples.labels[i], mesh.face_labels[samples.face_ids[i]]);
}
