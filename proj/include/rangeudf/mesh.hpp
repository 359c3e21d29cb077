#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>

#include "rangeudf/common.hpp"

namespace rangeudf {

struct TriangleMesh {
    std::vector<Vec3f> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<std::uint32_t> face_labels;  // empty or one label per face

    bool has_labels() const { return !face_labels.empty(); }

    void validate() const {
        for (size_t f = 0; f < faces.size(); ++f)
            for (int k = 0; k < 3; ++k)
                if (faces[f][k] >= vertices.size())
                    throw ValidationError("face " + std::to_string(f) + " references vertex " +
                                          std::to_string(faces[f][k]) + " out of range (vertex count " +
                                          std::to_string(vertices.size()) + ")");
        if (!face_labels.empty() && face_labels.size() != faces.size())
            throw ValidationError("face label count " + std::to_string(face_labels.size()) +
                                  " does not match face count " + std::to_string(faces.size()));
    }

    Aabb bounds() const {
        Aabb box;
        for (const auto& v : vertices) box.grow(v.cast<double>());
        return box;
    }

    double face_area(size_t f) const {
        Vec3d a = vertices[faces[f][0]].cast<double>();
        Vec3d b = vertices[faces[f][1]].cast<double>();
        Vec3d c = vertices[faces[f][2]].cast<double>();
        return 0.5 * norm(cross(b - a, c - a));
    }
};

// Uniform scale + translation mapping original to normalized coordinates:
// p' = p * scale + offset.
struct NormalizeTransform {
    double scale = 1.0;
    Vec3d offset{0, 0, 0};

    Vec3f apply(const Vec3f& p) const {
        Vec3d q = p.cast<double>() * scale + offset;
        return q.cast<float>();
    }
};

// Centers the mesh at its bounding-box center and scales uniformly so the
// largest axis extent becomes 1.0 (all coordinates land in [-0.5, 0.5]).
inline std::pair<TriangleMesh, NormalizeTransform> normalize_unit_cube(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) throw ValidationError("normalize_unit_cube: mesh has no vertices");
    Aabb box = mesh.bounds();
    Vec3d ext = box.extent();
    double max_ext = std::max({ext.x, ext.y, ext.z});
    if (max_ext <= 0) throw ValidationError("normalize_unit_cube: mesh is a single point (zero extent)");

    NormalizeTransform tf;
    tf.scale = 1.0 / max_ext;
    tf.offset = box.center() * -tf.scale;

    TriangleMesh out = mesh;
    for (auto& v : out.vertices) {
        Vec3f q = tf.apply(v);
        // Guard float rounding at the box boundary.
        q.x = std::clamp(q.x, -0.5f, 0.5f);
        q.y = std::clamp(q.y, -0.5f, 0.5f);
        q.z = std::clamp(q.z, -0.5f, 0.5f);
        v = q;
    }
    return {std::move(out), tf};
}

namespace detail {

inline bool starts_with(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// Fan-triangulates a polygon's vertex indices into mesh.faces.
inline void emit_fan(TriangleMesh& mesh, const std::vector<std::uint32_t>& poly, size_t line_no) {
    if (poly.size() < 3)
        throw FormatError("face with fewer than 3 vertices at line " + std::to_string(line_no));
    for (size_t i = 1; i + 1 < poly.size(); ++i)
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
}

inline TriangleMesh load_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) throw FormatError("malformed vertex at line " + std::to_string(line_no));
            try {
                mesh.vertices.push_back({std::stof(toks[1]), std::stof(toks[2]), std::stof(toks[3])});
            } catch (const std::exception&) {
                throw FormatError("invalid vertex coordinate at line " + std::to_string(line_no));
            }
        } else if (toks[0] == "f") {
            std::vector<std::uint32_t> poly;
            for (size_t i = 1; i < toks.size(); ++i) {
                std::string idx = toks[i].substr(0, toks[i].find('/'));
                long v;
                try {
                    v = std::stol(idx);
                } catch (const std::exception&) {
                    throw FormatError("invalid face index at line " + std::to_string(line_no));
                }
                if (v < 0) v = static_cast<long>(mesh.vertices.size()) + v;  // relative index
                else v -= 1;                                                 // OBJ is 1-based
                if (v < 0) throw FormatError("face index out of range at line " + std::to_string(line_no));
                poly.push_back(static_cast<std::uint32_t>(v));
            }
            emit_fan(mesh, poly, line_no);
        }
        // Other record types (vn, vt, o, g, usemtl, ...) are ignored.
    }
    return mesh;
}

struct PlyProperty {
    std::string name;
    std::string type;        // scalar type, or value type for lists
    std::string count_type;  // non-empty for list properties
    bool is_list = false;
};

struct PlyElement {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> props;
};

inline size_t ply_type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    throw FormatError("unknown PLY type '" + t + "'");
}

inline double ply_read_scalar(const unsigned char* p, const std::string& t) {
    auto rd = [&](auto v) { std::memcpy(&v, p, sizeof v); return static_cast<double>(v); };
    if (t == "char" || t == "int8") return rd(std::int8_t{});
    if (t == "uchar" || t == "uint8") return rd(std::uint8_t{});
    if (t == "short" || t == "int16") return rd(std::int16_t{});
    if (t == "ushort" || t == "uint16") return rd(std::uint16_t{});
    if (t == "int" || t == "int32") return rd(std::int32_t{});
    if (t == "uint" || t == "uint32") return rd(std::uint32_t{});
    if (t == "float" || t == "float32") return rd(float{});
    return rd(double{});
}

struct PlyContents {
    std::vector<Vec3f> vertices;
    std::vector<std::int64_t> vertex_labels;  // empty if no label property
    std::vector<std::vector<std::uint32_t>> faces;
};

inline PlyContents load_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || (line != "ply" && line != "ply\r"))
        throw FormatError("not a PLY file (missing 'ply' magic)");

    bool binary = false;
    std::vector<PlyElement> elements;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "comment" || toks[0] == "obj_info") continue;
        if (toks[0] == "format") {
            if (toks.size() < 2) throw FormatError("malformed format line at line " + std::to_string(line_no));
            if (toks[1] == "ascii") binary = false;
            else if (toks[1] == "binary_little_endian") binary = true;
            else throw FormatError("unsupported PLY format '" + toks[1] + "'");
        } else if (toks[0] == "element") {
            if (toks.size() < 3) throw FormatError("malformed element at line " + std::to_string(line_no));
            elements.push_back({toks[1], static_cast<size_t>(std::stoull(toks[2])), {}});
        } else if (toks[0] == "property") {
            if (elements.empty() || toks.size() < 3)
                throw FormatError("property outside element at line " + std::to_string(line_no));
            PlyProperty p;
            if (toks[1] == "list") {
                if (toks.size() < 5) throw FormatError("malformed list property at line " + std::to_string(line_no));
                p.is_list = true;
                p.count_type = toks[2];
                p.type = toks[3];
                p.name = toks[4];
            } else {
                p.type = toks[1];
                p.name = toks[2];
            }
            elements.back().props.push_back(p);
        } else if (toks[0] == "end_header") {
            break;
        } else {
            throw FormatError("unexpected header token '" + toks[0] + "' at line " + std::to_string(line_no));
        }
    }

    PlyContents out;
    for (const auto& elem : elements) {
        bool is_vertex = elem.name == "vertex";
        bool is_face = elem.name == "face";
        int ix = -1, iy = -1, iz = -1, ilabel = -1, iface = -1;
        for (size_t i = 0; i < elem.props.size(); ++i) {
            const auto& p = elem.props[i];
            if (is_vertex && p.name == "x") ix = static_cast<int>(i);
            if (is_vertex && p.name == "y") iy = static_cast<int>(i);
            if (is_vertex && p.name == "z") iz = static_cast<int>(i);
            if (is_vertex && p.name == "label") ilabel = static_cast<int>(i);
            if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index"))
                iface = static_cast<int>(i);
        }
        if (is_vertex && (ix < 0 || iy < 0 || iz < 0))
            throw FormatError("PLY vertex element lacks x/y/z properties");
        if (is_face && iface < 0) throw FormatError("PLY face element lacks vertex_indices");

        for (size_t e = 0; e < elem.count; ++e) {
            std::vector<double> scalars(elem.props.size(), 0.0);
            std::vector<std::uint32_t> list_vals;
            if (binary) {
                for (size_t i = 0; i < elem.props.size(); ++i) {
                    const auto& p = elem.props[i];
                    if (p.is_list) {
                        unsigned char cbuf[8];
                        size_t cs = ply_type_size(p.count_type);
                        if (!in.read(reinterpret_cast<char*>(cbuf), cs))
                            throw ValidationError("PLY element '" + elem.name + "' ends early (header count " +
                                                  std::to_string(elem.count) + ", byte offset " +
                                                  std::to_string(in.tellg()) + ")");
                        size_t n = static_cast<size_t>(ply_read_scalar(cbuf, p.count_type));
                        size_t vs = ply_type_size(p.type);
                        std::vector<unsigned char> vbuf(vs * n);
                        if (n && !in.read(reinterpret_cast<char*>(vbuf.data()), vbuf.size()))
                            throw ValidationError("PLY list payload truncated in element '" + elem.name + "'");
                        if (static_cast<int>(i) == iface)
                            for (size_t k = 0; k < n; ++k)
                                list_vals.push_back(
                                    static_cast<std::uint32_t>(ply_read_scalar(vbuf.data() + k * vs, p.type)));
                    } else {
                        unsigned char buf[8];
                        size_t vs = ply_type_size(p.type);
                        if (!in.read(reinterpret_cast<char*>(buf), vs))
                            throw ValidationError("PLY element '" + elem.name + "' ends early (header count " +
                                                  std::to_string(elem.count) + ")");
                        scalars[i] = ply_read_scalar(buf, p.type);
                    }
                }
            } else {
                if (!std::getline(in, line))
                    throw ValidationError("PLY element '" + elem.name + "' has fewer rows than header count " +
                                          std::to_string(elem.count));
                auto toks = split_ws(line);
                size_t cursor = 0;
                for (size_t i = 0; i < elem.props.size(); ++i) {
                    const auto& p = elem.props[i];
                    if (cursor >= toks.size()) throw FormatError("short PLY row in element '" + elem.name + "'");
                    if (p.is_list) {
                        size_t n = std::stoull(toks[cursor++]);
                        if (cursor + n > toks.size())
                            throw FormatError("short PLY list row in element '" + elem.name + "'");
                        if (static_cast<int>(i) == iface)
                            for (size_t k = 0; k < n; ++k)
                                list_vals.push_back(static_cast<std::uint32_t>(std::stoul(toks[cursor + k])));
                        cursor += n;
                    } else {
                        scalars[i] = std::stod(toks[cursor++]);
                    }
                }
            }
            if (is_vertex) {
                out.vertices.push_back({static_cast<float>(scalars[ix]), static_cast<float>(scalars[iy]),
                                        static_cast<float>(scalars[iz])});
                if (ilabel >= 0) out.vertex_labels.push_back(static_cast<std::int64_t>(scalars[ilabel]));
            } else if (is_face) {
                out.faces.push_back(std::move(list_vals));
            }
        }
    }
    return out;
}

}  // namespace detail

inline std::optional<std::vector<std::uint32_t>> load_label_sidecar(const std::string& mesh_path) {
    std::ifstream in(mesh_path + ".labels");
    if (!in) return std::nullopt;
    std::vector<std::uint32_t> labels;
    long v;
    while (in >> v) {
        if (v < 0) throw ValidationError("negative label in " + mesh_path + ".labels");
        labels.push_back(static_cast<std::uint32_t>(v));
    }
    return labels;
}

// Loads an OBJ or PLY mesh (by extension). Polygons are fan-triangulated.
// Per-face labels are read from '<path>.labels' (one integer per triangle)
// when that sidecar exists.
inline TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mesh file '" + path + "'");

    TriangleMesh mesh;
    auto dotpos = path.find_last_of('.');
    std::string ext = dotpos == std::string::npos ? "" : path.substr(dotpos + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));

    if (ext == "obj") {
        mesh = detail::load_obj(in);
    } else if (ext == "ply") {
        auto contents = detail::load_ply(in);
        mesh.vertices = std::move(contents.vertices);
        for (size_t f = 0; f < contents.faces.size(); ++f)
            detail::emit_fan(mesh, contents.faces[f], f);
    } else {
        throw FormatError("unsupported mesh extension '." + ext + "' (expected .obj or .ply)");
    }

    if (auto labels = load_label_sidecar(path)) {
        if (labels->size() != mesh.faces.size())
            throw ValidationError("label sidecar has " + std::to_string(labels->size()) +
                                  " entries but mesh has " + std::to_string(mesh.faces.size()) + " faces");
        mesh.face_labels = std::move(*labels);
    }
    mesh.validate();
    return mesh;
}

// Writes a triangle mesh as PLY. Labels, when present, go to '<path>.labels'.
inline void save_mesh_ply(const TriangleMesh& mesh, const std::string& path, bool binary = true) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    if (binary) {
        for (const auto& v : mesh.vertices)
            out.write(reinterpret_cast<const char*>(&v.x), 3 * sizeof(float));
        for (const auto& f : mesh.faces) {
            unsigned char n = 3;
            out.write(reinterpret_cast<const char*>(&n), 1);
            std::int32_t idx[3] = {static_cast<std::int32_t>(f[0]), static_cast<std::int32_t>(f[1]),
                                   static_cast<std::int32_t>(f[2])};
            out.write(reinterpret_cast<const char*>(idx), sizeof idx);
        }
    } else {
        for (const auto& v : mesh.vertices) out << v.x << " " << v.y << " " << v.z << "\n";
        for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
    if (mesh.has_labels()) {
        std::ofstream lab(path + ".labels");
        if (!lab) throw IoError("cannot open '" + path + ".labels' for writing");
        for (auto l : mesh.face_labels) lab << l << "\n";
    }
}

// Point-cloud PLY with an optional integer label per point.
inline void save_points_ply(const std::vector<Vec3f>& points, const std::string& path,
                            const std::vector<std::uint32_t>* labels = nullptr, bool binary = true) {
    if (labels && labels->size() != points.size())
        throw ValidationError("label count does not match point count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    out << "element vertex " << points.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (labels) out << "property int label\n";
    out << "end_header\n";
    if (binary) {
        for (size_t i = 0; i < points.size(); ++i) {
            out.write(reinterpret_cast<const char*>(&points[i].x), 3 * sizeof(float));
            if (labels) {
                std::int32_t l = static_cast<std::int32_t>((*labels)[i]);
                out.write(reinterpret_cast<const char*>(&l), sizeof l);
            }
        }
    } else {
        for (size_t i = 0; i < points.size(); ++i) {
            out << points[i].x << " " << points[i].y << " " << points[i].z;
            if (labels) out << " " << (*labels)[i];
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

struct LabeledPoints {
    std::vector<Vec3f> positions;
    std::vector<std::uint32_t> labels;  // empty if the file had no label property
};

inline LabeledPoints load_points_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open points file '" + path + "'");
    auto contents = detail::load_ply(in);
    LabeledPoints out;
    out.positions = std::move(contents.vertices);
    for (auto l : contents.vertex_labels) {
        if (l < 0) throw ValidationError("negative point label in '" + path + "'");
        out.labels.push_back(static_cast<std::uint32_t>(l));
    }
    return out;
}

}  // namespace rangeudf
