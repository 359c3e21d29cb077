#pragma once

#include "rangeudf/common.hpp"

namespace rangeudf {

enum class TriRegion { Vertex, Edge, Interior };

struct ClosestPointResult {
    double distance = 0;
    Vec3d point;
    TriRegion region = TriRegion::Interior;
};

namespace detail {

// Closest point on segment [a,b]; t reported for region classification.
inline Vec3d closest_on_segment(const Vec3d& p, const Vec3d& a, const Vec3d& b, double& t) {
    Vec3d ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 <= 0) { t = 0; return a; }
    t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return a + ab * t;
}

}  // namespace detail

// Exact closest point on a triangle (Ericson's region walk). Degenerate
// triangles collapse to segment/point queries.
inline ClosestPointResult closest_point_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b,
                                                 const Vec3d& c) {
    auto finish = [&](const Vec3d& q, TriRegion r) {
        return ClosestPointResult{norm(p - q), q, r};
    };

    Vec3d ab = b - a, ac = c - a, ap = p - a;
    Vec3d n = cross(ab, ac);
    if (dot(n, n) <= 0) {
        // Degenerate: reduce to the longest of the three edges as a segment.
        double lab = norm2(b - a), lbc = norm2(c - b), lca = norm2(a - c);
        Vec3d s0 = a, s1 = b;
        if (lbc >= lab && lbc >= lca) { s0 = b; s1 = c; }
        else if (lca >= lab && lca >= lbc) { s0 = c; s1 = a; }
        double t;
        Vec3d q = detail::closest_on_segment(p, s0, s1, t);
        TriRegion r = (t <= 0.0 || t >= 1.0) ? TriRegion::Vertex : TriRegion::Edge;
        if (norm2(s1 - s0) <= 0) r = TriRegion::Vertex;
        return finish(q, r);
    }

    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return finish(a, TriRegion::Vertex);

    Vec3d bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return finish(b, TriRegion::Vertex);

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        double v = d1 / (d1 - d3);
        return finish(a + ab * v, TriRegion::Edge);
    }

    Vec3d cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return finish(c, TriRegion::Vertex);

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        double w = d2 / (d2 - d6);
        return finish(a + ac * w, TriRegion::Edge);
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return finish(b + (c - b) * w, TriRegion::Edge);
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return finish(a + ab * v + ac * w, TriRegion::Interior);
}

}  // namespace rangeudf
