#pragma once

#include <cmath>
#include <numbers>

#include "voxhalf/mesh.hpp"

namespace voxhalf {

// Closed axis-aligned box spanning [origin, origin + size]. Every face gets
// footprint UVs (u = x / size.x, v = y / size.y), so sampled color depends
// only on the (x, y) position; that makes thin plates behave like a printed
// image pushed straight down through the part.
inline Mesh make_plate(Vec3d size, Vec3d origin = {0, 0, 0}) {
    Mesh m;
    for (int c = 0; c < 8; ++c) {
        Vec3d p{origin.x + ((c & 1) ? size.x : 0.0), origin.y + ((c & 2) ? size.y : 0.0),
                origin.z + ((c & 4) ? size.z : 0.0)};
        m.positions.push_back(p);
    }
    m.uvs = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};  // indexed by the (x, y) corner bits
    auto quad = [&](int a, int b, int c, int d) {
        auto uv = [](int v) { return v & 3; };
        m.triangles.push_back({{a, b, c}, {uv(a), uv(b), uv(c)}});
        m.triangles.push_back({{a, c, d}, {uv(a), uv(c), uv(d)}});
    };
    quad(0, 2, 3, 1);  // bottom (z = 0), outward -z
    quad(4, 5, 7, 6);  // top, outward +z
    quad(0, 1, 5, 4);  // front (y = 0)
    quad(2, 6, 7, 3);  // back
    quad(0, 4, 6, 2);  // left (x = 0)
    quad(1, 3, 7, 5);  // right
    return m;
}

inline Mesh make_cube(double size, Vec3d origin = {0, 0, 0}) {
    return make_plate({size, size, size}, origin);
}

// Latitude/longitude sphere; poles are fans, so the mesh is watertight.
inline Mesh make_sphere(double radius, int segments, int rings, Vec3d center = {0, 0, 0}) {
    Mesh m;
    m.positions.push_back({center.x, center.y, center.z + radius});
    for (int i = 1; i < rings; ++i) {
        double phi = std::numbers::pi * i / rings;
        for (int j = 0; j < segments; ++j) {
            double theta = 2.0 * std::numbers::pi * j / segments;
            m.positions.push_back({center.x + radius * std::sin(phi) * std::cos(theta),
                                   center.y + radius * std::sin(phi) * std::sin(theta),
                                   center.z + radius * std::cos(phi)});
        }
    }
    m.positions.push_back({center.x, center.y, center.z - radius});
    int south = static_cast<int>(m.positions.size()) - 1;
    auto ring = [&](int i, int j) { return 1 + (i - 1) * segments + (j % segments); };
    for (int j = 0; j < segments; ++j)
        m.triangles.push_back({{0, ring(1, j), ring(1, j + 1)}, {-1, -1, -1}});
    for (int i = 1; i + 1 < rings; ++i)
        for (int j = 0; j < segments; ++j) {
            m.triangles.push_back({{ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)}, {-1, -1, -1}});
            m.triangles.push_back({{ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)}, {-1, -1, -1}});
        }
    for (int j = 0; j < segments; ++j)
        m.triangles.push_back({{south, ring(rings - 1, j + 1), ring(rings - 1, j)}, {-1, -1, -1}});
    return m;
}

// Torus around the z axis: major radius to the tube center, minor radius of
// the tube itself. Watertight and genus one, which makes its slice contours
// split and merge; a good traversal exercise.
inline Mesh make_torus(double major, double minor, int seg_major, int seg_minor,
                       Vec3d center = {0, 0, 0}) {
    Mesh m;
    for (int i = 0; i < seg_major; ++i) {
        double a = 2.0 * std::numbers::pi * i / seg_major;
        for (int j = 0; j < seg_minor; ++j) {
            double b = 2.0 * std::numbers::pi * j / seg_minor;
            double rad = major + minor * std::cos(b);
            m.positions.push_back({center.x + rad * std::cos(a), center.y + rad * std::sin(a),
                                   center.z + minor * std::sin(b)});
        }
    }
    auto at = [&](int i, int j) { return (i % seg_major) * seg_minor + (j % seg_minor); };
    for (int i = 0; i < seg_major; ++i)
        for (int j = 0; j < seg_minor; ++j) {
            m.triangles.push_back({{at(i, j), at(i + 1, j), at(i + 1, j + 1)}, {-1, -1, -1}});
            m.triangles.push_back({{at(i, j), at(i + 1, j + 1), at(i, j + 1)}, {-1, -1, -1}});
        }
    return m;
}

// Two disjoint spheres in one mesh: a multi-component part.
inline Mesh make_two_spheres(double radius, double gap, int segments, int rings) {
    Mesh m = make_sphere(radius, segments, rings, {0, 0, 0});
    Mesh b = make_sphere(radius, segments, rings, {2 * radius + gap, 0, 0});
    int base = static_cast<int>(m.positions.size());
    m.positions.insert(m.positions.end(), b.positions.begin(), b.positions.end());
    for (MeshTriangle t : b.triangles) {
        for (int k = 0; k < 3; ++k) t.v[k] += base;
        m.triangles.push_back(t);
    }
    return m;
}

// Per-vertex sRGB gradient c0 -> c1 along one axis of the bounding box.
inline void paint_vertex_gradient(Mesh& m, int axis, Vec3d c0, Vec3d c1) {
    Vec3d mn, mx;
    m.bbox(&mn, &mx);
    double lo = axis == 0 ? mn.x : axis == 1 ? mn.y : mn.z;
    double hi = axis == 0 ? mx.x : axis == 1 ? mx.y : mx.z;
    double span = hi > lo ? hi - lo : 1.0;
    m.vertex_colors.resize(m.positions.size());
    for (size_t i = 0; i < m.positions.size(); ++i) {
        const Vec3d& p = m.positions[i];
        double t = ((axis == 0 ? p.x : axis == 1 ? p.y : p.z) - lo) / span;
        m.vertex_colors[i] = c0 * (1.0 - t) + c1 * t;
    }
}

}  // namespace voxhalf
