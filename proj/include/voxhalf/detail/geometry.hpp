#pragma once

#include <algorithm>
#include <cmath>

#include "voxhalf/vec.hpp"

namespace voxhalf::detail {

// Closest point on triangle (a,b,c) to p, plus its barycentric coordinates.
// Voronoi-region walk after Ericson, Real-Time Collision Detection 5.1.5.
inline Vec3d closest_point_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b,
                                       const Vec3d& c, double* u, double* v, double* w) {
    Vec3d ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        *u = 1.0; *v = 0.0; *w = 0.0;
        return a;
    }
    Vec3d bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) {
        *u = 0.0; *v = 1.0; *w = 0.0;
        return b;
    }
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double t = d1 / (d1 - d3);
        *u = 1.0 - t; *v = t; *w = 0.0;
        return a + ab * t;
    }
    Vec3d cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) {
        *u = 0.0; *v = 0.0; *w = 1.0;
        return c;
    }
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double t = d2 / (d2 - d6);
        *u = 1.0 - t; *v = 0.0; *w = t;
        return a + ac * t;
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        *u = 0.0; *v = 1.0 - t; *w = t;
        return b + (c - b) * t;
    }
    double denom = 1.0 / (va + vb + vc);
    double bv = vb * denom, bw = vc * denom;
    *u = 1.0 - bv - bw; *v = bv; *w = bw;
    return a + ab * bv + ac * bw;
}

// Triangle vs axis-aligned box, separating axis test (Akenine-Moller).
inline bool tri_box_overlap(const Vec3d& center, const Vec3d& half, const Vec3d& ta,
                            const Vec3d& tb, const Vec3d& tc) {
    Vec3d v0 = ta - center, v1 = tb - center, v2 = tc - center;
    Vec3d e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

    auto axis_test = [&](double a, double b, double fa, double fb, double p0, double p1,
                         double rx, double ry) {
        (void)a; (void)b;
        double mn = std::min(p0, p1), mx = std::max(p0, p1);
        double rad = fa * rx + fb * ry;
        return !(mn > rad || mx < -rad);
    };

    // 9 cross-product axes
    double fex = std::fabs(e0.x), fey = std::fabs(e0.y), fez = std::fabs(e0.z);
    if (!axis_test(e0.z, e0.y, fez, fey, e0.z * v0.y - e0.y * v0.z, e0.z * v2.y - e0.y * v2.z, half.y, half.z)) return false;
    if (!axis_test(e0.z, e0.x, fez, fex, -e0.z * v0.x + e0.x * v0.z, -e0.z * v2.x + e0.x * v2.z, half.x, half.z)) return false;
    if (!axis_test(e0.y, e0.x, fey, fex, e0.y * v1.x - e0.x * v1.y, e0.y * v2.x - e0.x * v2.y, half.x, half.y)) return false;

    fex = std::fabs(e1.x); fey = std::fabs(e1.y); fez = std::fabs(e1.z);
    if (!axis_test(e1.z, e1.y, fez, fey, e1.z * v0.y - e1.y * v0.z, e1.z * v2.y - e1.y * v2.z, half.y, half.z)) return false;
    if (!axis_test(e1.z, e1.x, fez, fex, -e1.z * v0.x + e1.x * v0.z, -e1.z * v2.x + e1.x * v2.z, half.x, half.z)) return false;
    if (!axis_test(e1.y, e1.x, fey, fex, e1.y * v0.x - e1.x * v0.y, e1.y * v1.x - e1.x * v1.y, half.x, half.y)) return false;

    fex = std::fabs(e2.x); fey = std::fabs(e2.y); fez = std::fabs(e2.z);
    if (!axis_test(e2.z, e2.y, fez, fey, e2.z * v0.y - e2.y * v0.z, e2.z * v1.y - e2.y * v1.z, half.y, half.z)) return false;
    if (!axis_test(e2.z, e2.x, fez, fex, -e2.z * v0.x + e2.x * v0.z, -e2.z * v1.x + e2.x * v1.z, half.x, half.z)) return false;
    if (!axis_test(e2.y, e2.x, fey, fex, e2.y * v1.x - e2.x * v1.y, e2.y * v2.x - e2.x * v2.y, half.x, half.y)) return false;

    // box face axes
    auto minmax3 = [](double a, double b, double c, double& mn, double& mx) {
        mn = std::min({a, b, c});
        mx = std::max({a, b, c});
    };
    double mn, mx;
    minmax3(v0.x, v1.x, v2.x, mn, mx);
    if (mn > half.x || mx < -half.x) return false;
    minmax3(v0.y, v1.y, v2.y, mn, mx);
    if (mn > half.y || mx < -half.y) return false;
    minmax3(v0.z, v1.z, v2.z, mn, mx);
    if (mn > half.z || mx < -half.z) return false;

    // triangle plane
    Vec3d n = cross(e0, e1);
    double dist = dot(n, v0);
    double r = half.x * std::fabs(n.x) + half.y * std::fabs(n.y) + half.z * std::fabs(n.z);
    return std::fabs(dist) <= r;
}

}  // namespace voxhalf::detail
