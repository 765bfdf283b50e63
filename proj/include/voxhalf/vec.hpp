#pragma once

#include <cmath>
#include <cstdint>

namespace voxhalf {

struct Vec3i {
    int x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3i&, const Vec3i&) = default;
};

struct Vec2i {
    int x = 0, y = 0;
    friend bool operator==(const Vec2i&, const Vec2i&) = default;
};

struct Vec2d {
    double x = 0.0, y = 0.0;
};

struct Vec3d {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3d operator+(const Vec3d& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3d operator-(const Vec3d& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3d operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3d operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline double dot(const Vec3d& a, const Vec3d& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3d cross(const Vec3d& a, const Vec3d& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3d& a) { return std::sqrt(dot(a, a)); }

inline Vec3d normalized(const Vec3d& a) {
    double len = length(a);
    return len > 0.0 ? a / len : Vec3d{0.0, 0.0, 0.0};
}

// Scan-order key: ascending z, then y, then x.
inline bool scan_less(const Vec3i& a, const Vec3i& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

}  // namespace voxhalf
