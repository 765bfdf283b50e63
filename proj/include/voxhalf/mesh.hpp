#pragma once

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voxhalf/error.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

struct MeshTriangle {
    std::array<int, 3> v{-1, -1, -1};
    std::array<int, 3> vt{-1, -1, -1};
};

struct Mesh {
    std::vector<Vec3d> positions;
    std::vector<Vec2d> uvs;
    std::vector<Vec3d> vertex_colors;  // empty, or one sRGB triple per position
    std::vector<MeshTriangle> triangles;

    bool has_uvs() const {
        if (triangles.empty() || uvs.empty()) return false;
        for (const MeshTriangle& t : triangles)
            for (int k = 0; k < 3; ++k)
                if (t.vt[k] < 0) return false;
        return true;
    }
    bool has_vertex_colors() const { return vertex_colors.size() == positions.size() && !positions.empty(); }

    void bbox(Vec3d* mn, Vec3d* mx) const {
        if (positions.empty()) throw ConfigError("mesh has no vertices");
        *mn = *mx = positions[0];
        for (const Vec3d& p : positions) {
            mn->x = std::min(mn->x, p.x); mn->y = std::min(mn->y, p.y); mn->z = std::min(mn->z, p.z);
            mx->x = std::max(mx->x, p.x); mx->y = std::max(mx->y, p.y); mx->z = std::max(mx->z, p.z);
        }
    }
};

namespace detail {

// "3", "3/1", "3/1/2", "3//2"; negative indices count from the end.
inline void parse_face_corner(const std::string& tok, size_t nv, size_t nvt, int* v, int* vt) {
    int vi = 0, vti = 0;
    bool has_vt = false;
    size_t slash = tok.find('/');
    vi = std::stoi(tok.substr(0, slash));
    if (slash != std::string::npos) {
        size_t slash2 = tok.find('/', slash + 1);
        std::string mid = tok.substr(slash + 1, slash2 == std::string::npos ? std::string::npos
                                                                            : slash2 - slash - 1);
        if (!mid.empty()) {
            vti = std::stoi(mid);
            has_vt = true;
        }
    }
    *v = vi > 0 ? vi - 1 : static_cast<int>(nv) + vi;
    *vt = has_vt ? (vti > 0 ? vti - 1 : static_cast<int>(nvt) + vti) : -1;
    if (*v < 0 || *v >= static_cast<int>(nv)) throw IoError("OBJ: vertex index out of range");
    if (has_vt && (*vt < 0 || *vt >= static_cast<int>(nvt)))
        throw IoError("OBJ: texture index out of range");
}

}  // namespace detail

// ASCII OBJ subset: v (optionally with per-vertex RGB), vt, triangular f.
// Normals and grouping directives are ignored; non-triangle faces are errors.
inline Mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Mesh mesh;
    bool any_color = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw IoError("OBJ: malformed vertex in " + path);
            mesh.positions.push_back({x, y, z});
            double r, g, b;
            if (ls >> r >> g >> b) {
                mesh.vertex_colors.resize(mesh.positions.size() - 1, {1.0, 1.0, 1.0});
                mesh.vertex_colors.push_back({r, g, b});
                any_color = true;
            } else if (any_color) {
                mesh.vertex_colors.push_back({1.0, 1.0, 1.0});
            }
        } else if (key == "vt") {
            double u, v;
            if (!(ls >> u >> v)) throw IoError("OBJ: malformed vt in " + path);
            mesh.uvs.push_back({u, v});
        } else if (key == "f") {
            std::vector<std::string> corners;
            std::string tok;
            while (ls >> tok) corners.push_back(tok);
            if (corners.size() != 3)
                throw IoError("OBJ: only triangles are supported, got a face with " +
                              std::to_string(corners.size()) + " corners in " + path);
            MeshTriangle tri;
            for (int k = 0; k < 3; ++k)
                detail::parse_face_corner(corners[k], mesh.positions.size(), mesh.uvs.size(),
                                          &tri.v[k], &tri.vt[k]);
            mesh.triangles.push_back(tri);
        }
    }
    if (mesh.triangles.empty()) throw IoError(path + " contains no triangles");
    return mesh;
}

inline void save_obj(const Mesh& mesh, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path + " for writing");
    for (size_t i = 0; i < mesh.positions.size(); ++i) {
        const Vec3d& p = mesh.positions[i];
        if (mesh.has_vertex_colors()) {
            const Vec3d& c = mesh.vertex_colors[i];
            std::fprintf(f, "v %.9g %.9g %.9g %.9g %.9g %.9g\n", p.x, p.y, p.z, c.x, c.y, c.z);
        } else {
            std::fprintf(f, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
        }
    }
    for (const Vec2d& t : mesh.uvs) std::fprintf(f, "vt %.9g %.9g\n", t.x, t.y);
    for (const MeshTriangle& t : mesh.triangles) {
        if (t.vt[0] >= 0)
            std::fprintf(f, "f %d/%d %d/%d %d/%d\n", t.v[0] + 1, t.vt[0] + 1, t.v[1] + 1,
                         t.vt[1] + 1, t.v[2] + 1, t.vt[2] + 1);
        else
            std::fprintf(f, "f %d %d %d\n", t.v[0] + 1, t.v[1] + 1, t.v[2] + 1);
    }
    std::fclose(f);
}

}  // namespace voxhalf
