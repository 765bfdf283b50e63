#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "voxhalf/detail/color.hpp"
#include "voxhalf/detail/geometry.hpp"
#include "voxhalf/error.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/mesh.hpp"
#include "voxhalf/texture.hpp"

namespace voxhalf {

enum class ColorSource { Texture, VertexColors, Constant };

struct ColorSampler {
    ColorSource source = ColorSource::Constant;
    const TextureImage* texture = nullptr;
    Vec3d constant{1.0, 1.0, 1.0};
};

// Precomputed per-grid view of a mesh: per-column ray crossings for the
// parity test and per-slice triangle buckets for surface queries. Columns are
// cast along +z; an odd crossing count on any column is exactly a +z/-z
// parity disagreement, i.e. a non-watertight mesh.
class MeshRaster {
public:
    MeshRaster(const Mesh& mesh, const GridSpec& spec) : mesh_(&mesh), spec_(spec) {
        spec_.validate();
        Vec3d mn, mx;
        mesh.bbox(&mn, &mx);
        double diag = length(mx - mn);
        eps_ = 1e-9 * diag;
        build_columns();
        build_buckets();
    }

    const GridSpec& spec() const { return spec_; }
    const Mesh& mesh() const { return *mesh_; }

    // Parity interior test for one slice; out-of-range slices are all exterior.
    void interior_plane(int s, std::vector<uint8_t>& out) const {
        out.assign(spec_.slice_voxels(), 0);
        if (s < 0 || s >= spec_.dims.z) return;
        double cz = spec_.origin.z + (s + 0.5) * spec_.pitch.z;
        for (size_t col = 0; col < columns_.size(); ++col) {
            const std::vector<double>& cr = columns_[col];
            size_t below = std::lower_bound(cr.begin(), cr.end(), cz) - cr.begin();
            if (below & 1) out[col] = 1;
        }
    }

    // Full class plane for slice s: parity interior, then Surface = interior
    // with an exterior voxel in the 26-window or a triangle through the cell.
    void classify_slice(int s, std::vector<uint8_t>& cls) const {
        std::vector<uint8_t> below, here, above;
        interior_plane(s - 1, below);
        interior_plane(s, here);
        interior_plane(s + 1, above);
        std::vector<uint8_t> marks;
        triangle_marks(s, marks);
        int nx = spec_.dims.x, ny = spec_.dims.y;
        cls.assign(spec_.slice_voxels(), static_cast<uint8_t>(VoxelClass::Exterior));
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                size_t i = spec_.plane_index(x, y);
                if (!here[i]) continue;
                bool surface = marks[i] != 0;
                for (int dy = -1; dy <= 1 && !surface; ++dy)
                    for (int dx = -1; dx <= 1 && !surface; ++dx) {
                        int ux = x + dx, uy = y + dy;
                        if (ux < 0 || uy < 0 || ux >= nx || uy >= ny) continue;
                        size_t j = spec_.plane_index(ux, uy);
                        if (!below[j] || !here[j] || !above[j]) surface = true;
                    }
                cls[i] = static_cast<uint8_t>(surface ? VoxelClass::Surface : VoxelClass::Interior);
            }
    }

    // Triangles whose z-range meets [z_s - pz, z_s + pz] (the color slab).
    const std::vector<int32_t>& slab_triangles(int s) const {
        static const std::vector<int32_t> empty;
        if (s < 0 || s >= spec_.dims.z) return empty;
        return loose_buckets_[s];
    }

    // Color at the mesh point closest to the voxel center, via the sampler.
    Vec3d closest_surface_color(VoxelCoord v, const ColorSampler& sampler) const {
        Vec3d p = spec_.voxel_center(v);
        int tri = -1;
        double bu = 0, bv = 0, bw = 0;
        // widen the slab until a triangle is found; surface voxels hit the
        // home slab in practice
        for (int radius = 0; tri < 0 && radius <= spec_.dims.z; ++radius) {
            double best = 0.0;
            for (int side = 0; side < 2; ++side) {
                if (side == 1 && radius == 0) continue;  // home bucket once
                int s = side == 0 ? v.z - radius : v.z + radius;
                if (s < 0 || s >= spec_.dims.z) continue;
                for (int32_t t : loose_buckets_[s]) {
                    double u0, v0, w0;
                    auto [a, b, c] = triangle_points(t);
                    Vec3d q = detail::closest_point_on_triangle(p, a, b, c, &u0, &v0, &w0);
                    double dist = dot(q - p, q - p);
                    if (tri < 0 || dist < best) {
                        best = dist;
                        tri = t;
                        bu = u0;
                        bv = v0;
                        bw = w0;
                    }
                }
            }
        }
        if (tri < 0) throw ConfigError("no triangles available for color sampling");
        return sample_triangle_color(tri, bu, bv, bw, sampler);
    }

    // Fill a 3-doubles-per-voxel color plane for the Surface voxels of slice s.
    void sample_surface_colors(int s, const std::vector<uint8_t>& cls,
                               const ColorSampler& sampler, std::vector<double>& colors) const {
        colors.assign(spec_.slice_voxels() * 3, 0.0);
        for (int y = 0; y < spec_.dims.y; ++y)
            for (int x = 0; x < spec_.dims.x; ++x) {
                size_t i = spec_.plane_index(x, y);
                if (static_cast<VoxelClass>(cls[i]) != VoxelClass::Surface) continue;
                Vec3d c = closest_surface_color({x, y, s}, sampler);
                colors[i * 3] = c.x;
                colors[i * 3 + 1] = c.y;
                colors[i * 3 + 2] = c.z;
            }
    }

private:
    std::array<Vec3d, 3> triangle_points(int32_t t) const {
        const MeshTriangle& tri = mesh_->triangles[t];
        return {mesh_->positions[tri.v[0]], mesh_->positions[tri.v[1]], mesh_->positions[tri.v[2]]};
    }

    void build_columns() {
        int nx = spec_.dims.x, ny = spec_.dims.y;
        columns_.assign(spec_.slice_voxels(), {});
        for (size_t t = 0; t < mesh_->triangles.size(); ++t) {
            auto [a, b, c] = triangle_points(static_cast<int32_t>(t));
            double minx = std::min({a.x, b.x, c.x}), maxx = std::max({a.x, b.x, c.x});
            double miny = std::min({a.y, b.y, c.y}), maxy = std::max({a.y, b.y, c.y});
            int x0 = std::max(0, static_cast<int>(std::floor((minx - spec_.origin.x) / spec_.pitch.x)) - 1);
            int x1 = std::min(nx - 1, static_cast<int>(std::floor((maxx - spec_.origin.x) / spec_.pitch.x)) + 1);
            int y0 = std::max(0, static_cast<int>(std::floor((miny - spec_.origin.y) / spec_.pitch.y)) - 1);
            int y1 = std::min(ny - 1, static_cast<int>(std::floor((maxy - spec_.origin.y) / spec_.pitch.y)) + 1);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    // ray origins get a tiny fixed xy offset so edge and
                    // vertex hits are dodged deterministically; the two axes
                    // use incommensurate multiples so diagonal edges through
                    // the voxel lattice are dodged as well
                    double cx = spec_.origin.x + (x + 0.5) * spec_.pitch.x + eps_;
                    double cy = spec_.origin.y + (y + 0.5) * spec_.pitch.y +
                                eps_ * 1.6180339887498949;
                    double e0 = (b.x - a.x) * (cy - a.y) - (b.y - a.y) * (cx - a.x);
                    double e1 = (c.x - b.x) * (cy - b.y) - (c.y - b.y) * (cx - b.x);
                    double e2 = (a.x - c.x) * (cy - c.y) - (a.y - c.y) * (cx - c.x);
                    bool inside = (e0 > 0 && e1 > 0 && e2 > 0) || (e0 < 0 && e1 < 0 && e2 < 0);
                    if (!inside) continue;
                    Vec3d n = cross(b - a, c - a);
                    if (n.z == 0.0) continue;
                    double z = a.z + (n.x * (a.x - cx) + n.y * (a.y - cy)) / n.z;
                    columns_[spec_.plane_index(x, y)].push_back(z);
                }
        }
        for (size_t col = 0; col < columns_.size(); ++col) {
            std::sort(columns_[col].begin(), columns_[col].end());
            if (columns_[col].size() & 1)
                throw NonWatertightMeshError(
                    "casting directions disagree on column (" +
                    std::to_string(col % spec_.dims.x) + "," +
                    std::to_string(col / spec_.dims.x) + "): odd crossing count");
        }
    }

    void build_buckets() {
        int nz = spec_.dims.z;
        loose_buckets_.assign(nz, {});
        strict_buckets_.assign(nz, {});
        for (size_t t = 0; t < mesh_->triangles.size(); ++t) {
            auto [a, b, c] = triangle_points(static_cast<int32_t>(t));
            double minz = std::min({a.z, b.z, c.z}), maxz = std::max({a.z, b.z, c.z});
            int s0 = static_cast<int>(std::floor((minz - spec_.origin.z) / spec_.pitch.z));
            int s1 = static_cast<int>(std::floor((maxz - spec_.origin.z) / spec_.pitch.z));
            for (int s = std::max(0, s0); s <= std::min(nz - 1, s1); ++s)
                strict_buckets_[s].push_back(static_cast<int32_t>(t));
            for (int s = std::max(0, s0 - 1); s <= std::min(nz - 1, s1 + 1); ++s)
                loose_buckets_[s].push_back(static_cast<int32_t>(t));
        }
    }

    void triangle_marks(int s, std::vector<uint8_t>& marks) const {
        marks.assign(spec_.slice_voxels(), 0);
        if (s < 0 || s >= spec_.dims.z) return;
        Vec3d half = spec_.pitch * 0.5;
        for (int32_t t : strict_buckets_[s]) {
            auto [a, b, c] = triangle_points(t);
            double minx = std::min({a.x, b.x, c.x}), maxx = std::max({a.x, b.x, c.x});
            double miny = std::min({a.y, b.y, c.y}), maxy = std::max({a.y, b.y, c.y});
            int x0 = std::max(0, static_cast<int>(std::floor((minx - spec_.origin.x) / spec_.pitch.x)));
            int x1 = std::min(spec_.dims.x - 1,
                              static_cast<int>(std::floor((maxx - spec_.origin.x) / spec_.pitch.x)));
            int y0 = std::max(0, static_cast<int>(std::floor((miny - spec_.origin.y) / spec_.pitch.y)));
            int y1 = std::min(spec_.dims.y - 1,
                              static_cast<int>(std::floor((maxy - spec_.origin.y) / spec_.pitch.y)));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    size_t i = spec_.plane_index(x, y);
                    if (marks[i]) continue;
                    Vec3d center = spec_.voxel_center({x, y, s});
                    if (detail::tri_box_overlap(center, half, a, b, c)) marks[i] = 1;
                }
        }
    }

    Vec3d sample_triangle_color(int32_t t, double bu, double bv, double bw,
                                const ColorSampler& sampler) const {
        if (sampler.source == ColorSource::Constant) return sampler.constant;
        const MeshTriangle& tri = mesh_->triangles[t];
        if (sampler.source == ColorSource::VertexColors) {
            if (!mesh_->has_vertex_colors())
                throw MissingColorSourceError("mesh has no vertex colors");
            // blend in linearized color, like the mip pyramid
            Vec3d acc{0, 0, 0};
            double w[3] = {bu, bv, bw};
            for (int k = 0; k < 3; ++k) {
                const Vec3d& c = mesh_->vertex_colors[tri.v[k]];
                acc.x += w[k] * detail::srgb_to_linear(c.x);
                acc.y += w[k] * detail::srgb_to_linear(c.y);
                acc.z += w[k] * detail::srgb_to_linear(c.z);
            }
            return {detail::linear_to_srgb(acc.x), detail::linear_to_srgb(acc.y),
                    detail::linear_to_srgb(acc.z)};
        }
        if (!sampler.texture || tri.vt[0] < 0 || tri.vt[1] < 0 || tri.vt[2] < 0)
            throw MissingColorSourceError("texture sampling needs a texture and per-corner uvs");
        const Vec2d& t0 = mesh_->uvs[tri.vt[0]];
        const Vec2d& t1 = mesh_->uvs[tri.vt[1]];
        const Vec2d& t2 = mesh_->uvs[tri.vt[2]];
        double u = bu * t0.x + bv * t1.x + bw * t2.x;
        double v = bu * t0.y + bv * t1.y + bw * t2.y;
        return sampler.texture->sample_srgb(u, v, lod_for_triangle(t, *sampler.texture));
    }

    // log2 of the texel footprint of one voxel step, from the triangle's
    // affine world->uv map.
    double lod_for_triangle(int32_t t, const TextureImage& tex) const {
        auto [a, b, c] = triangle_points(t);
        const MeshTriangle& tri = mesh_->triangles[t];
        const Vec2d& t0 = mesh_->uvs[tri.vt[0]];
        const Vec2d& t1 = mesh_->uvs[tri.vt[1]];
        const Vec2d& t2 = mesh_->uvs[tri.vt[2]];
        Vec3d e1 = b - a, e2 = c - a;
        Vec3d n = cross(e1, e2);
        double n2 = dot(n, n);
        if (n2 == 0.0) return 0.0;
        // solve g . e1 = du1, g . e2 = du2, g . n = 0 for the uv gradients
        auto gradient = [&](double du1, double du2) {
            Vec3d ge = cross(e2, n) * du1 + cross(n, e1) * du2;
            return ge / n2;
        };
        Vec3d gu = gradient((t1.x - t0.x) * tex.width(), (t2.x - t0.x) * tex.width());
        Vec3d gv = gradient((t1.y - t0.y) * tex.height(), (t2.y - t0.y) * tex.height());
        double footprint = 0.0;
        const double steps[3][3] = {{spec_.pitch.x, 0, 0}, {0, spec_.pitch.y, 0}, {0, 0, spec_.pitch.z}};
        for (const double* st : steps) {
            Vec3d d{st[0], st[1], st[2]};
            double fu = dot(gu, d), fv = dot(gv, d);
            footprint = std::max(footprint, std::sqrt(fu * fu + fv * fv));
        }
        return footprint > 0.0 ? std::max(0.0, std::log2(footprint)) : 0.0;
    }

    const Mesh* mesh_;
    GridSpec spec_;
    double eps_ = 0.0;
    std::vector<std::vector<double>> columns_;
    std::vector<std::vector<int32_t>> loose_buckets_;
    std::vector<std::vector<int32_t>> strict_buckets_;
};

// Grid that wraps the mesh bbox with a pad ring of exterior voxels.
inline GridSpec grid_from_mesh(const Mesh& mesh, Vec3d pitch, int pad = 2) {
    Vec3d mn, mx;
    mesh.bbox(&mn, &mx);
    GridSpec spec;
    spec.pitch = pitch;
    spec.origin = {mn.x - pad * pitch.x, mn.y - pad * pitch.y, mn.z - pad * pitch.z};
    spec.dims = {static_cast<int>(std::floor((mx.x - spec.origin.x) / pitch.x)) + 1 + pad,
                 static_cast<int>(std::floor((mx.y - spec.origin.y) / pitch.y)) + 1 + pad,
                 static_cast<int>(std::floor((mx.z - spec.origin.z) / pitch.z)) + 1 + pad};
    spec.validate();
    return spec;
}

}  // namespace voxhalf
