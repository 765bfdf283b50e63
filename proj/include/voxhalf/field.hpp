#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "voxhalf/error.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

struct MaskOffset {
    Vec3i d;
    double dist;
};

// Anisotropy-aware spherical mask: every lattice offset whose physical length
// is at most d_max, ascending by (distance, z, y, x).
struct DistanceMask {
    double d_max = 0.0;
    double d_null = 0.0;  // sentinel for "beyond d_max", 2 * d_max
    int max_dz = 0;
    std::vector<MaskOffset> offsets;

    struct PlaneOffset {
        int dx, dy;
        double dist;
    };
    std::vector<std::vector<PlaneOffset>> by_dz;  // index dz + max_dz

    const std::vector<PlaneOffset>& plane(int dz) const { return by_dz[dz + max_dz]; }
};

inline DistanceMask build_distance_mask(Vec3d pitch, double d_max, size_t budget = 16'000'000) {
    DistanceMask mask;
    mask.d_max = d_max;
    mask.d_null = 2.0 * d_max;
    int rx = static_cast<int>(std::floor(d_max / pitch.x));
    int ry = static_cast<int>(std::floor(d_max / pitch.y));
    int rz = static_cast<int>(std::floor(d_max / pitch.z));
    for (int k = -rz; k <= rz; ++k)
        for (int j = -ry; j <= ry; ++j)
            for (int i = -rx; i <= rx; ++i) {
                double dx = i * pitch.x, dy = j * pitch.y, dz = k * pitch.z;
                double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (dist <= d_max) {
                    mask.offsets.push_back({{i, j, k}, dist});
                    if (mask.offsets.size() > budget)
                        throw MaskTooLargeError("distance mask exceeds offset budget");
                }
            }
    std::sort(mask.offsets.begin(), mask.offsets.end(),
              [](const MaskOffset& a, const MaskOffset& b) {
                  if (a.dist != b.dist) return a.dist < b.dist;
                  return scan_less(a.d, b.d);
              });
    // rz is only an upper bound: k*pitch.z can drift just past d_max in
    // floating point, so derive the reach from the offsets actually kept
    mask.max_dz = 0;
    for (const MaskOffset& o : mask.offsets)
        mask.max_dz = std::max(mask.max_dz, std::abs(o.d.z));
    mask.by_dz.assign(2 * mask.max_dz + 1, {});
    for (const MaskOffset& o : mask.offsets)
        mask.by_dz[o.d.z + mask.max_dz].push_back({o.d.x, o.d.y, o.dist});
    return mask;
}

using ClsPlaneFn = std::function<const uint8_t*(int)>;   // slice -> class plane
using TonalPlaneFn = std::function<const double*(int)>;  // slice -> tonal plane

// Distance-and-tonal gather for one target slice. Equivalent to sweeping the
// mask over every surface voxel, organized per target so writes never race:
// sources run in ascending (z, y, x) and strict less-than keeps the first
// writer on ties, which is exactly the scan-order tie rule.
inline void sweep_gather_slice(const GridSpec& spec, const DistanceMask& mask, int t,
                               int channels, const ClsPlaneFn& cls_of, const TonalPlaneFn& g_of,
                               double* d_out, double* ghat_out, Vec3i* nearest_out) {
    size_t nxy = spec.slice_voxels();
    std::fill(d_out, d_out + nxy, mask.d_null);
    std::fill(ghat_out, ghat_out + nxy * channels, 0.0);
    if (nearest_out) std::fill(nearest_out, nearest_out + nxy, Vec3i{-1, -1, -1});
    int nx = spec.dims.x, ny = spec.dims.y;
    int s0 = std::max(0, t - mask.max_dz), s1 = std::min(spec.dims.z - 1, t + mask.max_dz);
    for (int sz = s0; sz <= s1; ++sz) {
        const uint8_t* cls = cls_of(sz);
        const double* g = g_of(sz);
        const auto& plane = mask.plane(t - sz);
        if (plane.empty()) continue;
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                size_t src = spec.plane_index(x, y);
                if (static_cast<VoxelClass>(cls[src]) != VoxelClass::Surface) continue;
                for (const DistanceMask::PlaneOffset& o : plane) {
                    int tx = x + o.dx, ty = y + o.dy;
                    if (tx < 0 || ty < 0 || tx >= nx || ty >= ny) continue;
                    size_t dst = spec.plane_index(tx, ty);
                    if (o.dist < d_out[dst]) {
                        d_out[dst] = o.dist;
                        for (int c = 0; c < channels; ++c)
                            ghat_out[dst * channels + c] = g[src * channels + c];
                        if (nearest_out) nearest_out[dst] = {x, y, sz};
                    }
                }
            }
    }
}

using DPlaneFn = std::function<const double*(int)>;  // slice -> distance plane

// Whole-grid transfer: distance and nearest-surface tonals for every slice.
// The streaming pipeline calls the per-slice gather directly; this driver is
// the convenient form for tools and tests that hold the full grid.
inline void sweep_transfer(const GridSpec& spec, const DistanceMask& mask, int channels,
                           const ClsPlaneFn& cls_of, const TonalPlaneFn& g_of,
                           const std::function<double*(int)>& d_out_of,
                           const std::function<double*(int)>& ghat_out_of,
                           const std::function<Vec3i*(int)>& nearest_out_of = nullptr) {
    for (int t = 0; t < spec.dims.z; ++t)
        sweep_gather_slice(spec, mask, t, channels, cls_of, g_of, d_out_of(t), ghat_out_of(t),
                           nearest_out_of ? nearest_out_of(t) : nullptr);
}

inline double mask_neighbor_min(const GridSpec& spec, int s, int x, int y,
                                const ClsPlaneFn& cls_of, const DPlaneFn& d_of,
                                bool* has_exterior);

// Isosurface-onion membership for slice s. Layer l keeps voxels at least
// l*tau deep that have a 26-window neighbor closer than l*tau (layer 0: an
// Exterior neighbor); the smallest passing l wins. Voxels shallower than
// d_max that pass no layer are between-layers; everything else gets no layer.
inline void extract_layers(const GridSpec& spec, int s, int layer_count, double tau,
                           double d_max, const ClsPlaneFn& cls_of, const DPlaneFn& d_of,
                           int8_t* layer_out) {
    int nx = spec.dims.x, ny = spec.dims.y;
    const uint8_t* cls = cls_of(s);
    const double* d = d_of(s);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            layer_out[i] = kNoLayer;
            if (!is_inside(static_cast<VoxelClass>(cls[i]))) continue;
            double dv = d[i];
            if (dv >= d_max) continue;
            bool has_exterior = false;
            double min_nb = mask_neighbor_min(spec, s, x, y, cls_of, d_of, &has_exterior);
            int8_t assigned = kBetweenLayers;
            for (int l = 0; l < layer_count; ++l) {
                double dl = l * tau;
                if (dl > dv) break;
                bool shell = l == 0 ? has_exterior : min_nb < dl;
                if (shell) {
                    assigned = static_cast<int8_t>(l);
                    break;
                }
            }
            layer_out[i] = assigned;
        }
}

inline double mask_neighbor_min(const GridSpec& spec, int s, int x, int y,
                                const ClsPlaneFn& cls_of, const DPlaneFn& d_of,
                                bool* has_exterior) {
    double min_nb = std::numeric_limits<double>::infinity();
    for (int dz = -1; dz <= 1; ++dz) {
        int sz = s + dz;
        if (sz < 0 || sz >= spec.dims.z) continue;
        const uint8_t* ncls = cls_of(sz);
        const double* nd = d_of(sz);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                int ux = x + dx, uy = y + dy;
                if (ux < 0 || uy < 0 || ux >= spec.dims.x || uy >= spec.dims.y) continue;
                size_t j = spec.plane_index(ux, uy);
                if (!is_inside(static_cast<VoxelClass>(ncls[j]))) *has_exterior = true;
                min_nb = std::min(min_nb, nd[j]);
            }
    }
    return min_nb;
}

// Outward normals from the signed truncated distance (negative inside the
// model), central differences scaled by pitch, one-sided against truncated or
// out-of-bounds samples. Degenerate zero gradients fall back to +z.
inline void compute_normals(const GridSpec& spec, int s, double d_null, const ClsPlaneFn& cls_of,
                            const DPlaneFn& d_of, const int8_t* layer, float* normal_out,
                            uint64_t* degenerate_count) {
    int nx = spec.dims.x, ny = spec.dims.y;
    auto signed_d = [&](int sx, int sy, int sz, double* out) {
        if (sx < 0 || sy < 0 || sz < 0 || sx >= nx || sy >= ny || sz >= spec.dims.z) return false;
        size_t i = spec.plane_index(sx, sy);
        double dv = d_of(sz)[i];
        if (dv >= d_null) return false;  // truncated: no reliable sample
        *out = is_inside(static_cast<VoxelClass>(cls_of(sz)[i])) ? -dv : dv;
        return true;
    };
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            normal_out[i * 3] = normal_out[i * 3 + 1] = normal_out[i * 3 + 2] = 0.0f;
            if (layer[i] < 0) continue;
            double center;
            if (!signed_d(x, y, s, &center)) continue;
            double grad[3] = {0, 0, 0};
            const int step[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
            const double pitch[3] = {spec.pitch.x, spec.pitch.y, spec.pitch.z};
            for (int a = 0; a < 3; ++a) {
                double lo = 0.0, hi = 0.0;
                bool has_lo = signed_d(x - step[a][0], y - step[a][1], s - step[a][2], &lo);
                bool has_hi = signed_d(x + step[a][0], y + step[a][1], s + step[a][2], &hi);
                if (has_lo && has_hi)
                    grad[a] = (hi - lo) / (2.0 * pitch[a]);
                else if (has_hi)
                    grad[a] = (hi - center) / pitch[a];
                else if (has_lo)
                    grad[a] = (center - lo) / pitch[a];
            }
            double len = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
            if (len == 0.0) {
                normal_out[i * 3 + 2] = 1.0f;
                if (degenerate_count) ++*degenerate_count;
            } else {
                normal_out[i * 3] = static_cast<float>(grad[0] / len);
                normal_out[i * 3 + 1] = static_cast<float>(grad[1] / len);
                normal_out[i * 3 + 2] = static_cast<float>(grad[2] / len);
            }
        }
}

inline void normals(const GridSpec& spec, int s, double d_null, const ClsPlaneFn& cls_of,
                    const DPlaneFn& d_of, const int8_t* layer, float* normal_out,
                    uint64_t* degenerate_count = nullptr) {
    compute_normals(spec, s, d_null, cls_of, d_of, layer, normal_out, degenerate_count);
}

// Exact in-slice L1 distance to the nearest non-interior voxel, with the
// slice border counting as empty. Two raster passes are exact for L1.
inline void distance_to_empty(const GridSpec& spec, const uint8_t* cls, int32_t* phi,
                              Vec2i* dphi) {
    int nx = spec.dims.x, ny = spec.dims.y;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            phi[i] = is_inside(static_cast<VoxelClass>(cls[i]))
                         ? std::min(std::min(x + 1, nx - x), std::min(y + 1, ny - y))
                         : 0;
        }
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            if (x > 0) phi[i] = std::min(phi[i], phi[i - 1] + 1);
            if (y > 0) phi[i] = std::min(phi[i], phi[i - nx] + 1);
        }
    for (int y = ny - 1; y >= 0; --y)
        for (int x = nx - 1; x >= 0; --x) {
            size_t i = spec.plane_index(x, y);
            if (x + 1 < nx) phi[i] = std::min(phi[i], phi[i + 1] + 1);
            if (y + 1 < ny) phi[i] = std::min(phi[i], phi[i + nx] + 1);
        }
    if (!dphi) return;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            int32_t gx = x == 0          ? phi[i + 1] - phi[i]
                         : x == nx - 1   ? phi[i] - phi[i - 1]
                                         : phi[i + 1] - phi[i - 1];
            int32_t gy = y == 0          ? phi[i + nx] - phi[i]
                         : y == ny - 1   ? phi[i] - phi[i - nx]
                                         : phi[i + nx] - phi[i - nx];
            dphi[i] = {gx, gy};
        }
}

}  // namespace voxhalf
