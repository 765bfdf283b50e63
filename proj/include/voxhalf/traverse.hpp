#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "voxhalf/filter.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

enum class Winding : int8_t { CCW = 0, CW = 1 };

inline Winding reversed(Winding w) { return w == Winding::CCW ? Winding::CW : Winding::CCW; }

// last_in_direction plane encoding (3 int8 per voxel): arrival dx, dy, and the
// sender's winding (kLastNone until error first arrives).
constexpr int8_t kLastNone = -1;

// In-slice same-layer unvisited neighbors of v that continue around the
// component in the given winding: sign of the z-component of
// (u - v) x grad(phi), in voxel units. A zero gradient (ridge of the L1
// transform) admits every unvisited neighbor. Returns count, out holds <= 8.
inline int candidate_filter(const GridSpec& spec, VoxelCoord v, int8_t layer_id,
                            const int8_t* layer, const uint8_t* visited, Vec2i grad,
                            Winding winding, VoxelCoord* out) {
    int count = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int ux = v.x + dx, uy = v.y + dy;
            if (ux < 0 || uy < 0 || ux >= spec.dims.x || uy >= spec.dims.y) continue;
            size_t i = spec.plane_index(ux, uy);
            if (layer[i] != layer_id || visited[i]) continue;
            int cross_z = dx * grad.y - dy * grad.x;
            bool keep = (grad.x == 0 && grad.y == 0) ||
                        (winding == Winding::CCW ? cross_z >= 0 : cross_z <= 0);
            if (keep) out[count++] = {ux, uy, v.z};
        }
    return count;
}

namespace detail {

// Compares candidate turn angles from prev_dir exactly: smaller angle first.
// cos(theta) = dot / |d|; compare dot_a/|da| vs dot_b/|db| via squared
// integer arithmetic with explicit sign handling.
inline int turn_compare(Vec2i prev, Vec2i da, Vec2i db) {
    long dot_a = static_cast<long>(prev.x) * da.x + static_cast<long>(prev.y) * da.y;
    long dot_b = static_cast<long>(prev.x) * db.x + static_cast<long>(prev.y) * db.y;
    int sa = dot_a > 0 ? 1 : dot_a < 0 ? -1 : 0;
    int sb = dot_b > 0 ? 1 : dot_b < 0 ? -1 : 0;
    if (sa != sb) return sa > sb ? -1 : 1;  // larger cosine sign wins
    if (sa == 0) return 0;
    long na = static_cast<long>(da.x) * da.x + static_cast<long>(da.y) * da.y;
    long nb = static_cast<long>(db.x) * db.x + static_cast<long>(db.y) * db.y;
    long lhs = dot_a * dot_a * nb, rhs = dot_b * dot_b * na;  // cos^2 * sign
    if (lhs == rhs) return 0;
    bool a_better = sa > 0 ? lhs > rhs : lhs < rhs;
    return a_better ? -1 : 1;
}

}  // namespace detail

// Picks the next voxel among the winding candidates: argmax phi when the
// surface faces down, argmin otherwise; ties by smallest turning angle from
// the previous move, then scan order. prev_dir = (0,0) skips the angle rule.
inline bool next_voxel(const GridSpec& spec, VoxelCoord v, const VoxelCoord* cand, int n,
                       const int32_t* phi, bool down_facing, Vec2i prev_dir, VoxelCoord* out) {
    if (n == 0) return false;
    int best = 0;
    for (int i = 1; i < n; ++i) {
        int32_t pb = phi[spec.plane_index(cand[best].x, cand[best].y)];
        int32_t pi = phi[spec.plane_index(cand[i].x, cand[i].y)];
        if (pi != pb) {
            if (down_facing ? pi > pb : pi < pb) best = i;
            continue;
        }
        if (prev_dir.x != 0 || prev_dir.y != 0) {
            Vec2i db{cand[best].x - v.x, cand[best].y - v.y};
            Vec2i di{cand[i].x - v.x, cand[i].y - v.y};
            int cmp = detail::turn_compare(prev_dir, di, db);
            if (cmp < 0) best = i;
            if (cmp != 0) continue;
        }
        // candidates enumerate in scan order, so the earlier index stays
    }
    *out = cand[best];
    return true;
}

struct StartChoice {
    VoxelCoord v{};
    Winding winding = Winding::CCW;
    Vec2i prev_dir{0, 0};  // negated arrival direction of the last error push
    bool birth = false;
    bool death = false;
};

// Start-point selection for one (layer, slice): max error-diffusion count
// first, then distance-to-empty (argmax among down-facing voxels when any
// exist, else argmin), scan order on ties. Winding starts opposite the
// winding that last pushed error here and is reversed if it dead-ends.
// Birth: every unvisited voxel still has count 0. Death: no unvisited voxel
// has a same-layer neighbor in slice s+1.
inline bool select_start(const GridSpec& spec, int s, int8_t layer_id, const int8_t* layer,
                         const uint8_t* visited, const int32_t* err_count, const int32_t* phi,
                         const Vec2i* dphi, const float* normal, const int8_t* last_dir,
                         const int8_t* layer_up, StartChoice* out) {
    int nx = spec.dims.x, ny = spec.dims.y;
    int32_t max_count = -1;
    bool any_up_neighbor = false;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            if (layer[i] != layer_id || visited[i]) continue;
            max_count = std::max(max_count, err_count[i]);
            if (layer_up && !any_up_neighbor)
                for (int dy = -1; dy <= 1 && !any_up_neighbor; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ux = x + dx, uy = y + dy;
                        if (ux < 0 || uy < 0 || ux >= nx || uy >= ny) continue;
                        if (layer_up[spec.plane_index(ux, uy)] == layer_id) {
                            any_up_neighbor = true;
                            break;
                        }
                    }
        }
    if (max_count < 0) return false;
    bool found_down = false;
    size_t best = 0;
    bool have_best = false;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            if (layer[i] != layer_id || visited[i] || err_count[i] != max_count) continue;
            bool down = normal[i * 3 + 2] < 0.0f;
            if (!have_best) {
                best = i;
                found_down = down;
                have_best = true;
                continue;
            }
            if (down != found_down) {
                if (down) {  // down-facing candidates take precedence
                    best = i;
                    found_down = true;
                }
                continue;
            }
            if (down ? phi[i] > phi[best] : phi[i] < phi[best]) best = i;
        }
    VoxelCoord v{static_cast<int>(best % nx), static_cast<int>(best / nx), s};
    StartChoice choice;
    choice.v = v;
    choice.birth = max_count == 0;
    choice.death = !any_up_neighbor;
    int8_t wind_byte = last_dir[best * 3 + 2];
    if (wind_byte == kLastNone) {
        choice.winding = Winding::CCW;
    } else {
        choice.winding = reversed(static_cast<Winding>(wind_byte));
        choice.prev_dir = {-last_dir[best * 3], -last_dir[best * 3 + 1]};
    }
    VoxelCoord cand[8];
    if (candidate_filter(spec, v, layer_id, layer, visited, dphi[best], choice.winding, cand) ==
        0)
        choice.winding = reversed(choice.winding);
    *out = choice;
    return true;
}

// 8-connected same-layer unvisited component containing seed.
inline std::vector<VoxelCoord> flood_component(const GridSpec& spec, VoxelCoord seed,
                                               int8_t layer_id, const int8_t* layer,
                                               const uint8_t* visited) {
    std::vector<VoxelCoord> comp;
    std::vector<uint8_t> seen(spec.slice_voxels(), 0);
    std::vector<VoxelCoord> stack{seed};
    seen[spec.plane_index(seed.x, seed.y)] = 1;
    while (!stack.empty()) {
        VoxelCoord v = stack.back();
        stack.pop_back();
        comp.push_back(v);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                int ux = v.x + dx, uy = v.y + dy;
                if (ux < 0 || uy < 0 || ux >= spec.dims.x || uy >= spec.dims.y) continue;
                size_t i = spec.plane_index(ux, uy);
                if (seen[i] || layer[i] != layer_id || visited[i]) continue;
                seen[i] = 1;
                stack.push_back({ux, uy, v.z});
            }
    }
    return comp;
}

// Row-serpentine order along x: rows ascend in y, the component's first row
// runs in ascending x, and direction alternates with row parity.
inline void serpentine_order(std::vector<VoxelCoord>& voxels) {
    if (voxels.empty()) return;
    int y_min = voxels[0].y;
    for (const VoxelCoord& v : voxels) y_min = std::min(y_min, v.y);
    std::sort(voxels.begin(), voxels.end(), [y_min](const VoxelCoord& a, const VoxelCoord& b) {
        if (a.y != b.y) return a.y < b.y;
        return (a.y - y_min) % 2 == 0 ? a.x < b.x : a.x > b.x;
    });
}

inline int serpentine_row_parity(const std::vector<VoxelCoord>& ordered, size_t index) {
    int y_min = ordered.front().y;
    return (ordered[index].y - y_min) % 2;
}

inline std::vector<VoxelCoord> serpentine_scan(std::vector<VoxelCoord> voxels) {
    serpentine_order(voxels);
    return voxels;
}

struct TangentFrame {
    Vec3d n{0, 0, 1};
    Vec3d f{1, 0, 0};
    Vec3d r{0, 1, 0};
};

// Frame for free traversal: f is the physical move direction projected onto
// the tangent plane of n; r = n x f for CCW and f x n for CW. Falls back to
// projected +x then +y when the move direction is degenerate or normal.
inline TangentFrame spiral_frame(Vec3d n, Vec3d move_phys, Winding winding) {
    TangentFrame frame;
    frame.n = n;
    const Vec3d tries[3] = {move_phys, {1, 0, 0}, {0, 1, 0}};
    Vec3d f{0, 0, 0};
    for (const Vec3d& t : tries) {
        Vec3d proj = t - n * dot(t, n);
        double len = length(proj);
        if (len > 1e-12) {
            f = proj / len;
            break;
        }
    }
    if (f.x == 0 && f.y == 0 && f.z == 0) f = {1, 0, 0};
    frame.f = f;
    frame.r = winding == Winding::CCW ? cross(n, f) : cross(f, n);
    return frame;
}

// Frame for serpentine mode: forward follows the row direction, lateral
// always points at the next row (+y).
inline TangentFrame serpentine_frame(int row_parity) {
    TangentFrame frame;
    frame.f = {row_parity == 0 ? 1.0 : -1.0, 0.0, 0.0};
    frame.r = {0, 1, 0};
    frame.n = cross(frame.f, frame.r);
    return frame;
}

struct NeighborRef {
    VoxelCoord u;
    bool next_slice;
};

struct MappedTarget {
    VoxelCoord u;
    double weight;       // renormalized, sums to 1 over the list
    bool next_slice;
};

// Projects the eligible neighbors into the (f, r) tangent coordinates (in
// units of the finer in-slice pitch) and matches them to filter elements by
// symmetric closest points within 1.5 units. Matched weights are
// renormalized to sum to 1; out is ordered by filter element. Returns the
// raw matched weight (so callers can count dropped weight).
inline double map_filter(const TangentFrame& frame, Vec3d pitch, VoxelCoord v,
                         const Filter2D& filter, const std::vector<NeighborRef>& neighbors,
                         std::vector<MappedTarget>* out) {
    out->clear();
    if (neighbors.empty() || filter.elements.empty()) return 0.0;
    double unit = std::min(pitch.x, pitch.y);
    size_t nn = neighbors.size(), ne = filter.elements.size();
    std::vector<double> pf(nn), pr(nn);
    for (size_t j = 0; j < nn; ++j) {
        Vec3d d{(neighbors[j].u.x - v.x) * pitch.x, (neighbors[j].u.y - v.y) * pitch.y,
                (neighbors[j].u.z - v.z) * pitch.z};
        pf[j] = dot(d, frame.f) / unit;
        pr[j] = dot(d, frame.r) / unit;
    }
    auto dist2 = [&](size_t e, size_t j) {
        double df = filter.elements[e].df - pf[j];
        double dr = filter.elements[e].dr - pr[j];
        return df * df + dr * dr;
    };
    // nearest neighbor of each element: ties prefer in-slice, then lower index
    std::vector<size_t> elem_nn(ne);
    for (size_t e = 0; e < ne; ++e) {
        size_t best = 0;
        for (size_t j = 1; j < nn; ++j) {
            double a = dist2(e, j), b = dist2(e, best);
            if (a < b ||
                (a == b && !neighbors[j].next_slice && neighbors[best].next_slice))
                best = j;
        }
        elem_nn[e] = best;
    }
    // nearest element of each neighbor: ties prefer lower element index
    std::vector<size_t> nb_ne(nn);
    for (size_t j = 0; j < nn; ++j) {
        size_t best = 0;
        for (size_t e = 1; e < ne; ++e)
            if (dist2(e, j) < dist2(best, j)) best = e;
        nb_ne[j] = best;
    }
    double matched = 0.0;
    for (size_t e = 0; e < ne; ++e) {
        size_t j = elem_nn[e];
        if (nb_ne[j] != e) continue;
        if (dist2(e, j) > 1.5 * 1.5) continue;
        out->push_back({neighbors[j].u, filter.elements[e].weight, neighbors[j].next_slice});
        matched += filter.elements[e].weight;
    }
    if (matched > 0.0)
        for (MappedTarget& t : *out) t.weight /= matched;
    else
        out->clear();
    return matched;
}

}  // namespace voxhalf
