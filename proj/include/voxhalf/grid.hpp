#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <deque>
#include <memory>
#include <vector>

#include "voxhalf/error.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

using VoxelCoord = Vec3i;

// Surface voxels are interior voxels too; Exterior is everything outside the model.
enum class VoxelClass : uint8_t { Exterior = 0, Interior = 1, Surface = 2 };

inline bool is_inside(VoxelClass c) { return c != VoxelClass::Exterior; }

struct GridSpec {
    Vec3i dims;    // voxel counts per axis
    Vec3d pitch;   // physical voxel size per axis, millimeters
    Vec3d origin;  // low corner of voxel (0,0,0), millimeters

    // Voxel (x,y,z) spans [origin + coord*pitch, origin + (coord+1)*pitch).
    Vec3d voxel_center(VoxelCoord v) const {
        return {origin.x + (v.x + 0.5) * pitch.x,
                origin.y + (v.y + 0.5) * pitch.y,
                origin.z + (v.z + 0.5) * pitch.z};
    }

    bool in_bounds(VoxelCoord v) const {
        return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < dims.x && v.y < dims.y && v.z < dims.z;
    }

    size_t slice_voxels() const { return static_cast<size_t>(dims.x) * dims.y; }
    size_t plane_index(int x, int y) const { return static_cast<size_t>(y) * dims.x + x; }

    void validate() const {
        if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0)
            throw ConfigError("grid dims must be positive");
        if (pitch.x <= 0.0 || pitch.y <= 0.0 || pitch.z <= 0.0)
            throw ConfigError("grid pitch must be positive");
    }
};

struct NeighborList {
    std::array<VoxelCoord, 26> v;
    int n = 0;

    const VoxelCoord* begin() const { return v.data(); }
    const VoxelCoord* end() const { return v.data() + n; }
    void push(VoxelCoord c) { v[n++] = c; }
};

// In-bounds 26-window neighbors in ascending (dz, dy, dx) order.
inline NeighborList neighbors26(const GridSpec& spec, VoxelCoord v) {
    NeighborList out;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                VoxelCoord u{v.x + dx, v.y + dy, v.z + dz};
                if (spec.in_bounds(u)) out.push(u);
            }
    return out;
}

// Same-slice members of the 26-window satisfying pred(x, y), ascending (dy, dx).
template <typename Pred>
NeighborList in_slice_neighbors_if(const GridSpec& spec, VoxelCoord v, Pred&& pred) {
    NeighborList out;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            VoxelCoord u{v.x + dx, v.y + dy, v.z};
            if (spec.in_bounds(u) && pred(u.x, u.y)) out.push(u);
        }
    return out;
}

inline NeighborList in_slice_neighbors(const GridSpec& spec, VoxelCoord v,
                                       const uint8_t* class_plane) {
    return in_slice_neighbors_if(spec, v, [&](int x, int y) {
        return static_cast<VoxelClass>(class_plane[spec.plane_index(x, y)]) == VoxelClass::Surface;
    });
}

// Tracks live plane bytes so streaming bounds can be asserted and compared.
struct MemoryMeter {
    size_t current_bytes = 0;
    size_t peak_bytes = 0;
    int heavy_slices = 0;
    int peak_heavy_slices = 0;

    void add(size_t n) {
        current_bytes += n;
        if (current_bytes > peak_bytes) peak_bytes = current_bytes;
    }
    void sub(size_t n) { current_bytes -= n; }
    void heavy_enter() {
        ++heavy_slices;
        if (heavy_slices > peak_heavy_slices) peak_heavy_slices = heavy_slices;
    }
    void heavy_leave() { --heavy_slices; }
};

constexpr int8_t kNoLayer = -1;
constexpr int8_t kBetweenLayers = -2;

// Per-slice dense planes, allocated on demand and released per stage so the
// streaming window stays bounded. "Heavy" planes are the >= 4 byte/voxel ones.
class SlicePlanes {
public:
    SlicePlanes(size_t nxy, int channels, MemoryMeter* meter)
        : nxy_(nxy), channels_(channels), meter_(meter) {}
    ~SlicePlanes() {
        release_heavy();
        free_vec(cls);
        free_vec(layer);
        free_vec(visited);
        free_vec(material);
        free_vec(last_dir);
    }

    size_t nxy() const { return nxy_; }
    int channels() const { return channels_; }

    std::vector<uint8_t> cls;        // VoxelClass
    std::vector<double> g;           // surface tonal vectors, channels per voxel
    std::vector<double> d;           // truncated distance, d_null when beyond d_max
    std::vector<double> ghat;        // transferred tonal vectors
    std::vector<Vec3i> nearest;      // nearest surface voxel (optional, for tests/debug)
    std::vector<int8_t> layer;       // layer index, kNoLayer or kBetweenLayers otherwise
    std::vector<int32_t> phi;        // in-slice L1 distance to empty
    std::vector<Vec2i> dphi;         // finite differences of phi
    std::vector<float> normal;       // 3 per voxel
    std::vector<double> err;         // diffusion accumulators, channels per voxel
    std::vector<int32_t> err_count;  // upward arrivals, for start selection
    std::vector<int8_t> last_dir;    // (dx, dy, winding) of the last upward arrival
    std::vector<uint8_t> visited;
    std::vector<uint8_t> material;   // 0 exterior, 1..T channels, T+1 white
    std::vector<int32_t> order;      // traversal rank (debug dumps)

    void alloc_ingest() {
        alloc(cls, nxy_);
        alloc(g, nxy_ * channels_);
        mark_heavy();
    }
    void alloc_distance(bool keep_nearest) {
        alloc(d, nxy_);
        alloc(ghat, nxy_ * channels_);
        if (keep_nearest) alloc(nearest, nxy_);
        mark_heavy();
    }
    void alloc_derive() {
        alloc(layer, nxy_);
        alloc(phi, nxy_);
        alloc(dphi, nxy_);
        alloc(normal, nxy_ * 3);
        alloc(err, nxy_ * channels_);
        alloc(err_count, nxy_);
        alloc(last_dir, nxy_ * 3);
        mark_heavy();
    }
    void alloc_halftone(bool with_order) {
        alloc(visited, nxy_);
        alloc(material, nxy_);
        if (with_order) alloc(order, nxy_);
        mark_heavy();
    }

    void release_sources() { free_vec(g); }
    void release_halftoned() {
        free_vec(phi);
        free_vec(dphi);
        free_vec(normal);
        free_vec(err);
        free_vec(err_count);
        free_vec(last_dir);
        free_vec(visited);
    }
    void release_written() {
        free_vec(d);
        free_vec(ghat);
        free_vec(nearest);
        free_vec(order);
        release_sources();
        update_heavy();
    }
    void release_heavy() {
        release_halftoned();
        release_written();
    }

private:
    template <typename T>
    void alloc(std::vector<T>& v, size_t n) {
        if (!v.empty()) return;
        v.assign(n, T{});
        if (meter_) meter_->add(n * sizeof(T));
    }
    template <typename T>
    void free_vec(std::vector<T>& v) {
        if (v.empty()) return;
        if (meter_) meter_->sub(v.size() * sizeof(T));
        std::vector<T>().swap(v);
    }
    bool any_heavy() const {
        return !g.empty() || !d.empty() || !ghat.empty() || !nearest.empty() || !phi.empty() ||
               !dphi.empty() || !normal.empty() || !err.empty() || !err_count.empty() ||
               !order.empty();
    }
    void mark_heavy() {
        if (!heavy_ && any_heavy()) {
            heavy_ = true;
            if (meter_) meter_->heavy_enter();
        }
    }
    void update_heavy() {
        if (heavy_ && !any_heavy()) {
            heavy_ = false;
            if (meter_) meter_->heavy_leave();
        }
    }

    size_t nxy_;
    int channels_;
    MemoryMeter* meter_;
    bool heavy_ = false;
};

// Sliding window of slices [first_slice, first_slice + slice_count). The halo
// is how far classification must lead distance finalization for exactness.
class SliceChunk {
public:
    SliceChunk(const GridSpec& spec, int channels, int halo_slices, MemoryMeter* meter)
        : spec_(spec), channels_(channels), halo_slices_(halo_slices), meter_(meter) {}

    int first_slice() const { return first_; }
    int slice_count() const { return static_cast<int>(window_.size()); }
    int end_slice() const { return first_ + slice_count(); }
    int halo_slices() const { return halo_slices_; }
    int channels() const { return channels_; }

    bool contains(int s) const { return s >= first_ && s < end_slice(); }

    SlicePlanes& at(int s) { return *window_[s - first_]; }
    const SlicePlanes& at(int s) const { return *window_[s - first_]; }

    // Grow the window upward to include slice s.
    SlicePlanes& acquire(int s) {
        if (window_.empty()) first_ = s;
        while (end_slice() <= s)
            window_.push_back(std::make_unique<SlicePlanes>(spec_.slice_voxels(), channels_, meter_));
        return at(s);
    }

    // Drop every slice below s.
    void drop_below(int s) {
        while (!window_.empty() && first_ < s) {
            window_.pop_front();
            ++first_;
        }
    }

private:
    GridSpec spec_;
    int channels_;
    int halo_slices_;
    MemoryMeter* meter_;
    int first_ = 0;
    std::deque<std::unique_ptr<SlicePlanes>> window_;
};

}  // namespace voxhalf
