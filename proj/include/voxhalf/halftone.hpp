#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "voxhalf/colorsep.hpp"
#include "voxhalf/field.hpp"
#include "voxhalf/filter.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/rng.hpp"
#include "voxhalf/traverse.hpp"

namespace voxhalf {

// Stateless per-voxel threshold: 0.5 plus tone-dependent modulation from a
// counter-based generator keyed on (seed, slice, layer, channel, x, y), so
// every parallel schedule reproduces the same value and layers/channels are
// decorrelated by construction. sigma(tone) == 0 returns exactly 0.5.
inline double modulated_threshold(double tone, int slice, int layer, int channel, VoxelCoord v,
                                  uint64_t seed, const SigmaTable& sigma) {
    double sg = sigma.sigma(tone);
    if (sg == 0.0) return 0.5;
    double r = keyed_unit(seed, {static_cast<uint64_t>(slice), static_cast<uint64_t>(layer),
                                 static_cast<uint64_t>(channel), static_cast<uint64_t>(v.x),
                                 static_cast<uint64_t>(v.y)});
    return 0.5 + sg * (r - 0.5);
}

struct TieBreaker {
    std::array<int32_t, kMaxTonalChannels> c{};
};

// Winner-take-all material pick. Among channels quantized to 1 the largest
// tie-breaker counter wins (lowest index on ties); the winner's counter
// resets and every other channel's increments. All-zero vectors return -1
// (white), leaving the counters untouched.
inline int assign_material(const uint8_t* h, int channels, TieBreaker& tie) {
    int winner = -1;
    for (int t = 0; t < channels; ++t) {
        if (!h[t]) continue;
        if (winner < 0 || tie.c[t] > tie.c[winner]) winner = t;
    }
    if (winner < 0) return -1;
    for (int t = 0; t < channels; ++t) tie.c[t] += 1;
    tie.c[winner] = 0;
    return winner;
}

struct StepLog {
    VoxelCoord v;
    int channel;
    double g_tilde;
    double threshold;
    uint8_t h;
};

struct HalftoneCounters {
    uint64_t visited = 0;
    uint64_t runs = 0;
    uint64_t births = 0;
    uint64_t deaths = 0;
    uint64_t reversals = 0;
    uint64_t drop_events = 0;     // nonzero residual discarded (no mapping)
    double dropped_weight = 0.0;  // raw unmatched filter weight, summed
    uint64_t up_pushes = 0;       // next-slice receivers, distinct per step
    uint64_t set_channels = 0;    // channels quantized to 1
    uint64_t lost_channels = 0;   // set channels that lost the material pick
    uint64_t white_voxels = 0;
    double max_abs_err = 0.0;
    uint64_t violations = 0;      // instrumented invariant breaches

    void merge(const HalftoneCounters& o) {
        visited += o.visited;
        runs += o.runs;
        births += o.births;
        deaths += o.deaths;
        reversals += o.reversals;
        drop_events += o.drop_events;
        dropped_weight += o.dropped_weight;
        up_pushes += o.up_pushes;
        set_channels += o.set_channels;
        lost_channels += o.lost_channels;
        white_voxels += o.white_voxels;
        max_abs_err = std::max(max_abs_err, o.max_abs_err);
        violations += o.violations;
    }
};

// Plane pointers one (layer, slice) traversal reads and writes. The border
// between slices: error lands in this slice's err or the next slice's
// err_up/err_count_up/last_dir_up, never below.
struct LayerSlicePlanes {
    const double* ghat = nullptr;      // channels per voxel, raw transferred tones
    const int8_t* layer = nullptr;
    const int32_t* phi = nullptr;
    const Vec2i* dphi = nullptr;
    const float* normal = nullptr;     // 3 per voxel
    double* err = nullptr;             // channels per voxel
    const int32_t* err_count = nullptr;
    const int8_t* last_dir = nullptr;  // 3 per voxel
    uint8_t* visited = nullptr;
    int32_t* order = nullptr;          // optional visit ranks
    uint8_t* material = nullptr;
    // next slice, same layer; all null on the top slice
    const int8_t* layer_up = nullptr;
    double* err_up = nullptr;
    int32_t* err_count_up = nullptr;
    int8_t* last_dir_up = nullptr;
};

// Runs one layer's traversal + error diffusion over one slice. Strictly
// sequential inside; distinct layers touch disjoint voxels, so instances for
// different layers of the same slice can run concurrently.
class LayerSliceHalftoner {
public:
    LayerSliceHalftoner(const GridSpec& spec, int channels, int slice, int layer_id,
                        uint64_t seed, const ToneFilterBank& bank, const SigmaTable& sigma,
                        const TonalPolicy& policy, const LayerSlicePlanes& planes,
                        bool instrumented = false, std::vector<StepLog>* log = nullptr)
        : spec_(spec),
          channels_(channels),
          slice_(slice),
          layer_id_(static_cast<int8_t>(layer_id)),
          seed_(seed),
          bank_(bank),
          sigma_(sigma),
          policy_(policy),
          p_(planes),
          instrumented_(instrumented),
          log_(log) {}

    void run() {
        StartChoice choice;
        while (select_start(spec_, slice_, layer_id_, p_.layer, p_.visited, p_.err_count,
                            p_.phi, p_.dphi, p_.normal, p_.last_dir, p_.layer_up, &choice)) {
            ++counters_.runs;
            if (choice.birth || choice.death) {
                if (choice.birth) ++counters_.births;
                if (choice.death) ++counters_.deaths;
                run_serpentine(choice.v);
            } else {
                run_spiral(choice);
            }
        }
    }

    const HalftoneCounters& counters() const { return counters_; }

private:
    void run_spiral(const StartChoice& start) {
        VoxelCoord cur = start.v;
        Winding w = start.winding;
        Vec2i prev = start.prev_dir;
        for (;;) {
            size_t i = spec_.plane_index(cur.x, cur.y);
            VoxelCoord cand[8];
            int n = candidate_filter(spec_, cur, layer_id_, p_.layer, p_.visited, p_.dphi[i],
                                     w, cand);
            bool down = p_.normal[i * 3 + 2] < 0.0f;
            VoxelCoord nxt;
            bool has_next = next_voxel(spec_, cur, cand, n, p_.phi, down, prev, &nxt);
            if (!has_next) {
                w = reversed(w);
                ++counters_.reversals;
                n = candidate_filter(spec_, cur, layer_id_, p_.layer, p_.visited, p_.dphi[i],
                                     w, cand);
                has_next = next_voxel(spec_, cur, cand, n, p_.phi, down, prev, &nxt);
            }
            Vec3d move = has_next
                             ? Vec3d{(nxt.x - cur.x) * spec_.pitch.x,
                                     (nxt.y - cur.y) * spec_.pitch.y, 0.0}
                             : Vec3d{prev.x * spec_.pitch.x, prev.y * spec_.pitch.y, 0.0};
            Vec3d nrm{p_.normal[i * 3], p_.normal[i * 3 + 1], p_.normal[i * 3 + 2]};
            process_voxel(cur, spiral_frame(nrm, move, w), w);
            if (!has_next) break;
            prev = {nxt.x - cur.x, nxt.y - cur.y};
            cur = nxt;
        }
    }

    void run_serpentine(VoxelCoord seed) {
        std::vector<VoxelCoord> comp = flood_component(spec_, seed, layer_id_, p_.layer,
                                                       p_.visited);
        serpentine_order(comp);
        int y_min = comp.front().y;
        for (const VoxelCoord& v : comp) {
            int parity = (v.y - y_min) % 2;
            process_voxel(v, serpentine_frame(parity),
                          parity == 0 ? Winding::CCW : Winding::CW);
        }
    }

    void process_voxel(VoxelCoord v, const TangentFrame& frame, Winding winding) {
        size_t i = spec_.plane_index(v.x, v.y);
        if (instrumented_ && p_.visited[i]) ++counters_.violations;
        p_.visited[i] = 1;
        ++counters_.visited;
        if (p_.order) p_.order[i] = static_cast<int32_t>(counters_.visited);

        neighbors_.clear();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                int ux = v.x + dx, uy = v.y + dy;
                if (ux < 0 || uy < 0 || ux >= spec_.dims.x || uy >= spec_.dims.y) continue;
                size_t j = spec_.plane_index(ux, uy);
                if (p_.layer[j] == layer_id_ && !p_.visited[j])
                    neighbors_.push_back({{ux, uy, v.z}, false});
            }
        if (p_.layer_up)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int ux = v.x + dx, uy = v.y + dy;
                    if (ux < 0 || uy < 0 || ux >= spec_.dims.x || uy >= spec_.dims.y) continue;
                    if (p_.layer_up[spec_.plane_index(ux, uy)] == layer_id_)
                        neighbors_.push_back({{ux, uy, v.z + 1}, true});
                }

        TonalVec g_raw;
        g_raw.n = channels_;
        for (int c = 0; c < channels_; ++c) g_raw[c] = p_.ghat[i * channels_ + c];
        TonalVec g_pol = apply_policy(policy_, g_raw, layer_id_);

        std::array<uint8_t, kMaxTonalChannels> h{};
        up_targets_.clear();
        for (int c = 0; c < channels_; ++c) {
            const Filter2D& filt = bank_.for_tone(g_pol[c]);
            double matched = map_filter(frame, spec_.pitch, v, filt, neighbors_, &mapped_);
            double t = modulated_threshold(g_pol[c], slice_, layer_id_, c, v, seed_, sigma_);
            double gt = g_pol[c] + p_.err[i * channels_ + c];
            uint8_t hc = gt > t ? 1 : 0;
            h[c] = hc;
            if (log_) log_->push_back({v, c, gt, t, hc});
            double residual = hc - gt;
            counters_.dropped_weight += std::max(0.0, 1.0 - matched);
            if (mapped_.empty()) {
                if (residual != 0.0) ++counters_.drop_events;
                continue;
            }
            for (const MappedTarget& tgt : mapped_) {
                size_t j = spec_.plane_index(tgt.u.x, tgt.u.y);
                double* a = tgt.next_slice ? p_.err_up : p_.err;
                if (instrumented_ && !tgt.next_slice && p_.visited[j]) ++counters_.violations;
                a[j * channels_ + c] -= tgt.weight * residual;
                double mag = std::abs(a[j * channels_ + c]);
                if (mag > counters_.max_abs_err) counters_.max_abs_err = mag;
                if (tgt.next_slice) {
                    bool known = false;
                    for (const VoxelCoord& u : up_targets_)
                        if (u == tgt.u) {
                            known = true;
                            break;
                        }
                    if (!known) up_targets_.push_back(tgt.u);
                }
            }
        }

        for (const VoxelCoord& u : up_targets_) {
            size_t j = spec_.plane_index(u.x, u.y);
            p_.err_count_up[j] += 1;
            p_.last_dir_up[j * 3] = static_cast<int8_t>(u.x - v.x);
            p_.last_dir_up[j * 3 + 1] = static_cast<int8_t>(u.y - v.y);
            p_.last_dir_up[j * 3 + 2] = static_cast<int8_t>(winding);
            ++counters_.up_pushes;
        }

        int nset = 0;
        for (int c = 0; c < channels_; ++c) nset += h[c];
        counters_.set_channels += nset;
        int winner = assign_material(h.data(), channels_, tie_);
        if (winner < 0) {
            p_.material[i] = static_cast<uint8_t>(channels_ + 1);
            ++counters_.white_voxels;
        } else {
            p_.material[i] = static_cast<uint8_t>(1 + winner);
            counters_.lost_channels += nset - 1;
        }
    }

    GridSpec spec_;
    int channels_;
    int slice_;
    int8_t layer_id_;
    uint64_t seed_;
    // the bank and sigma table are shared, immutable, and potentially large;
    // the policy is small and copied so callers may pass a temporary
    const ToneFilterBank& bank_;
    const SigmaTable& sigma_;
    TonalPolicy policy_;
    LayerSlicePlanes p_;
    bool instrumented_;
    std::vector<StepLog>* log_;
    TieBreaker tie_;  // fresh per (layer, slice) by construction
    HalftoneCounters counters_;
    std::vector<NeighborRef> neighbors_;
    std::vector<MappedTarget> mapped_;
    std::vector<VoxelCoord> up_targets_;
};

// Copies the material of the physically nearest layer voxel into each
// between-layers voxel (mask-ordered: distance, then scan order). Interior
// voxels with no layer (d >= d_max) get white; exterior voxels keep 0.
// A between-layers voxel with no layer voxel inside the mask ball also gets
// white and bumps the counter (never observed on real shapes).
inline void fill_between_layers(const GridSpec& spec, const DistanceMask& mask, int s,
                                const std::function<const int8_t*(int)>& layer_of,
                                const std::function<const uint8_t*(int)>& material_of,
                                const uint8_t* cls_s, const int8_t* layer_s,
                                uint8_t* material_s, int channels, uint64_t* unfilled) {
    uint8_t white = static_cast<uint8_t>(channels + 1);
    int nx = spec.dims.x, ny = spec.dims.y, nz = spec.dims.z;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            size_t i = spec.plane_index(x, y);
            if (!is_inside(static_cast<VoxelClass>(cls_s[i]))) continue;
            if (layer_s[i] >= 0) continue;
            if (layer_s[i] == kNoLayer) {
                material_s[i] = white;
                continue;
            }
            bool found = false;
            for (const MaskOffset& o : mask.offsets) {
                int ux = x + o.d.x, uy = y + o.d.y, uz = s + o.d.z;
                if (ux < 0 || uy < 0 || uz < 0 || ux >= nx || uy >= ny || uz >= nz) continue;
                size_t j = spec.plane_index(ux, uy);
                if (layer_of(uz)[j] >= 0) {
                    material_s[i] = material_of(uz)[j];
                    found = true;
                    break;
                }
            }
            if (!found) {
                material_s[i] = white;
                if (unfilled) ++*unfilled;
            }
        }
}

}  // namespace voxhalf
