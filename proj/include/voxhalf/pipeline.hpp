#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "voxhalf/colorsep.hpp"
#include "voxhalf/error.hpp"
#include "voxhalf/field.hpp"
#include "voxhalf/filter.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/halftone.hpp"
#include "voxhalf/image_io.hpp"
#include "voxhalf/mesh.hpp"
#include "voxhalf/texture.hpp"
#include "voxhalf/traverse.hpp"
#include "voxhalf/voxelize.hpp"

namespace voxhalf {

struct JobConfig {
    std::string mesh_path;
    std::string texture_path;  // empty: vertex colors if present, else constant
    bool force_constant = false;
    Vec3d constant_color{0.5, 0.5, 0.5};  // sRGB

    bool has_grid = false;  // explicit grid overrides dpi + auto bounding box
    GridSpec grid{};
    Vec3d dpi{600.0, 600.0, 900.0};

    int layer_count = 12;
    int chunk_slices = 100;
    std::string filter_name = "fs";  // fs | ostromoukhov | zhoufang
    std::string filter_table_path;   // overrides the named bank when set
    std::string sigma_table_path;    // overrides the named modulation table
    uint64_t seed = 0;
    TonalPolicy policy{};
    std::string lut_path;  // empty: naive separation
    std::string out_dir = "out";
    bool metrics = true;
    bool debug_dumps = false;
    bool keep_nearest = false;
    bool instrumented = false;
    int threads = 1;  // < 1 means hardware concurrency
};

struct FilterChoice {
    ToneFilterBank bank;
    SigmaTable sigma;
};

inline FilterChoice resolve_filter(const JobConfig& cfg) {
    FilterChoice f;
    if (cfg.filter_name == "fs") {
        f.bank = ToneFilterBank::floyd_steinberg();
        f.sigma = SigmaTable::zero();
    } else if (cfg.filter_name == "ostromoukhov") {
        f.bank = ToneFilterBank::tone_adaptive3();
        f.sigma = SigmaTable::zero();
    } else if (cfg.filter_name == "zhoufang") {
        f.bank = ToneFilterBank::tone_adaptive3();
        f.sigma = SigmaTable::tent();
    } else {
        throw ConfigError("unknown filter \"" + cfg.filter_name +
                          "\" (expected fs, ostromoukhov, or zhoufang)");
    }
    if (!cfg.filter_table_path.empty()) f.bank = ToneFilterBank::from_file(cfg.filter_table_path);
    if (!cfg.sigma_table_path.empty()) f.sigma = SigmaTable::from_file(cfg.sigma_table_path);
    f.bank.validate();
    return f;
}

// Material codes: 0 exterior (black), 1..T tonal channels, T+1 white.
inline Palette material_palette(int channels) {
    static const std::array<std::array<uint8_t, 3>, kMaxTonalChannels> chan_colors{{
        {0, 255, 255}, {255, 0, 255}, {255, 255, 0}, {64, 64, 64},
        {255, 128, 0}, {0, 160, 0}, {128, 0, 255}, {0, 0, 255}}};
    Palette p;
    p.push_back({0, 0, 0});
    for (int c = 0; c < channels; ++c) p.push_back(chan_colors[c]);
    p.push_back({255, 255, 255});
    return p;
}

inline std::string channel_name(int c, int channels) {
    if (c == channels) return "W";
    if (c < 3) return std::string(1, "CMY"[c]);
    return "ch" + std::to_string(c);
}

struct SliceMetrics {
    int slice = 0;
    double z_mm = 0.0;
    uint64_t qualifying = 0;  // interior voxels with d < d_max
    std::array<double, kMaxTonalChannels + 1> actual{};    // [channels] = white
    std::array<double, kMaxTonalChannels + 1> expected{};
};

struct ToneReport {
    int channels = 3;
    std::vector<SliceMetrics> rows;
    std::array<double, kMaxTonalChannels + 1> rmse{};
    uint64_t clamped = 0;
    uint64_t degenerate_normals = 0;
    uint64_t unfilled = 0;
    uint64_t layer_voxels = 0;
    HalftoneCounters halftone;
    MemoryMeter memory;
    int halo = 0;
    uint64_t slices_written = 0;
    std::array<uint64_t, kMaxTonalChannels + 2> material_totals{};
    bool empty_intersection = false;

    double disagreement_rate() const {
        return halftone.set_channels
                   ? static_cast<double>(halftone.lost_channels) / halftone.set_channels
                   : 0.0;
    }

    void finalize() {
        for (int k = 0; k <= channels; ++k) {
            double acc = 0.0;
            int n = 0;
            for (const SliceMetrics& m : rows) {
                if (!m.qualifying) continue;
                double e = m.actual[k] - m.expected[k];
                acc += e * e;
                ++n;
            }
            rmse[k] = n ? std::sqrt(acc / n) : 0.0;
        }
    }
};

// Actual material fractions over qualifying voxels vs the overlap-model
// expectation at the slice's mean transferred tone.
inline SliceMetrics slice_tone_metrics(const GridSpec& spec, int s, int channels, double d_max,
                                       const uint8_t* cls, const double* d, const double* ghat,
                                       const uint8_t* material) {
    SliceMetrics m;
    m.slice = s;
    m.z_mm = spec.origin.z + (s + 0.5) * spec.pitch.z;
    std::array<uint64_t, kMaxTonalChannels + 2> counts{};
    TonalVec mean;
    mean.n = channels;
    size_t nxy = spec.slice_voxels();
    for (size_t i = 0; i < nxy; ++i) {
        if (!is_inside(static_cast<VoxelClass>(cls[i]))) continue;
        if (d[i] >= d_max) continue;
        ++m.qualifying;
        ++counts[material[i]];
        for (int c = 0; c < channels; ++c) mean[c] += ghat[i * channels + c];
    }
    if (!m.qualifying) return m;
    for (int c = 0; c < channels; ++c) mean[c] /= static_cast<double>(m.qualifying);
    auto frac = demichel_fractions(mean);
    for (int c = 0; c < channels; ++c) {
        m.actual[c] = counts[1 + c] / static_cast<double>(m.qualifying);
        m.expected[c] = frac[c];
    }
    m.actual[channels] = counts[channels + 1] / static_cast<double>(m.qualifying);
    m.expected[channels] = frac[channels];
    return m;
}

// Writes one indexed slice image and appends its histogram to the manifest.
inline std::array<uint64_t, kMaxTonalChannels + 2> write_slice(
    const std::string& dir, int slice, double z_mm, int channels, const uint8_t* material,
    int nx, int ny, const Palette& palette, std::FILE* manifest) {
    char name[64];
    std::snprintf(name, sizeof name, "slice_%06d.png", slice);
    size_t nxy = static_cast<size_t>(nx) * ny;
    std::vector<uint8_t> idx(material, material + nxy);
    write_indexed_png(dir + "/" + name, nx, ny, idx, palette);
    std::array<uint64_t, kMaxTonalChannels + 2> counts{};
    for (size_t i = 0; i < nxy; ++i) ++counts[material[i]];
    std::fprintf(manifest, "%d\t%.6f", slice, z_mm);
    for (int c = 0; c <= channels + 1; ++c)
        std::fprintf(manifest, "\t%llu", static_cast<unsigned long long>(counts[c]));
    std::fprintf(manifest, "\n");
    return counts;
}

namespace detail {

template <typename Fn>
void parallel_slices(int begin, int end, int threads, Fn&& fn) {
    if (end <= begin) return;
    int k = std::max(1, std::min(threads, end - begin));
    if (k == 1) {
        for (int s = begin; s < end; ++s) fn(s);
        return;
    }
    std::atomic<int> next{begin};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        try {
            for (;;) {
                int s = next.fetch_add(1);
                if (s >= end) break;
                fn(s);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct FileCloseGuard {
    std::FILE* f = nullptr;
    ~FileCloseGuard() {
        if (f) std::fclose(f);
    }
};

inline void dump_debug_planes(const std::string& dir, const GridSpec& grid, int s,
                              const SlicePlanes& pl, double d_null, int layer_count) {
    char name[64];
    int nx = grid.dims.x, ny = grid.dims.y;
    size_t nxy = pl.nxy();
    if (!pl.d.empty()) {
        // scale: round(255 * d / d_max); the beyond-reach sentinel saturates
        double d_max = d_null / 2.0;
        std::vector<uint16_t> img(nxy);
        for (size_t i = 0; i < nxy; ++i)
            img[i] = pl.d[i] >= d_null
                         ? 65535
                         : static_cast<uint16_t>(std::lround(255.0 * pl.d[i] / d_max));
        std::snprintf(name, sizeof name, "/slice_%06d_dist.pgm", s);
        write_pgm16(dir + name, nx, ny, img);
    }
    if (!pl.order.empty()) {
        int32_t max_rank = 0;
        for (size_t i = 0; i < nxy; ++i) max_rank = std::max(max_rank, pl.order[i]);
        std::vector<uint8_t> img(nxy, 0);
        if (max_rank > 0)
            for (size_t i = 0; i < nxy; ++i)
                if (pl.order[i] > 0)
                    img[i] = static_cast<uint8_t>(pl.order[i] * 255LL / max_rank);
        std::snprintf(name, sizeof name, "/slice_%06d_order.pgm", s);
        write_pgm8(dir + name, nx, ny, img);
    }
    if (!pl.layer.empty()) {
        int span = std::max(1, layer_count - 1);
        std::vector<uint8_t> img(nxy, 0);
        for (size_t i = 0; i < nxy; ++i) {
            int8_t l = pl.layer[i];
            if (l >= 0)
                img[i] = static_cast<uint8_t>(64 + std::min(191, l * 191 / span));
            else if (l == kBetweenLayers)
                img[i] = 32;
        }
        std::snprintf(name, sizeof name, "/slice_%06d_layer.pgm", s);
        write_pgm8(dir + name, nx, ny, img);
    }
}

}  // namespace detail

struct JobResult {
    GridSpec grid{};
    int channels = 3;
    ToneReport report;
};

// The streaming driver. Ingest runs chunk by chunk; four watermarks trail it
// at fixed lags so every stage only ever sees finalized inputs:
//   distance(s) needs classification through s + Hz,
//   layers/normals/phi(s) need distance through s + 1,
//   halftoning(s) needs derivations through s + 1 (and is sequential in s),
//   fill + write(s) need halftoned materials through s + Hz.
// Heavy planes are freed when a slice is written, so at most
// chunk_slices + 2 * (Hz + 1) slices hold heavy planes at any moment.
inline JobResult run_job(const JobConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.layer_count < 1) throw ConfigError("layer count must be >= 1");
    if (cfg.layer_count > 120) throw ConfigError("layer count exceeds the int8 layer-map range");
    if (cfg.chunk_slices < 1) throw ConfigError("chunk size must be >= 1");
    if (cfg.mesh_path.empty()) throw ConfigError("mesh path required");

    Mesh mesh = load_obj(cfg.mesh_path);
    SeparationLUT lut =
        cfg.lut_path.empty() ? SeparationLUT::naive() : SeparationLUT::from_file(cfg.lut_path);
    const int T = lut.channels();
    if (T > kMaxTonalChannels) throw ConfigError("too many tonal channels");
    FilterChoice filt = resolve_filter(cfg);

    TextureImage texture;
    ColorSampler sampler;
    if (cfg.force_constant) {
        sampler.source = ColorSource::Constant;
        sampler.constant = cfg.constant_color;
    } else if (!cfg.texture_path.empty()) {
        texture = TextureImage::from_file(cfg.texture_path);
        sampler.source = ColorSource::Texture;
        sampler.texture = &texture;
    } else if (mesh.has_vertex_colors()) {
        sampler.source = ColorSource::VertexColors;
    } else {
        sampler.source = ColorSource::Constant;
        sampler.constant = cfg.constant_color;
    }

    GridSpec grid;
    if (cfg.has_grid) {
        grid = cfg.grid;
    } else {
        if (cfg.dpi.x <= 0 || cfg.dpi.y <= 0 || cfg.dpi.z <= 0)
            throw ConfigError("dpi must be positive");
        grid = grid_from_mesh(mesh, {25.4 / cfg.dpi.x, 25.4 / cfg.dpi.y, 25.4 / cfg.dpi.z}, 2);
    }
    grid.validate();

    const double tau = std::max({grid.pitch.x, grid.pitch.y, grid.pitch.z});
    const double d_max = cfg.layer_count * tau;
    const DistanceMask mask = build_distance_mask(grid.pitch, d_max);
    const int hz = mask.max_dz;
    const int halo = hz + 1;
    if (cfg.chunk_slices < halo)
        throw ConfigError("chunk of " + std::to_string(cfg.chunk_slices) +
                          " slices is below the halo requirement of " + std::to_string(halo));
    const int threads = cfg.threads >= 1
                            ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());

    JobResult result;
    result.grid = grid;
    result.channels = T;
    ToneReport& report = result.report;
    report.channels = T;
    report.halo = halo;

    fs::create_directories(cfg.out_dir);
    detail::FileCloseGuard manifest;
    manifest.f = std::fopen((cfg.out_dir + "/manifest.tsv").c_str(), "w");
    if (!manifest.f) throw IoError("cannot open " + cfg.out_dir + "/manifest.tsv for writing");
    std::fprintf(manifest.f, "slice\tz_mm");
    for (int c = 0; c <= T + 1; ++c) std::fprintf(manifest.f, "\tn_code%d", c);
    std::fprintf(manifest.f, "\n");
    detail::FileCloseGuard metrics;
    if (cfg.metrics) {
        metrics.f = std::fopen((cfg.out_dir + "/metrics.tsv").c_str(), "w");
        if (!metrics.f) throw IoError("cannot open " + cfg.out_dir + "/metrics.tsv for writing");
        std::fprintf(metrics.f, "slice\tchannel\tactual\texpected\terror\n");
    }

    // Disjoint mesh/grid boxes: nothing to do, succeed with a warning.
    {
        Vec3d mn, mx;
        mesh.bbox(&mn, &mx);
        Vec3d gmax{grid.origin.x + grid.dims.x * grid.pitch.x,
                   grid.origin.y + grid.dims.y * grid.pitch.y,
                   grid.origin.z + grid.dims.z * grid.pitch.z};
        if (mx.x < grid.origin.x || mn.x > gmax.x || mx.y < grid.origin.y || mn.y > gmax.y ||
            mx.z < grid.origin.z || mn.z > gmax.z) {
            std::fprintf(stderr, "warning: mesh does not intersect the voxel grid; "
                                 "no slices written\n");
            report.empty_intersection = true;
            return result;
        }
    }

    MeshRaster raster(mesh, grid);
    SliceChunk chunk(grid, T, halo, &report.memory);
    const int nz = grid.dims.z;
    const Palette palette = material_palette(T);

    std::atomic<uint64_t> clamped{0}, degenerate{0}, unfilled{0}, layer_voxels{0};

    auto cls_of = [&](int s) -> const uint8_t* { return chunk.at(s).cls.data(); };
    auto g_of = [&](int s) -> const double* { return chunk.at(s).g.data(); };
    auto d_of = [&](int s) -> const double* { return chunk.at(s).d.data(); };
    auto layer_of = [&](int s) -> const int8_t* { return chunk.at(s).layer.data(); };
    auto material_of = [&](int s) -> const uint8_t* { return chunk.at(s).material.data(); };

    auto ingest_stage = [&](int s) {
        SlicePlanes& pl = chunk.at(s);
        pl.alloc_ingest();
        raster.classify_slice(s, pl.cls);
        std::vector<double> srgb(pl.nxy() * 3, 0.0);
        raster.sample_surface_colors(s, pl.cls, sampler, srgb);
        uint64_t local_clamp = 0;
        for (size_t i = 0; i < pl.nxy(); ++i) {
            if (static_cast<VoxelClass>(pl.cls[i]) != VoxelClass::Surface) continue;
            TonalVec t = lut.separate({srgb[i * 3], srgb[i * 3 + 1], srgb[i * 3 + 2]},
                                      &local_clamp);
            for (int c = 0; c < T; ++c) pl.g[i * T + c] = t[c];
        }
        clamped += local_clamp;
    };

    auto distance_stage = [&](int s) {
        SlicePlanes& pl = chunk.at(s);
        pl.alloc_distance(cfg.keep_nearest);
        sweep_gather_slice(grid, mask, s, T, cls_of, g_of, pl.d.data(), pl.ghat.data(),
                           cfg.keep_nearest ? pl.nearest.data() : nullptr);
    };

    auto derive_stage = [&](int s) {
        SlicePlanes& pl = chunk.at(s);
        pl.alloc_derive();
        // "no arrival yet" is a negative sentinel, not the zero fill
        std::fill(pl.last_dir.begin(), pl.last_dir.end(), kLastNone);
        extract_layers(grid, s, cfg.layer_count, tau, d_max, cls_of, d_of, pl.layer.data());
        distance_to_empty(grid, pl.cls.data(), pl.phi.data(), pl.dphi.data());
        uint64_t local_degen = 0;
        compute_normals(grid, s, mask.d_null, cls_of, d_of, pl.layer.data(), pl.normal.data(),
                        &local_degen);
        degenerate += local_degen;
        uint64_t local_layer = 0;
        for (size_t i = 0; i < pl.nxy(); ++i)
            if (pl.layer[i] >= 0) ++local_layer;
        layer_voxels += local_layer;
    };

    auto halftone_stage = [&](int s) {
        SlicePlanes& pl = chunk.at(s);
        pl.alloc_halftone(cfg.debug_dumps);
        SlicePlanes* up = s + 1 < nz ? &chunk.at(s + 1) : nullptr;
        std::vector<HalftoneCounters> per_layer(cfg.layer_count);
        detail::parallel_slices(0, cfg.layer_count, threads, [&](int l) {
            LayerSlicePlanes lsp;
            lsp.ghat = pl.ghat.data();
            lsp.layer = pl.layer.data();
            lsp.phi = pl.phi.data();
            lsp.dphi = pl.dphi.data();
            lsp.normal = pl.normal.data();
            lsp.err = pl.err.data();
            lsp.err_count = pl.err_count.data();
            lsp.last_dir = pl.last_dir.data();
            lsp.visited = pl.visited.data();
            lsp.order = pl.order.empty() ? nullptr : pl.order.data();
            lsp.material = pl.material.data();
            if (up) {
                lsp.layer_up = up->layer.data();
                lsp.err_up = up->err.data();
                lsp.err_count_up = up->err_count.data();
                lsp.last_dir_up = up->last_dir.data();
            }
            LayerSliceHalftoner engine(grid, T, s, l, cfg.seed, filt.bank, filt.sigma,
                                       cfg.policy, lsp, cfg.instrumented, nullptr);
            engine.run();
            per_layer[l] = engine.counters();
        });
        for (const HalftoneCounters& c : per_layer) report.halftone.merge(c);
        pl.release_halftoned();
    };

    int D = 0, V = 0, H = 0, W = 0, Gfree = 0;

    auto write_range = [&](int w0, int w1) {
        if (w1 <= w0) return;
        std::vector<SliceMetrics> local(w1 - w0);
        detail::parallel_slices(w0, w1, threads, [&](int s) {
            SlicePlanes& pl = chunk.at(s);
            uint64_t local_unfilled = 0;
            fill_between_layers(grid, mask, s, layer_of, material_of, pl.cls.data(),
                                pl.layer.data(), pl.material.data(), T, &local_unfilled);
            unfilled += local_unfilled;
            local[s - w0] = slice_tone_metrics(grid, s, T, d_max, pl.cls.data(), pl.d.data(),
                                               pl.ghat.data(), pl.material.data());
        });
        for (int s = w0; s < w1; ++s) {
            SlicePlanes& pl = chunk.at(s);
            const SliceMetrics& m = local[s - w0];
            auto counts = write_slice(cfg.out_dir, s, m.z_mm, T, pl.material.data(),
                                      grid.dims.x, grid.dims.y, palette, manifest.f);
            for (int c = 0; c <= T + 1; ++c) report.material_totals[c] += counts[c];
            ++report.slices_written;
            if (metrics.f && m.qualifying)
                for (int k = 0; k <= T; ++k)
                    std::fprintf(metrics.f, "%d\t%s\t%.9f\t%.9f\t%.9f\n", s,
                                 channel_name(k, T).c_str(), m.actual[k], m.expected[k],
                                 m.actual[k] - m.expected[k]);
            report.rows.push_back(m);
            if (cfg.debug_dumps)
                detail::dump_debug_planes(cfg.out_dir, grid, s, pl, mask.d_null,
                                          cfg.layer_count);
            pl.release_written();
        }
        std::fflush(manifest.f);
        if (metrics.f) std::fflush(metrics.f);
        chunk.drop_below(w1 - hz);
    };

    auto advance = [&](int ingested) {
        int d_t = ingested >= nz ? nz : std::max(0, ingested - hz);
        detail::parallel_slices(D, d_t, threads, distance_stage);
        D = d_t;
        int g_free_end = D >= nz ? nz : std::max(0, D - hz);
        for (; Gfree < g_free_end; ++Gfree) chunk.at(Gfree).release_sources();
        int v_t = D >= nz ? nz : std::max(0, D - 1);
        detail::parallel_slices(V, v_t, threads, derive_stage);
        V = v_t;
        int h_t = V >= nz ? nz : std::max(0, V - 1);
        for (int s = H; s < h_t; ++s) halftone_stage(s);  // order-dependent
        H = h_t;
        int w_t = H >= nz ? nz : std::max(0, H - hz);
        write_range(W, w_t);
        W = w_t;
    };

    for (int a = 0; a < nz; a += cfg.chunk_slices) {
        int b = std::min(nz, a + cfg.chunk_slices);
        for (int s = a; s < b; ++s) chunk.acquire(s);
        detail::parallel_slices(a, b, threads, ingest_stage);
        advance(b);
    }

    report.clamped = clamped;
    report.degenerate_normals = degenerate;
    report.unfilled = unfilled;
    report.layer_voxels = layer_voxels;
    report.finalize();
    return result;
}

}  // namespace voxhalf
