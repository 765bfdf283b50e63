// Acceptance gate: end-to-end checks of the documented guarantees, one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "voxhalf/colorsep.hpp"
#include "voxhalf/field.hpp"
#include "voxhalf/filter.hpp"
#include "voxhalf/grid.hpp"
#include "voxhalf/halftone.hpp"
#include "voxhalf/image_io.hpp"
#include "voxhalf/pipeline.hpp"
#include "voxhalf/rng.hpp"
#include "voxhalf/shapes.hpp"
#include "voxhalf/voxelize.hpp"

using namespace voxhalf;
namespace ts = voxhalf::testsup;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;   // informational, printed either way
    std::vector<std::string> errors;  // first few failure details

    void fail(const std::string& msg) {
        pass = false;
        if (errors.size() < 6) errors.push_back(msg);
    }
    void check(bool cond, const std::string& msg) {
        if (!cond) fail(msg);
    }
    void note(const std::string& msg) { notes.push_back(msg); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

bool slurp_file(const std::string& path, std::string* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
    return true;
}

uint64_t fnv1a(const std::string& s, uint64_t h) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// Holds every plane of a whole grid in memory and runs the per-slice stages
// over it; the convenient form for fixtures small enough to not stream.
struct FullField {
    GridSpec spec;
    int channels;
    std::vector<std::vector<uint8_t>> cls;
    std::vector<std::vector<double>> g, d, ghat;
    std::vector<std::vector<int8_t>> layer;

    FullField(const GridSpec& s, int ch) : spec(s), channels(ch) {
        size_t nxy = spec.slice_voxels();
        int nz = spec.dims.z;
        cls.assign(nz, std::vector<uint8_t>(nxy, 0));
        g.assign(nz, std::vector<double>(nxy * channels, 0.0));
        d.assign(nz, std::vector<double>(nxy, 0.0));
        ghat.assign(nz, std::vector<double>(nxy * channels, 0.0));
        layer.assign(nz, std::vector<int8_t>(nxy, kNoLayer));
    }

    void transfer(const DistanceMask& mask) {
        sweep_transfer(
            spec, mask, channels, [&](int s) { return cls[s].data(); },
            [&](int s) { return g[s].data(); }, [&](int s) { return d[s].data(); },
            [&](int s) { return ghat[s].data(); });
    }

    void layers(int layer_count, double tau, double d_max) {
        for (int s = 0; s < spec.dims.z; ++s)
            extract_layers(
                spec, s, layer_count, tau, d_max, [&](int t) { return cls[t].data(); },
                [&](int t) { return d[t].data(); }, layer[s].data());
    }
};

// ---- criterion 1: a flat plate must reproduce classic 2D serpentine
// Floyd-Steinberg bit for bit ----
//
// The plate mesh is voxelized for real; the per-voxel tones are written
// directly into the surface tone plane (a dyadic gradient covering the whole
// tone range) so the comparison input is exact by construction, then the
// field, layer, and halftoning stages run unmodified.
Outcome crit_flat_plate() {
    Outcome o;
    const int n = 256;
    Mesh plate = make_plate({double(n), double(n), 1.0});
    GridSpec grid = grid_from_mesh(plate, {1, 1, 1}, 2);
    o.check(grid.dims == Vec3i{n + 5, n + 5, 6},
            "unexpected grid dimensions for the plate");
    if (!o.pass) return o;

    MeshRaster raster(plate, grid);
    FullField f(grid, 1);
    for (int s = 0; s < grid.dims.z; ++s) raster.classify_slice(s, f.cls[s]);

    const int slab = 2;  // the single interior slice
    size_t inside = 0;
    for (uint8_t c : f.cls[slab])
        inside += is_inside(static_cast<VoxelClass>(c));
    o.check(inside == size_t(n) * n, "the plate slab is not exactly 256x256");

    std::vector<double> tone(size_t(n) * n);
    for (int ry = 0; ry < n; ++ry)
        for (int rx = 0; rx < n; ++rx) {
            double t = (ry * 256.0 + rx + 0.5) / 65536.0;  // dyadic, spans (0,1)
            tone[size_t(ry) * n + rx] = t;
            f.g[slab][grid.plane_index(2 + rx, 2 + ry)] = t;
        }

    const double tau = 1.0, d_max = 1.0;
    DistanceMask mask = build_distance_mask(grid.pitch, d_max);
    f.transfer(mask);
    f.layers(1, tau, d_max);

    size_t nxy = grid.slice_voxels();
    std::vector<int32_t> phi(nxy, 0);
    std::vector<Vec2i> dphi(nxy);
    distance_to_empty(grid, f.cls[slab].data(), phi.data(), dphi.data());
    std::vector<float> normal(nxy * 3, 0.0f);
    uint64_t degen = 0;
    compute_normals(
        grid, slab, mask.d_null, [&](int t) { return f.cls[t].data(); },
        [&](int t) { return f.d[t].data(); }, f.layer[slab].data(), normal.data(), &degen);

    std::vector<double> err(nxy, 0.0);
    std::vector<int32_t> err_count(nxy, 0);
    std::vector<int8_t> last_dir(nxy * 3, kLastNone);
    std::vector<uint8_t> visited(nxy, 0), material(nxy, 0);

    LayerSlicePlanes lsp;
    lsp.ghat = f.ghat[slab].data();
    lsp.layer = f.layer[slab].data();
    lsp.phi = phi.data();
    lsp.dphi = dphi.data();
    lsp.normal = normal.data();
    lsp.err = err.data();
    lsp.err_count = err_count.data();
    lsp.last_dir = last_dir.data();
    lsp.visited = visited.data();
    lsp.material = material.data();

    ToneFilterBank fs = ToneFilterBank::floyd_steinberg();
    SigmaTable sigma = SigmaTable::zero();
    LayerSliceHalftoner engine(grid, 1, slab, 0, 0, fs, sigma, TonalPolicy{}, lsp, true);
    engine.run();
    o.check(engine.counters().violations == 0, "traversal invariant violated on the plate");
    o.check(engine.counters().visited == uint64_t(n) * n,
            "not every plate voxel was halftoned");

    std::vector<uint8_t> want = ts::reference_serpentine_fs(tone, n, n);
    size_t diff = 0;
    for (int ry = 0; ry < n; ++ry)
        for (int rx = 0; rx < n; ++rx) {
            uint8_t mat = material[grid.plane_index(2 + rx, 2 + ry)];
            uint8_t got = mat == 1 ? 1 : 0;
            if (got != want[size_t(ry) * n + rx]) ++diff;
        }
    o.note(fmt("differing pixels: %.0f of 65536", double(diff)));
    o.check(diff == 0, fmt("%.0f pixels differ from the serpentine reference", double(diff)));
    return o;
}

// ---- criterion 2: the masked sweep must equal the exhaustive all-pairs
// transfer exactly on random shapes ----
Outcome crit_sweep_exact() {
    Outcome o;
    const int channels = 3;
    const double d_max = 5.0;
    uint64_t finite = 0;
    for (int trial = 0; trial < 10; ++trial) {
        ts::SynthVolume vol = ts::random_blob(32, 9000 + trial);
        FullField f(vol.spec, channels);
        f.cls = vol.cls;
        size_t nxy = vol.spec.slice_voxels();
        for (int s = 0; s < vol.spec.dims.z; ++s)
            for (size_t i = 0; i < nxy; ++i)
                for (int c = 0; c < channels; ++c)
                    f.g[s][i * channels + c] = keyed_unit(
                        123, {uint64_t(trial), uint64_t(s), uint64_t(i), uint64_t(c)});

        DistanceMask mask = build_distance_mask(vol.spec.pitch, d_max);
        f.transfer(mask);
        ts::BruteField brute = ts::brute_distance_transfer(vol.spec, channels, vol.cls,
                                                           f.g, d_max);

        size_t d_bad = 0, g_bad = 0;
        for (int s = 0; s < vol.spec.dims.z; ++s)
            for (size_t i = 0; i < nxy; ++i) {
                if (f.d[s][i] != brute.d[s][i]) ++d_bad;
                finite += f.d[s][i] < mask.d_null;
                if (brute.tie[s][i]) continue;
                for (int c = 0; c < channels; ++c)
                    if (f.ghat[s][i * channels + c] != brute.ghat[s][i * channels + c])
                        ++g_bad;
            }
        if (d_bad || g_bad)
            o.fail(fmt("trial %.0f: %.0f distance and %.0f tonal mismatches",
                       double(trial), double(d_bad), double(g_bad)));
    }
    o.note(fmt("voxels with finite distance across trials: %.0f", double(finite)));
    o.check(finite > 10000, "fixtures degenerate: too few voxels in reach");
    return o;
}

// ---- criterion 3: the in-slice rim distance must equal the exhaustive O(n^2)
// L1 scan exactly ----
Outcome crit_rim_distance() {
    Outcome o;
    GridSpec spec;
    spec.dims = {64, 64, 1};
    spec.pitch = {1, 1, 1};
    spec.origin = {0, 0, 0};
    size_t nxy = spec.slice_voxels();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<uint8_t> cls(nxy);
        for (size_t i = 0; i < nxy; ++i) {
            bool interior = trial == 0 ||  // one all-interior plate: border rule
                            (keyed_bits(777, {uint64_t(trial), uint64_t(i)}) & 3) != 0;
            cls[i] = static_cast<uint8_t>(interior ? VoxelClass::Interior
                                                   : VoxelClass::Exterior);
        }
        std::vector<int32_t> phi(nxy, 0);
        std::vector<Vec2i> dphi(nxy);
        distance_to_empty(spec, cls.data(), phi.data(), dphi.data());
        std::vector<int32_t> want = ts::brute_l1_to_empty(cls, 64, 64);
        size_t bad = 0;
        for (size_t i = 0; i < nxy; ++i) bad += phi[i] != want[i];
        if (bad) o.fail(fmt("trial %.0f: %.0f cells differ", double(trial), double(bad)));
    }
    return o;
}

// ---- criterion 4: a constant 30% sphere must reproduce its tone ----
Outcome crit_sphere_tone() {
    Outcome o;
    ts::TempDir tmp("accept_sphere");
    save_obj(make_sphere(2.54, 96, 48), tmp.file("sphere.obj"));

    JobConfig cfg;
    cfg.mesh_path = tmp.file("sphere.obj");
    cfg.force_constant = true;
    double c = detail::linear_to_srgb(0.7);  // naive separation turns this into 0.3 per channel
    cfg.constant_color = {c, c, c};
    cfg.dpi = {600, 600, 900};
    cfg.layer_count = 12;
    cfg.filter_name = "zhoufang";
    cfg.seed = 11;
    cfg.chunk_slices = 48;
    cfg.threads = 4;
    cfg.out_dir = tmp.file("out");

    JobResult res = run_job(cfg);
    o.check(!res.report.empty_intersection, "sphere missed the grid");
    o.check(res.report.slices_written == uint64_t(res.grid.dims.z),
            "not every slice was written");
    o.note(fmt("grid %g x %g x %g", double(res.grid.dims.x), double(res.grid.dims.y),
               double(res.grid.dims.z)));
    o.note(fmt("rmse C=%.5f M=%.5f Y=%.5f W=%.5f", res.report.rmse[0], res.report.rmse[1],
               res.report.rmse[2], res.report.rmse[3]));
    for (int k = 0; k < 3; ++k)
        o.check(res.report.rmse[k] < 0.03,
                fmt("channel %.0f rmse %.5f is not below 0.03", double(k),
                    res.report.rmse[k]));
    o.check(res.report.halftone.violations == 0, "traversal invariant violated");
    return o;
}

// ---- criterion 5: instrumented traversal on curved and multi-component
// shapes: every layer voxel visited exactly once, no diffusion into the
// past ----
Outcome crit_traversal_invariants() {
    Outcome o;
    ts::TempDir tmp("accept_traverse");

    struct Shape {
        const char* name;
        Mesh mesh;
        bool multi;
    };
    std::vector<Shape> shapes;
    shapes.push_back({"sphere", make_sphere(6.0, 64, 32), false});
    shapes.push_back({"torus", make_torus(12.0, 5.0, 96, 48), false});
    shapes.push_back({"two-spheres", make_two_spheres(5.0, 4.0, 48, 24), true});

    for (const Shape& sh : shapes) {
        std::string mesh_path = tmp.file(std::string(sh.name) + ".obj");
        save_obj(sh.mesh, mesh_path);
        JobConfig cfg;
        cfg.mesh_path = mesh_path;
        cfg.force_constant = true;
        cfg.constant_color = {0.5, 0.5, 0.5};
        cfg.dpi = {101.6, 101.6, 101.6};  // 0.25 mm pitch
        cfg.layer_count = 12;
        cfg.filter_name = "zhoufang";
        cfg.seed = 31;
        cfg.chunk_slices = 32;
        cfg.threads = 4;
        cfg.instrumented = true;
        cfg.out_dir = tmp.file(std::string(sh.name) + "_out");

        JobResult res = run_job(cfg);
        const HalftoneCounters& h = res.report.halftone;
        o.note(fmt((std::string(sh.name) +
                    ": visited=%.0f layer=%.0f births=%.0f deaths=%.0f")
                       .c_str(),
                   double(h.visited), double(res.report.layer_voxels), double(h.births),
                   double(h.deaths)));
        o.check(h.violations == 0,
                std::string(sh.name) + ": a voxel was revisited or error reached the past");
        o.check(h.visited == res.report.layer_voxels,
                std::string(sh.name) + ": some layer voxels were never halftoned");
        o.check(res.report.layer_voxels > 0, std::string(sh.name) + ": no layer voxels");
        o.check(h.births >= 1 && h.deaths >= 1,
                std::string(sh.name) + ": missing birth or death runs");
        if (sh.multi)
            o.check(h.births >= 2 && h.deaths >= 2,
                    "two components must produce two births and two deaths");
    }
    return o;
}

// ---- criterion 6: the layer partition must satisfy its definition voxel by
// voxel on a sphere ----
Outcome crit_layer_partition() {
    Outcome o;
    Mesh sph = make_sphere(16.0, 96, 48);
    GridSpec grid = grid_from_mesh(sph, {1, 1, 1}, 2);
    MeshRaster raster(sph, grid);
    const int L = 4;
    const double tau = 1.0, d_max = L * tau;

    FullField f(grid, 1);
    for (int s = 0; s < grid.dims.z; ++s) raster.classify_slice(s, f.cls[s]);
    DistanceMask mask = build_distance_mask(grid.pitch, d_max);
    f.transfer(mask);
    f.layers(L, tau, d_max);

    int nx = grid.dims.x, ny = grid.dims.y, nz = grid.dims.z;
    size_t mismatch = 0;
    std::vector<size_t> by_layer(L, 0);
    size_t between = 0, none = 0;
    for (int s = 0; s < nz; ++s)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                size_t i = grid.plane_index(x, y);
                int8_t got = f.layer[s][i];
                int8_t want;
                if (!is_inside(static_cast<VoxelClass>(f.cls[s][i])) ||
                    f.d[s][i] >= d_max) {
                    want = kNoLayer;
                } else {
                    bool has_exterior = false;
                    double min_nb = std::numeric_limits<double>::infinity();
                    for (int dz = -1; dz <= 1; ++dz)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (!dx && !dy && !dz) continue;
                                int ux = x + dx, uy = y + dy, uz = s + dz;
                                if (ux < 0 || uy < 0 || uz < 0 || ux >= nx || uy >= ny ||
                                    uz >= nz)
                                    continue;
                                size_t j = grid.plane_index(ux, uy);
                                if (!is_inside(static_cast<VoxelClass>(f.cls[uz][j])))
                                    has_exterior = true;
                                min_nb = std::min(min_nb, f.d[uz][j]);
                            }
                    want = kBetweenLayers;
                    for (int l = 0; l < L; ++l) {
                        double dl = l * tau;
                        if (dl > f.d[s][i]) break;
                        if (l == 0 ? has_exterior : min_nb < dl) {
                            want = static_cast<int8_t>(l);
                            break;
                        }
                    }
                }
                if (got != want) {
                    ++mismatch;
                    if (mismatch <= 3)
                        o.fail(fmt("voxel (%g,%g,%g): wrong layer id", double(x), double(y),
                                   double(s)));
                }
                if (got >= 0)
                    ++by_layer[got];
                else if (got == kBetweenLayers)
                    ++between;
                else
                    ++none;
            }
    o.check(mismatch == 0, fmt("%.0f voxels violate the layer definition", double(mismatch)));
    o.note(fmt("layer counts 0..3: %.0f %.0f %.0f %.0f", double(by_layer[0]),
               double(by_layer[1]), double(by_layer[2]), double(by_layer[3])));
    o.note(fmt("between-layers: %.0f, no layer: %.0f", double(between), double(none)));
    for (int l = 0; l < L; ++l)
        o.check(by_layer[l] > 0, fmt("layer %.0f is empty on a sphere", double(l)));
    o.check(none > 0, "the sphere core should be beyond the layered shell");
    return o;
}

// ---- criterion 7: with modulated thresholds, vertically adjacent layers of a
// constant 50% slab must be uncorrelated ----
Outcome crit_layer_decorrelation() {
    Outcome o;
    ts::TempDir tmp("accept_decor");
    save_obj(make_plate({128, 128, 30}), tmp.file("slab.obj"));

    JobConfig cfg;
    cfg.mesh_path = tmp.file("slab.obj");
    cfg.force_constant = true;
    cfg.constant_color = {detail::linear_to_srgb(0.5), 1.0, 1.0};  // cyan 0.5, others 0
    cfg.dpi = {25.4, 25.4, 25.4};                          // 1 mm pitch
    cfg.layer_count = 12;
    cfg.filter_name = "zhoufang";
    cfg.seed = 21;
    cfg.chunk_slices = 40;
    cfg.threads = 4;
    cfg.out_dir = tmp.file("out");

    JobResult res = run_job(cfg);
    o.check(res.grid.dims == Vec3i{133, 133, 35}, "unexpected slab grid");
    if (!o.pass) return o;

    // the top interior sheet sits at slice 31; depth-k sheets are layer k
    auto read_bits = [&](int slice, std::vector<uint8_t>* bits) {
        char name[64];
        std::snprintf(name, sizeof name, "/slice_%06d.png", slice);
        auto [img, pal] = read_indexed_png(cfg.out_dir + name);
        (void)pal;
        bits->assign(img.pixels.begin(), img.pixels.end());
    };
    std::vector<uint8_t> sheet3, sheet4;
    read_bits(31 - 3, &sheet3);
    read_bits(31 - 4, &sheet4);

    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int y = 12; y < 122; ++y)
        for (int x = 12; x < 122; ++x) {
            size_t i = size_t(y) * 133 + x;
            double a = sheet3[i] == 1 ? 1.0 : 0.0;
            double b = sheet4[i] == 1 ? 1.0 : 0.0;
            n += 1;
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
        }
    o.check(n >= 10000, "not enough aligned pairs");
    double mx = sx / n, my = sy / n;
    double vx = sxx / n - mx * mx, vy = syy / n - my * my;
    o.note(fmt("sheet coverage: %.4f and %.4f over %.0f pairs", mx, my, n));
    o.check(mx > 0.4 && mx < 0.6 && my > 0.4 && my < 0.6,
            "sheet coverage strayed from the 50% tone");
    if (vx <= 0 || vy <= 0) {
        o.fail("degenerate sheets: zero variance");
        return o;
    }
    double rho = (sxy / n - mx * my) / std::sqrt(vx * vy);
    o.note(fmt("adjacent-layer correlation: %.5f", rho));
    o.check(std::fabs(rho) < 0.05, fmt("correlation %.5f is not below 0.05", rho));
    return o;
}

// ---- criterion 8: output must not depend on chunking or thread count, and
// peak memory must not scale with part height ----
Outcome crit_schedule_invariance() {
    Outcome o;
    ts::TempDir tmp("accept_sched");
    save_obj(make_plate({20, 20, 150}), tmp.file("tall.obj"));
    save_obj(make_plate({20, 20, 300}), tmp.file("taller.obj"));

    auto run_once = [&](const std::string& mesh, const std::string& out, int chunk,
                        int threads) {
        JobConfig cfg;
        cfg.mesh_path = tmp.file(mesh);
        cfg.force_constant = true;
        cfg.constant_color = {0.5, 0.5, 0.5};
        cfg.dpi = {25.4, 25.4, 25.4};
        cfg.layer_count = 12;
        cfg.seed = 4;
        cfg.chunk_slices = chunk;
        cfg.threads = threads;
        cfg.out_dir = tmp.file(out);
        return run_job(cfg);
    };

    auto hash_run = [&](const std::string& out, int nz, uint64_t* h) {
        *h = 1469598103934665603ull;
        for (int s = 0; s < nz; ++s) {
            char name[64];
            std::snprintf(name, sizeof name, "/slice_%06d.png", s);
            std::string bytes;
            if (!slurp_file(tmp.file(out) + name, &bytes)) return false;
            *h = fnv1a(bytes, *h);
        }
        std::string manifest;
        if (!slurp_file(tmp.file(out) + "/manifest.tsv", &manifest)) return false;
        *h = fnv1a(manifest, *h);
        return true;
    };

    struct Cfg {
        int chunk, threads;
    };
    const Cfg cfgs[] = {{155, 1}, {155, 4}, {128, 1}, {128, 4}, {64, 1}, {64, 4}};
    uint64_t ref_hash = 0;
    size_t peak_small = 0;
    for (size_t k = 0; k < 6; ++k) {
        std::string out = "out" + std::to_string(k);
        JobResult res = run_once("tall.obj", out, cfgs[k].chunk, cfgs[k].threads);
        o.check(res.grid.dims.z == 155, "unexpected slab height");
        uint64_t h = 0;
        if (!hash_run(out, res.grid.dims.z, &h)) {
            o.fail("missing output files in " + out);
            continue;
        }
        if (k == 0)
            ref_hash = h;
        else
            o.check(h == ref_hash,
                    fmt("chunk %.0f / threads %.0f changed the output bytes",
                        double(cfgs[k].chunk), double(cfgs[k].threads)));
        if (cfgs[k].chunk == 64 && cfgs[k].threads == 1)
            peak_small = res.report.memory.peak_bytes;
    }

    JobResult tall = run_once("taller.obj", "out_tall", 64, 1);
    size_t peak_big = tall.report.memory.peak_bytes;
    double growth =
        peak_small ? (double(peak_big) - double(peak_small)) / double(peak_small) : 1.0;
    o.note(fmt("peak plane bytes: %.0f at 155 slices, %.0f at 305 slices (%+.2f%%)",
               double(peak_small), double(peak_big), growth * 100.0));
    o.check(growth < 0.10, "peak memory grew with part height");
    return o;
}

// ---- criterion 9: overprint fractions must sum to one and match a
// Monte-Carlo overlap simulation ----
Outcome crit_overlap_model() {
    Outcome o;
    double worst_sum = 0.0;
    for (int k = 0; k < 1000; ++k) {
        TonalVec t;
        t.n = 3 + k % 6;
        for (int c = 0; c < t.n; ++c)
            t[c] = keyed_unit(55, {uint64_t(k), uint64_t(c)});
        auto fr = demichel_fractions(t);
        double sum = 0.0;
        for (int c = 0; c <= t.n; ++c) sum += fr[c];
        worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
    }
    o.note(fmt("worst |sum - 1|: %.3e", worst_sum));
    o.check(worst_sum <= 1e-12, "fractions do not sum to one");

    const double tol = 0.003;
    const int samples = 1'000'000;
    struct Case {
        TonalVec t;
    };
    std::vector<TonalVec> cases;
    auto make = [](std::initializer_list<double> v) {
        TonalVec t;
        t.n = int(v.size());
        int c = 0;
        for (double x : v) t[c++] = x;
        return t;
    };
    cases.push_back(make({0.3, 0.3, 0.3}));
    cases.push_back(make({0.5, 0.5, 0.0}));
    cases.push_back(make({0.8, 0.1, 0.5}));
    cases.push_back(make({0.25, 0.5, 0.75, 0.5}));

    double worst_mc = 0.0;
    for (size_t k = 0; k < cases.size(); ++k) {
        auto fr = demichel_fractions(cases[k]);
        auto mc = ts::mc_demichel(cases[k], samples, 7000 + k);
        for (int c = 0; c <= cases[k].n; ++c)
            worst_mc = std::max(worst_mc, std::fabs(fr[c] - mc[c]));
    }
    o.note(fmt("worst Monte-Carlo deviation: %.5f (tolerance %.3f)", worst_mc, tol));
    o.check(worst_mc <= tol, "analytic fractions disagree with simulation");
    return o;
}

struct Criterion {
    const char* name;
    double time_limit_s;  // 0: no stated bound
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"flat-plate serpentine identity", 5.0, crit_flat_plate},
        {"distance sweep vs exhaustive", 60.0, crit_sweep_exact},
        {"rim distance vs exhaustive", 0.0, crit_rim_distance},
        {"sphere tone reproduction", 300.0, crit_sphere_tone},
        {"traversal visit invariants", 0.0, crit_traversal_invariants},
        {"layer partition definition", 0.0, crit_layer_partition},
        {"adjacent layer decorrelation", 0.0, crit_layer_decorrelation},
        {"schedule invariance and memory", 0.0, crit_schedule_invariance},
        {"overlap model consistency", 0.0, crit_overlap_model},
    };

    int failed = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = c.fn();
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
        if (c.time_limit_s > 0 && dt > c.time_limit_s)
            o.fail(fmt("took %.2fs, budget %.0fs", dt, c.time_limit_s));
        std::printf("[%d/9] %s  %-34s (%.2fs)\n", idx, o.pass ? "PASS" : "FAIL", c.name, dt);
        for (const std::string& n : o.notes) std::printf("        . %s\n", n.c_str());
        for (const std::string& e : o.errors) std::printf("        ! %s\n", e.c_str());
        failed += !o.pass;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed ? 1 : 0;
}
