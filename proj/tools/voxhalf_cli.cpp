// Command-line front end: mesh in, a stack of indexed material slices out.
#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "voxhalf/pipeline.hpp"

using namespace voxhalf;

namespace {

bool parse_triple(const std::string& s, Vec3d* out) {
    return std::sscanf(s.c_str(), "%lf,%lf,%lf", &out->x, &out->y, &out->z) == 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxhalf: layered surface halftoning for multi-material voxel printing"};
    JobConfig cfg;
    std::string dpi_arg, srgb_arg;
    double yellow_scale = 1.0;
    bool no_layer0_yellow = false, no_metrics = false, quiet = false;
    cfg.threads = 0;  // resolve to hardware concurrency unless overridden

    app.add_option("-m,--mesh", cfg.mesh_path, "watertight OBJ mesh")->required();
    app.add_option("-t,--texture", cfg.texture_path, "texture image (PNG), used with mesh UVs");
    app.add_option("--srgb", srgb_arg, "force a constant surface color, sRGB r,g,b in [0,1]");
    app.add_option("--dpi", dpi_arg, "print resolution x,y,z (default 600,600,900)");
    app.add_option("--layers", cfg.layer_count, "surface layer count")->check(CLI::PositiveNumber);
    app.add_option("--chunk", cfg.chunk_slices, "slices ingested per streaming chunk")
        ->check(CLI::PositiveNumber);
    app.add_option("--filter", cfg.filter_name, "fs | ostromoukhov | zhoufang");
    app.add_option("--filter-table", cfg.filter_table_path, "diffusion filter bank file");
    app.add_option("--sigma-table", cfg.sigma_table_path, "threshold modulation table file");
    app.add_option("--seed", cfg.seed, "RNG seed for threshold modulation");
    app.add_option("--lut", cfg.lut_path, "color separation lattice file");
    app.add_option("--yellow-scale", yellow_scale, "tone scale for the yellow channel");
    app.add_flag("--no-layer0-yellow", no_layer0_yellow,
                 "suppress yellow on the outermost layer");
    app.add_option("-o,--out", cfg.out_dir, "output directory");
    app.add_flag("--no-metrics", no_metrics, "skip metrics.tsv");
    app.add_flag("--debug-dumps", cfg.debug_dumps, "write per-slice distance/order/layer PGMs");
    app.add_flag("--keep-nearest", cfg.keep_nearest, "retain nearest-surface planes (slower)");
    app.add_flag("--instrumented", cfg.instrumented, "run traversal invariant checks");
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    app.add_flag("-q,--quiet", quiet, "suppress the summary");
    CLI11_PARSE(app, argc, argv);

    try {
        if (!dpi_arg.empty() && !parse_triple(dpi_arg, &cfg.dpi))
            throw ConfigError("bad --dpi, expected x,y,z");
        if (!srgb_arg.empty()) {
            if (!parse_triple(srgb_arg, &cfg.constant_color))
                throw ConfigError("bad --srgb, expected r,g,b");
            cfg.force_constant = true;
        }
        cfg.metrics = !no_metrics;
        cfg.policy.scale[2] = yellow_scale;
        if (no_layer0_yellow) cfg.policy.exclusions.push_back({0, 2, 1.0});

        JobResult res = run_job(cfg);
        const ToneReport& r = res.report;
        if (!quiet) {
            std::printf("grid %d x %d x %d, pitch %.4f/%.4f/%.4f mm, halo %d slices\n",
                        res.grid.dims.x, res.grid.dims.y, res.grid.dims.z, res.grid.pitch.x,
                        res.grid.pitch.y, res.grid.pitch.z, r.halo);
            std::printf("%llu slices written to %s\n",
                        static_cast<unsigned long long>(r.slices_written), cfg.out_dir.c_str());
            for (int k = 0; k <= r.channels; ++k)
                std::printf("tone rmse %-3s %.6f\n", channel_name(k, r.channels).c_str(),
                            r.rmse[k]);
            std::printf("traversal: %llu voxels in %llu runs (%llu births, %llu deaths, "
                        "%llu reversals)\n",
                        static_cast<unsigned long long>(r.halftone.visited),
                        static_cast<unsigned long long>(r.halftone.runs),
                        static_cast<unsigned long long>(r.halftone.births),
                        static_cast<unsigned long long>(r.halftone.deaths),
                        static_cast<unsigned long long>(r.halftone.reversals));
            std::printf("peak memory %.1f MiB across %d heavy slices\n",
                        r.memory.peak_bytes / (1024.0 * 1024.0), r.memory.peak_heavy_slices);
            if (r.clamped)
                std::printf("note: %llu separation clamps\n",
                            static_cast<unsigned long long>(r.clamped));
            if (r.unfilled)
                std::printf("note: %llu interior voxels had no layer voxel in reach\n",
                            static_cast<unsigned long long>(r.unfilled));
            if (r.halftone.violations)
                std::printf("WARNING: %llu instrumented invariant violations\n",
                            static_cast<unsigned long long>(r.halftone.violations));
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MissingColorSourceError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MaskTooLargeError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NonWatertightMeshError& e) {
        std::fprintf(stderr, "mesh error: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
