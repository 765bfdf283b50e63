#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "voxhalf/error.hpp"

namespace voxhalf {

// One diffusion tap. Offsets are in tangent-plane units of voxel pitch:
// +df is the travel direction, +dr points toward the next band (the next
// serpentine row on flats, the next slice's ring on slopes).
struct FilterElement {
    double df = 0.0, dr = 0.0;
    double weight = 0.0;
};

struct Filter2D {
    std::vector<FilterElement> elements;
};

// Error-diffusion filter, either a single stencil or one per quantized tone.
class ToneFilterBank {
public:
    std::string name;
    std::vector<Filter2D> levels;  // size 1 (tone-independent) or 256

    const Filter2D& for_tone(double t) const {
        if (levels.size() == 1) return levels[0];
        int i = std::clamp(static_cast<int>(std::lround(t * 255.0)), 0, 255);
        return levels[i];
    }

    void validate() const {
        if (levels.size() != 1 && levels.size() != 256)
            throw ConfigError("filter bank must have 1 or 256 tone levels");
        for (const Filter2D& f : levels) {
            if (f.elements.empty()) throw ConfigError("filter level with no elements");
            double sum = 0.0;
            for (const FilterElement& e : f.elements) sum += e.weight;
            if (std::fabs(sum - 1.0) > 1e-12)
                throw ConfigError("filter weights must sum to 1 per tone level");
        }
    }

    static ToneFilterBank floyd_steinberg() {
        ToneFilterBank b;
        b.name = "floyd_steinberg";
        Filter2D f;
        f.elements = {{1, 0, 7.0 / 16.0}, {-1, 1, 3.0 / 16.0}, {0, 1, 5.0 / 16.0}, {1, 1, 1.0 / 16.0}};
        b.levels.push_back(std::move(f));
        return b;
    }

    // House three-tap bank: blends from the strongly forward-biased stencil
    // used at tone extremes toward an even spread at midtones, mirrored
    // around 0.5. Same tap positions as the published variable-coefficient
    // filters, so a published table loaded from a file is a drop-in swap.
    static ToneFilterBank tone_adaptive3() {
        ToneFilterBank b;
        b.name = "tone_adaptive3";
        const double extreme[3] = {13.0 / 18.0, 0.0, 5.0 / 18.0};
        const double mid[3] = {8.0 / 16.0, 4.0 / 16.0, 4.0 / 16.0};
        for (int i = 0; i < 256; ++i) {
            double m = std::min(i, 255 - i) / 127.5;
            double s = m * m * (3.0 - 2.0 * m);
            Filter2D f;
            const double taps[3][2] = {{1, 0}, {-1, 1}, {0, 1}};
            for (int k = 0; k < 3; ++k)
                f.elements.push_back({taps[k][0], taps[k][1],
                                      extreme[k] * (1.0 - s) + mid[k] * s});
            b.levels.push_back(std::move(f));
        }
        return b;
    }

    static ToneFilterBank from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string magic;
        int levels = 0;
        ToneFilterBank b;
        if (!(in >> magic >> b.name >> levels) || magic != "FILTER")
            throw IoError(path + ": expected \"FILTER <name> <levels>\" header");
        if (levels < 1) throw IoError(path + ": bad level count");
        for (int l = 0; l < levels; ++l) {
            int count = 0;
            if (!(in >> count) || count < 1) throw IoError(path + ": bad element count");
            Filter2D f;
            for (int k = 0; k < count; ++k) {
                FilterElement e;
                if (!(in >> e.df >> e.dr >> e.weight)) throw IoError(path + ": truncated filter");
                f.elements.push_back(e);
            }
            b.levels.push_back(std::move(f));
        }
        b.validate();
        return b;
    }

    void save(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot open " + path + " for writing");
        std::fprintf(f, "FILTER %s %zu\n", name.c_str(), levels.size());
        for (const Filter2D& lvl : levels) {
            std::fprintf(f, "%zu\n", lvl.elements.size());
            for (const FilterElement& e : lvl.elements)
                std::fprintf(f, "%.17g %.17g %.17g\n", e.df, e.dr, e.weight);
        }
        std::fclose(f);
    }
};

// Threshold-modulation strength per quantized tone.
class SigmaTable {
public:
    std::vector<double> values;  // 256 entries

    double sigma(double t) const {
        if (values.empty()) return 0.0;
        int i = std::clamp(static_cast<int>(std::lround(t * 255.0)), 0, 255);
        return values[i];
    }

    static SigmaTable zero() { return SigmaTable{}; }

    // Default strength: none at the tone extremes (where startup artifacts are
    // handled by the serpentine), full at midtones where structured patterns
    // correlate across layers.
    static SigmaTable tent() {
        SigmaTable s;
        s.values.resize(256);
        for (int i = 0; i < 256; ++i) s.values[i] = std::min(i, 255 - i) / 127.5;
        return s;
    }

    static SigmaTable from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string magic;
        int count = 0;
        if (!(in >> magic >> count) || magic != "SIGMA" || count != 256)
            throw IoError(path + ": expected \"SIGMA 256\" header");
        SigmaTable s;
        s.values.resize(256);
        for (int i = 0; i < 256; ++i) {
            if (!(in >> s.values[i])) throw IoError(path + ": truncated table");
            if (s.values[i] < 0.0 || s.values[i] > 1.0)
                throw IoError(path + ": strengths must be in [0,1]");
        }
        return s;
    }

    void save(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot open " + path + " for writing");
        std::fprintf(f, "SIGMA %zu\n", values.size());
        for (double v : values) std::fprintf(f, "%.17g\n", v);
        std::fclose(f);
    }
};

}  // namespace voxhalf
