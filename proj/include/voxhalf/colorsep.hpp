#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voxhalf/detail/color.hpp"
#include "voxhalf/error.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

constexpr int kMaxTonalChannels = 8;

// Per-channel coverage demands in [0,1]. Channel order for the default
// separation is C, M, Y.
struct TonalVec {
    std::array<double, kMaxTonalChannels> v{};
    int n = 3;

    double operator[](int i) const { return v[i]; }
    double& operator[](int i) { return v[i]; }
};

inline TonalVec make_tonal(std::initializer_list<double> vals) {
    TonalVec t;
    t.n = static_cast<int>(vals.size());
    int i = 0;
    for (double x : vals) t.v[i++] = x;
    return t;
}

// Generalized Demichel overprint model: each material subset S occurs with
// probability prod_{i in S} t_i * prod_{j not in S} (1 - t_j) and splits its
// coverage evenly among members. Returns n fractions plus white (last).
inline std::array<double, kMaxTonalChannels + 1> demichel_fractions(const TonalVec& t) {
    std::array<double, kMaxTonalChannels + 1> out{};
    int n = t.n;
    for (unsigned s = 0; s < (1u << n); ++s) {
        double p = 1.0;
        int size = 0;
        for (int i = 0; i < n; ++i) {
            if (s & (1u << i)) {
                p *= t[i];
                ++size;
            } else {
                p *= 1.0 - t[i];
            }
        }
        if (size == 0) {
            out[n] += p;
        } else {
            double share = p / size;
            for (int i = 0; i < n; ++i)
                if (s & (1u << i)) out[i] += share;
        }
    }
    return out;
}

struct TonalPolicy {
    struct Exclusion {
        int layer = 0;
        int channel = 0;
        double threshold = 1.0;  // tones below this become 0 on that layer
    };
    std::array<double, kMaxTonalChannels> scale{1, 1, 1, 1, 1, 1, 1, 1};
    std::vector<Exclusion> exclusions;

    // The hardware-motivated default: weak yellow, and no yellow on the
    // outermost layer where it would sit against support material.
    static TonalPolicy printer_default() {
        TonalPolicy p;
        p.scale[2] = 0.3;
        p.exclusions.push_back({0, 2, 1.0});
        return p;
    }
};

inline TonalVec apply_policy(const TonalPolicy& policy, const TonalVec& g, int layer) {
    TonalVec out = g;
    for (int c = 0; c < g.n; ++c) out[c] = g[c] * policy.scale[c];
    for (const TonalPolicy::Exclusion& e : policy.exclusions)
        if (e.layer == layer && e.channel < g.n && out[e.channel] < e.threshold)
            out[e.channel] = 0.0;
    return out;
}

// Color -> tonal separation. Two modes:
//  - the built-in naive separation, analytic 1 - srgb_to_linear(c) per channel;
//  - a loaded n^3 lattice (trilinear) followed by per-channel response curves.
class SeparationLUT {
public:
    static SeparationLUT naive() {
        SeparationLUT lut;
        lut.mode_ = Mode::Naive;
        lut.channels_ = 3;
        return lut;
    }

    static SeparationLUT from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string magic;
        int n = 0, t = 0;
        if (!(in >> magic >> n >> t) || magic != "LUT")
            throw IoError(path + ": expected \"LUT n T\" header");
        if (n < 2 || t < 1 || t > kMaxTonalChannels)
            throw IoError(path + ": unsupported lattice size or channel count");
        SeparationLUT lut;
        lut.mode_ = Mode::Lattice;
        lut.n_ = n;
        lut.channels_ = t;
        size_t nodes = static_cast<size_t>(n) * n * n;
        lut.lattice_.resize(nodes * t);
        for (size_t i = 0; i < nodes * t; ++i) {
            if (!(in >> lut.lattice_[i])) throw IoError(path + ": truncated lattice");
            if (lut.lattice_[i] < 0.0 || lut.lattice_[i] > 1.0)
                throw IoError(path + ": lattice entry outside [0,1]");
        }
        lut.curves_.resize(static_cast<size_t>(t) * 256);
        for (size_t i = 0; i < lut.curves_.size(); ++i)
            if (!(in >> lut.curves_[i])) throw IoError(path + ": truncated curves");
        for (int c = 0; c < t; ++c) {
            const double* curve = lut.curves_.data() + static_cast<size_t>(c) * 256;
            if (curve[0] != 0.0 || curve[255] != 1.0)
                throw IoError(path + ": curve endpoints must be 0 and 1");
            for (int i = 1; i < 256; ++i)
                if (curve[i] < curve[i - 1])
                    throw IoError(path + ": curve must be monotone nondecreasing");
        }
        return lut;
    }

    void save(const std::string& path) const {
        if (mode_ != Mode::Lattice) throw ConfigError("only lattice LUTs can be saved");
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot open " + path + " for writing");
        std::fprintf(f, "LUT %d %d\n", n_, channels_);
        size_t nodes = static_cast<size_t>(n_) * n_ * n_;
        for (size_t i = 0; i < nodes; ++i) {
            for (int c = 0; c < channels_; ++c)
                std::fprintf(f, "%s%.17g", c ? " " : "", lattice_[i * channels_ + c]);
            std::fprintf(f, "\n");
        }
        for (int c = 0; c < channels_; ++c)
            for (int i = 0; i < 256; ++i)
                std::fprintf(f, "%.17g\n", curves_[static_cast<size_t>(c) * 256 + i]);
        std::fclose(f);
    }

    // Uniform lattice with node values from fn(r,g,b), identity curves.
    template <typename Fn>
    static SeparationLUT lattice_from(int n, int channels, Fn&& fn) {
        SeparationLUT lut;
        lut.mode_ = Mode::Lattice;
        lut.n_ = n;
        lut.channels_ = channels;
        lut.lattice_.resize(static_cast<size_t>(n) * n * n * channels);
        for (int r = 0; r < n; ++r)
            for (int g = 0; g < n; ++g)
                for (int b = 0; b < n; ++b) {
                    TonalVec tv = fn(r / double(n - 1), g / double(n - 1), b / double(n - 1));
                    for (int c = 0; c < channels; ++c)
                        lut.lattice_[lut.node_index(r, g, b) * channels + c] = tv[c];
                }
        lut.curves_.resize(static_cast<size_t>(channels) * 256);
        for (int c = 0; c < channels; ++c)
            for (int i = 0; i < 256; ++i)
                lut.curves_[static_cast<size_t>(c) * 256 + i] = i / 255.0;
        return lut;
    }

    int channels() const { return channels_; }
    bool is_lattice() const { return mode_ == Mode::Lattice; }
    int lattice_n() const { return n_; }

    double& node(int r, int g, int b, int c) { return lattice_[node_index(r, g, b) * channels_ + c]; }

    TonalVec separate(const Vec3d& srgb, uint64_t* clamp_counter = nullptr) const {
        Vec3d c = srgb;
        auto clamp01 = [&](double& x) {
            if (x < 0.0 || x > 1.0) {
                x = std::clamp(x, 0.0, 1.0);
                if (clamp_counter) ++*clamp_counter;
            }
        };
        clamp01(c.x);
        clamp01(c.y);
        clamp01(c.z);
        TonalVec out;
        out.n = channels_;
        if (mode_ == Mode::Naive) {
            out[0] = 1.0 - detail::srgb_to_linear(c.x);
            out[1] = 1.0 - detail::srgb_to_linear(c.y);
            out[2] = 1.0 - detail::srgb_to_linear(c.z);
            return out;
        }
        double pr = c.x * (n_ - 1), pg = c.y * (n_ - 1), pb = c.z * (n_ - 1);
        int r0 = std::min(static_cast<int>(pr), n_ - 2);
        int g0 = std::min(static_cast<int>(pg), n_ - 2);
        int b0 = std::min(static_cast<int>(pb), n_ - 2);
        double fr = pr - r0, fg = pg - g0, fb = pb - b0;
        for (int ch = 0; ch < channels_; ++ch) {
            double acc = 0.0;
            for (int dr = 0; dr < 2; ++dr)
                for (int dg = 0; dg < 2; ++dg)
                    for (int db = 0; db < 2; ++db) {
                        double w = (dr ? fr : 1.0 - fr) * (dg ? fg : 1.0 - fg) * (db ? fb : 1.0 - fb);
                        acc += w * lattice_[node_index(r0 + dr, g0 + dg, b0 + db) * channels_ + ch];
                    }
            out[ch] = eval_curve(ch, acc);
        }
        return out;
    }

private:
    enum class Mode { Naive, Lattice };

    size_t node_index(int r, int g, int b) const {
        return (static_cast<size_t>(r) * n_ + g) * n_ + b;
    }

    double eval_curve(int channel, double t) const {
        t = std::clamp(t, 0.0, 1.0);
        const double* curve = curves_.data() + static_cast<size_t>(channel) * 256;
        double pos = t * 255.0;
        int i = std::min(static_cast<int>(pos), 254);
        double f = pos - i;
        return curve[i] * (1.0 - f) + curve[i + 1] * f;
    }

    Mode mode_ = Mode::Naive;
    int n_ = 0;
    int channels_ = 3;
    std::vector<double> lattice_;  // node-major, channels interleaved; b fastest, then g, then r
    std::vector<double> curves_;   // 256 samples per channel
};

}  // namespace voxhalf
