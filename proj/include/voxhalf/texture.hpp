#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "voxhalf/detail/color.hpp"
#include "voxhalf/image_io.hpp"
#include "voxhalf/vec.hpp"

namespace voxhalf {

// sRGB texture with a box-filtered mip pyramid. Pyramid levels live in
// linearized color so downsampling averages physical intensities.
class TextureImage {
public:
    static TextureImage from_image(const ImageU8& img) {
        TextureImage t;
        Level base;
        base.w = img.width;
        base.h = img.height;
        base.rgb.resize(static_cast<size_t>(base.w) * base.h * 3);
        for (int y = 0; y < base.h; ++y)
            for (int x = 0; x < base.w; ++x)
                for (int c = 0; c < 3; ++c)
                    base.rgb[(static_cast<size_t>(y) * base.w + x) * 3 + c] =
                        detail::srgb_to_linear(img.at(x, y, img.channels == 1 ? 0 : c) / 255.0);
        t.levels_.push_back(std::move(base));
        while (t.levels_.back().w > 1 || t.levels_.back().h > 1)
            t.levels_.push_back(downsample(t.levels_.back()));
        return t;
    }

    static TextureImage from_file(const std::string& path) { return from_image(read_image(path)); }

    int level_count() const { return static_cast<int>(levels_.size()); }
    int width(int level = 0) const { return levels_[level].w; }
    int height(int level = 0) const { return levels_[level].h; }

    Vec3d texel_linear(int level, int x, int y) const {
        const Level& l = levels_[level];
        size_t i = (static_cast<size_t>(y) * l.w + x) * 3;
        return {l.rgb[i], l.rgb[i + 1], l.rgb[i + 2]};
    }

    // Trilinear: clamp-to-edge bilinear inside each level, linear across the
    // two levels bracketing lod.
    Vec3d sample_linear(double u, double v, double lod) const {
        lod = std::clamp(lod, 0.0, static_cast<double>(level_count() - 1));
        int l0 = static_cast<int>(std::floor(lod));
        double lf = lod - l0;
        Vec3d a = bilinear(l0, u, v);
        if (lf == 0.0) return a;
        Vec3d b = bilinear(std::min(l0 + 1, level_count() - 1), u, v);
        return a * (1.0 - lf) + b * lf;
    }

    Vec3d sample_srgb(double u, double v, double lod) const {
        Vec3d lin = sample_linear(u, v, lod);
        return {detail::linear_to_srgb(lin.x), detail::linear_to_srgb(lin.y),
                detail::linear_to_srgb(lin.z)};
    }

private:
    struct Level {
        int w = 0, h = 0;
        std::vector<double> rgb;
    };

    static Level downsample(const Level& src) {
        Level dst;
        // ceil halving so level k spans ceil(level0 / 2^k)
        dst.w = std::max(1, (src.w + 1) / 2);
        dst.h = std::max(1, (src.h + 1) / 2);
        dst.rgb.resize(static_cast<size_t>(dst.w) * dst.h * 3);
        for (int y = 0; y < dst.h; ++y)
            for (int x = 0; x < dst.w; ++x) {
                int x0 = 2 * x, y0 = 2 * y;
                int x1 = std::min(x0 + 1, src.w - 1), y1 = std::min(y0 + 1, src.h - 1);
                for (int c = 0; c < 3; ++c) {
                    double sum = src.rgb[(static_cast<size_t>(y0) * src.w + x0) * 3 + c] +
                                 src.rgb[(static_cast<size_t>(y0) * src.w + x1) * 3 + c] +
                                 src.rgb[(static_cast<size_t>(y1) * src.w + x0) * 3 + c] +
                                 src.rgb[(static_cast<size_t>(y1) * src.w + x1) * 3 + c];
                    dst.rgb[(static_cast<size_t>(y) * dst.w + x) * 3 + c] = sum * 0.25;
                }
            }
        return dst;
    }

    Vec3d bilinear(int level, double u, double v) const {
        const Level& l = levels_[level];
        double cx = u * l.w - 0.5, cy = v * l.h - 0.5;
        int x0 = static_cast<int>(std::floor(cx)), y0 = static_cast<int>(std::floor(cy));
        double fx = cx - x0, fy = cy - y0;
        auto clampx = [&](int x) { return std::clamp(x, 0, l.w - 1); };
        auto clampy = [&](int y) { return std::clamp(y, 0, l.h - 1); };
        Vec3d p00 = texel_linear(level, clampx(x0), clampy(y0));
        Vec3d p10 = texel_linear(level, clampx(x0 + 1), clampy(y0));
        Vec3d p01 = texel_linear(level, clampx(x0), clampy(y0 + 1));
        Vec3d p11 = texel_linear(level, clampx(x0 + 1), clampy(y0 + 1));
        Vec3d top = p00 * (1.0 - fx) + p10 * fx;
        Vec3d bot = p01 * (1.0 - fx) + p11 * fx;
        return top * (1.0 - fy) + bot * fy;
    }

    std::vector<Level> levels_;
};

}  // namespace voxhalf
