#pragma once

#include <png.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "voxhalf/error.hpp"

namespace voxhalf {

struct ImageU8 {
    int width = 0, height = 0, channels = 0;
    std::vector<uint8_t> pixels;  // row-major, interleaved

    uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

using Palette = std::vector<std::array<uint8_t, 3>>;

// ---- PNG via the libpng simplified API ----

inline ImageU8 read_png(const std::string& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw IoError("cannot read PNG " + path + ": " + img.message);
    img.format = PNG_FORMAT_RGB;
    ImageU8 out;
    out.width = static_cast<int>(img.width);
    out.height = static_cast<int>(img.height);
    out.channels = 3;
    out.pixels.resize(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&img);
        throw IoError("cannot decode PNG " + path + ": " + img.message);
    }
    return out;
}

inline void write_indexed_png(const std::string& path, int width, int height,
                              const std::vector<uint8_t>& indices, const Palette& palette) {
    if (indices.size() != static_cast<size_t>(width) * height)
        throw IoError("index buffer size mismatch for " + path);
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = PNG_FORMAT_RGB_COLORMAP;
    img.colormap_entries = static_cast<png_uint_32>(palette.size());
    if (!png_image_write_to_file(&img, path.c_str(), 0, indices.data(), 0, palette.data()))
        throw IoError("cannot write PNG " + path + ": " + img.message);
}

inline void write_rgb_png(const std::string& path, int width, int height,
                          const std::vector<uint8_t>& rgb) {
    if (rgb.size() != static_cast<size_t>(width) * height * 3)
        throw IoError("pixel buffer size mismatch for " + path);
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.c_str(), 0, rgb.data(), 0, nullptr))
        throw IoError("cannot write PNG " + path + ": " + img.message);
}

inline std::pair<ImageU8, Palette> read_indexed_png(const std::string& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw IoError("cannot read PNG " + path + ": " + img.message);
    img.format = PNG_FORMAT_RGB_COLORMAP;
    ImageU8 out;
    out.width = static_cast<int>(img.width);
    out.height = static_cast<int>(img.height);
    out.channels = 1;
    out.pixels.resize(PNG_IMAGE_SIZE(img));
    Palette palette(PNG_IMAGE_COLORMAP_SIZE(img) / 3);
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, palette.data())) {
        png_image_free(&img);
        throw IoError("cannot decode PNG " + path + ": " + img.message);
    }
    return {std::move(out), std::move(palette)};
}

// ---- PPM / PGM (binary variants) ----

namespace detail {

inline int pnm_token(std::FILE* f) {
    int c = std::fgetc(f);
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#')
            while (c != EOF && c != '\n') c = std::fgetc(f);
        c = std::fgetc(f);
    }
    if (c == EOF) return -1;
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = std::fgetc(f);
    }
    return value;
}

struct FileCloser {
    std::FILE* f;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

}  // namespace detail

inline ImageU8 read_ppm(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    detail::FileCloser closer{f};
    if (!f) throw IoError("cannot open " + path);
    char magic[3] = {};
    if (std::fread(magic, 1, 2, f) != 2 || magic[0] != 'P' || magic[1] != '6')
        throw IoError(path + " is not a binary PPM (P6)");
    int w = detail::pnm_token(f), h = detail::pnm_token(f), maxval = detail::pnm_token(f);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw IoError(path + ": unsupported PPM header (need 8-bit)");
    ImageU8 out;
    out.width = w;
    out.height = h;
    out.channels = 3;
    out.pixels.resize(static_cast<size_t>(w) * h * 3);
    if (std::fread(out.pixels.data(), 1, out.pixels.size(), f) != out.pixels.size())
        throw IoError(path + ": truncated PPM payload");
    return out;
}

// Dispatch on magic bytes: PNG signature or "P6".
inline ImageU8 read_image(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    unsigned char sig[2] = {};
    size_t got = std::fread(sig, 1, 2, f);
    std::fclose(f);
    if (got == 2 && sig[0] == 'P' && sig[1] == '6') return read_ppm(path);
    return read_png(path);
}

inline void write_ppm(const std::string& path, int width, int height,
                      const std::vector<uint8_t>& rgb) {
    if (rgb.size() != static_cast<size_t>(width) * height * 3)
        throw IoError("pixel buffer size mismatch for " + path);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    detail::FileCloser closer{f};
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "P6\n%d %d\n255\n", width, height);
    if (std::fwrite(rgb.data(), 1, rgb.size(), f) != rgb.size())
        throw IoError("short write to " + path);
}

inline void write_pgm8(const std::string& path, int width, int height,
                       const std::vector<uint8_t>& pixels) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    detail::FileCloser closer{f};
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "P5\n%d %d\n255\n", width, height);
    if (std::fwrite(pixels.data(), 1, pixels.size(), f) != pixels.size())
        throw IoError("short write to " + path);
}

inline void write_pgm16(const std::string& path, int width, int height,
                        const std::vector<uint16_t>& pixels) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    detail::FileCloser closer{f};
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "P5\n%d %d\n65535\n", width, height);
    for (uint16_t p : pixels) {
        unsigned char be[2] = {static_cast<unsigned char>(p >> 8),
                               static_cast<unsigned char>(p & 0xff)};
        if (std::fwrite(be, 1, 2, f) != 2) throw IoError("short write to " + path);
    }
}

inline std::vector<uint16_t> read_pgm16(const std::string& path, int* width, int* height) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    detail::FileCloser closer{f};
    if (!f) throw IoError("cannot open " + path);
    char magic[3] = {};
    if (std::fread(magic, 1, 2, f) != 2 || magic[0] != 'P' || magic[1] != '5')
        throw IoError(path + " is not a binary PGM (P5)");
    int w = detail::pnm_token(f), h = detail::pnm_token(f), maxval = detail::pnm_token(f);
    if (w <= 0 || h <= 0) throw IoError(path + ": bad PGM header");
    *width = w;
    *height = h;
    std::vector<uint16_t> out(static_cast<size_t>(w) * h);
    if (maxval == 255) {
        std::vector<uint8_t> raw(out.size());
        if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
            throw IoError(path + ": truncated PGM payload");
        for (size_t i = 0; i < raw.size(); ++i) out[i] = raw[i];
    } else {
        std::vector<uint8_t> raw(out.size() * 2);
        if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
            throw IoError(path + ": truncated PGM payload");
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return out;
}

}  // namespace voxhalf
