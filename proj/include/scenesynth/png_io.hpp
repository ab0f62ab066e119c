#pragma once

#include <png.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenesynth/image.hpp"

namespace scenesynth {

namespace detail {

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : f(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline void hsv_to_rgb(double h, double s, double v, std::uint8_t rgb[3]) {
    const double c = v * s;
    const double hp = h * 6.0;
    const double xx = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = xx; }
    else if (hp < 2) { r = xx; g = c; }
    else if (hp < 3) { g = c; b = xx; }
    else if (hp < 4) { g = xx; b = c; }
    else if (hp < 5) { r = xx; b = c; }
    else             { r = c; b = xx; }
    const double m = v - c;
    rgb[0] = static_cast<std::uint8_t>(std::lround((r + m) * 255.0));
    rgb[1] = static_cast<std::uint8_t>(std::lround((g + m) * 255.0));
    rgb[2] = static_cast<std::uint8_t>(std::lround((b + m) * 255.0));
}

}  // namespace detail

/// Fixed 256-entry label palette: index 0 black (background), the rest
/// spread around the hue circle by the golden ratio. Deterministic, so
/// label PNGs are byte-stable across runs.
inline std::array<std::array<std::uint8_t, 3>, 256> label_palette() {
    std::array<std::array<std::uint8_t, 3>, 256> p{};
    for (int i = 1; i < 256; ++i) {
        const double h = std::fmod(i * 0.61803398874989485, 1.0);
        detail::hsv_to_rgb(h, 0.65, 0.95, p[i].data());
    }
    return p;
}

/// Depth -> 16-bit grayscale PNG in millimeters; 0 encodes invalid.
inline void write_depth_png(const std::string& path, const DepthFrame& frame) {
    std::vector<std::uint16_t> mm(frame.pixel_count(), 0);
    for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
        const double z = frame.data[i];
        if (!depth_valid(z)) continue;
        const long v = std::lround(z * 1000.0);
        mm[i] = static_cast<std::uint16_t>(std::min(65535L, std::max(0L, v)));
    }

    detail::FileHandle file(path, "wb");
    if (!file.f) throw std::runtime_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png alloc failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed for " + path);
    }
    png_init_io(png, file.f);
    png_set_IHDR(png, info, frame.width, frame.height, 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);  // buffer is host (little) endian
    for (int y = 0; y < frame.height; ++y)
        png_write_row(png, reinterpret_cast<png_bytep>(
                               mm.data() + static_cast<std::size_t>(y) * frame.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline DepthFrame read_depth_png(const std::string& path) {
    detail::FileHandle file(path, "rb");
    if (!file.f) throw std::runtime_error("cannot read " + path);
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png alloc failed for " + path);
    }
    std::vector<std::uint16_t> mm;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png read failed for " + path);
    }
    png_init_io(png, file.f);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    if (png_get_bit_depth(png, info) != 16 ||
        png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("not a 16-bit gray depth png: " + path);
    }
    png_set_swap(png);
    png_read_update_info(png, info);
    mm.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        png_read_row(png,
                     reinterpret_cast<png_bytep>(mm.data() +
                                                 static_cast<std::size_t>(y) * width),
                     nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    DepthFrame out(width, height, kInvalidDepth);
    for (std::size_t i = 0; i < out.pixel_count(); ++i)
        if (mm[i] != 0) out.data[i] = mm[i] / 1000.0;
    return out;
}

/// Labels -> 8-bit indexed PNG with the fixed palette.
inline void write_label_png(const std::string& path, const LabelFrame& frame) {
    detail::FileHandle file(path, "wb");
    if (!file.f) throw std::runtime_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png alloc failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed for " + path);
    }
    png_init_io(png, file.f);
    png_set_IHDR(png, info, frame.width, frame.height, 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    const auto palette = label_palette();
    std::array<png_color, 256> plte{};
    for (int i = 0; i < 256; ++i)
        plte[i] = {palette[i][0], palette[i][1], palette[i][2]};
    png_set_PLTE(png, info, plte.data(), 256);
    png_write_info(png, info);
    for (int y = 0; y < frame.height; ++y)
        png_write_row(png, const_cast<png_bytep>(
                               frame.data.data() +
                               static_cast<std::size_t>(y) * frame.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline LabelFrame read_label_png(const std::string& path) {
    detail::FileHandle file(path, "rb");
    if (!file.f) throw std::runtime_error("cannot read " + path);
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png alloc failed for " + path);
    }
    std::vector<std::uint8_t> raw;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png read failed for " + path);
    }
    png_init_io(png, file.f);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) != 8 ||
        (color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("not an 8-bit indexed label png: " + path);
    }
    png_read_update_info(png, info);
    raw.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        png_read_row(png, raw.data() + static_cast<std::size_t>(y) * width, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    LabelFrame out(width, height, 0);
    out.data = std::move(raw);
    return out;
}

}  // namespace scenesynth
