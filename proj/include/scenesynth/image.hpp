#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scenesynth/geometry.hpp"

namespace scenesynth {

/// Row-major image container.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("image: bad dimensions");
    }

    T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    const T& at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    std::size_t pixel_count() const { return data.size(); }

    bool same_dims(const Image& o) const {
        return width == o.width && height == o.height;
    }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// Per-pixel depth in meters; 0 marks no-hit/invalid. Double precision in
/// memory so derived quantities (disparity grids, world heights) keep their
/// stated tolerances; file formats quantize at write time.
using DepthFrame = Image<double>;

/// Per-pixel class ids; background id where no geometry.
using LabelFrame = Image<std::uint8_t>;

constexpr double kInvalidDepth = 0.0;

inline bool depth_valid(double z) { return z > 0.0; }

/// Per-pixel unit normals in camera frame, oriented toward the camera.
/// Pixels where the normal cannot be estimated are marked invalid.
struct NormalFrame {
    int width = 0;
    int height = 0;
    std::vector<Vec3> normal;
    std::vector<std::uint8_t> valid;

    NormalFrame() = default;
    NormalFrame(int w, int h)
        : width(w),
          height(h),
          normal(static_cast<std::size_t>(w) * h, Vec3::Zero()),
          valid(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    const Vec3& at(int x, int y) const { return normal[index(x, y)]; }
};

}  // namespace scenesynth
