#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "scenesynth/camera.hpp"
#include "scenesynth/image.hpp"
#include "scenesynth/rng.hpp"

namespace scenesynth {

/// Depth-camera corruption model: grazing-incidence dropout, lateral
/// sampling jitter, axial Gaussian noise with sigma_z(z) = a0 + a1 z + a2 z^2,
/// and stereo disparity quantization (disparity = f*b/z snapped to a grid of
/// `disparity_step`). Any stage with zeroed parameters is skipped, so the
/// all-zero configuration is the bitwise identity.
struct NoiseParams {
    double axial_a0 = 0.0;          // meters
    double axial_a1 = 0.0;          // unitless
    double axial_a2 = 0.00285;      // 1/meters
    double lateral_sigma = 0.5;     // pixels
    double grazing_angle = deg_to_rad(10.0);  // radians; 0 disables dropout
    double baseline = 0.075;        // meters; <= 0 disables quantization
    double disparity_step = 0.125;  // disparity units; <= 0 disables
    bool shadow_dropout = false;    // occlusion shadow from the emitter offset

    static NoiseParams none() {
        NoiseParams p;
        p.axial_a0 = p.axial_a1 = p.axial_a2 = 0.0;
        p.lateral_sigma = 0.0;
        p.grazing_angle = 0.0;
        p.baseline = 0.0;
        p.disparity_step = 0.0;
        p.shadow_dropout = false;
        return p;
    }

    double axial_sigma(double z) const {
        return axial_a0 + axial_a1 * z + axial_a2 * z * z;
    }

    void validate() const {
        if (lateral_sigma < 0.0)
            throw std::invalid_argument("noise: lateral sigma must be >= 0");
        if (grazing_angle < 0.0 || grazing_angle >= M_PI / 2.0)
            throw std::invalid_argument("noise: grazing angle must be in [0, pi/2)");
        if (baseline < 0.0 || disparity_step < 0.0)
            throw std::invalid_argument("noise: disparity model values must be >= 0");
    }
};

/// Camera-frame surface normals by central differences of back-projected
/// points, oriented toward the camera. Undefined at image borders, next to
/// invalid pixels, and across depth discontinuities (neighbor differing by
/// more than 5% of the center depth), where finite differences straddle
/// separate surfaces.
inline NormalFrame estimate_normals(const DepthFrame& frame,
                                    const CameraIntrinsics& k) {
    k.validate();
    if (frame.width != k.width || frame.height != k.height)
        throw std::invalid_argument("normals: frame does not match intrinsics");
    NormalFrame out(frame.width, frame.height);

    auto point = [&](int x, int y, double z) {
        return back_project(k, x + 0.5, y + 0.5, z);
    };

    for (int y = 1; y + 1 < frame.height; ++y) {
        for (int x = 1; x + 1 < frame.width; ++x) {
            const double zc = frame.at(x, y);
            if (!depth_valid(zc)) continue;
            const double zl = frame.at(x - 1, y), zr = frame.at(x + 1, y);
            const double zu = frame.at(x, y - 1), zd = frame.at(x, y + 1);
            if (!depth_valid(zl) || !depth_valid(zr) || !depth_valid(zu) ||
                !depth_valid(zd))
                continue;
            const double jump = 0.05 * zc;
            if (std::abs(zl - zc) > jump || std::abs(zr - zc) > jump ||
                std::abs(zu - zc) > jump || std::abs(zd - zc) > jump)
                continue;

            const Vec3 tx = point(x + 1, y, zr) - point(x - 1, y, zl);
            const Vec3 ty = point(x, y + 1, zd) - point(x, y - 1, zu);
            Vec3 n = tx.cross(ty);
            const double len = n.norm();
            if (len < 1e-12) continue;
            n /= len;
            if (n.dot(point(x, y, zc)) > 0.0) n = -n;  // face the camera
            out.normal[out.index(x, y)] = n;
            out.valid[out.index(x, y)] = 1;
        }
    }
    return out;
}

/// Corrupts a clean frame. Per valid pixel, in order: grazing-incidence
/// dropout (measured between the surface normal and the pixel's view ray;
/// pixels with no normal estimate are kept), lateral jitter re-sampling the
/// clean frame at a Gaussian offset, axial Gaussian noise, disparity
/// quantization. Deterministic in the seed; row-major draw order.
inline DepthFrame add_noise(const DepthFrame& frame, const NormalFrame& normals,
                            const CameraIntrinsics& k, const NoiseParams& params,
                            std::uint64_t seed) {
    params.validate();
    if (normals.width != frame.width || normals.height != frame.height)
        throw std::invalid_argument("noise: normals not registered to frame");

    DepthFrame out = frame;
    Rng rng(mix_seed(seed, 0xd3b7));
    const bool quantize =
        params.baseline > 0.0 && params.disparity_step > 0.0 && k.fx > 0.0;
    const double fb = k.fx * params.baseline;
    const double max_incidence = M_PI / 2.0 - params.grazing_angle;

    // optional stereo-shadow pass: pixels whose surface is occluded from the
    // emitter (displaced by `baseline` along +x) see no pattern
    std::vector<std::uint8_t> shadowed;
    if (params.shadow_dropout && params.baseline > 0.0) {
        shadowed.assign(frame.pixel_count(), 0);
        for (int y = 0; y < frame.height; ++y)
            for (int x = 0; x < frame.width; ++x) {
                const double z = frame.at(x, y);
                if (!depth_valid(z)) continue;
                // project the point into the emitter's (shifted) pinhole
                const Vec3 p = back_project(k, x + 0.5, y + 0.5, z);
                const double ue = k.fx * (p.x() - params.baseline) / p.z() + k.cx;
                const int ex = static_cast<int>(std::floor(ue));
                if (ex < 0 || ex >= frame.width) continue;
                // something nearer on the emitter's ray shadows this pixel
                const double ze = frame.at(ex, y);
                if (depth_valid(ze) && ze < z * 0.99)
                    shadowed[static_cast<std::size_t>(y) * frame.width + x] = 1;
            }
    }

    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const double z0 = frame.at(x, y);
            if (!depth_valid(z0)) continue;

            if (!shadowed.empty() &&
                shadowed[static_cast<std::size_t>(y) * frame.width + x]) {
                out.at(x, y) = kInvalidDepth;
                continue;
            }

            if (params.grazing_angle > 0.0 && normals.is_valid(x, y)) {
                const Vec3 ray = pixel_ray(k, x, y).normalized();
                const Vec3& n = normals.at(x, y);
                const double cos_i =
                    std::min(1.0, std::max(0.0, std::abs(n.dot(ray))));
                if (std::acos(cos_i) > max_incidence) {
                    out.at(x, y) = kInvalidDepth;
                    continue;
                }
            }

            double z = z0;
            if (params.lateral_sigma > 0.0) {
                const long dx = std::lround(rng.normal() * params.lateral_sigma);
                const long dy = std::lround(rng.normal() * params.lateral_sigma);
                const int sx = x + static_cast<int>(dx);
                const int sy = y + static_cast<int>(dy);
                if (!frame.in_bounds(sx, sy) || !depth_valid(frame.at(sx, sy))) {
                    out.at(x, y) = kInvalidDepth;
                    continue;
                }
                z = frame.at(sx, sy);
            }

            const double sigma = params.axial_sigma(z);
            if (sigma < 0.0)
                throw std::invalid_argument("noise: negative axial sigma at z=" +
                                            std::to_string(z));
            if (sigma > 0.0) z += rng.normal() * sigma;

            if (z <= 0.0) {
                out.at(x, y) = kInvalidDepth;
                continue;
            }
            if (quantize) {
                const double disp =
                    std::round(fb / z / params.disparity_step) * params.disparity_step;
                if (disp <= 0.0) {
                    out.at(x, y) = kInvalidDepth;
                    continue;
                }
                z = fb / disp;
            }
            out.at(x, y) = z;
        }
    }
    return out;
}

}  // namespace scenesynth
