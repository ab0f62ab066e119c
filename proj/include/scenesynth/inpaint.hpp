#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scenesynth/image.hpp"

namespace scenesynth {

/// Fills invalid pixels by a colorization-style solve: every invalid pixel
/// becomes a convex combination of its kernel-window neighbors. Valid
/// neighbors are weighted by similarity to the window's valid-depth mean
/// (Gaussian in (z - mean)^2 / (2 max(var, eps))); invalid neighbors get
/// neutral weight 1 and stay coupled through the linear system. Valid
/// pixels are hard constraints and pass through bit-unchanged; the solve
/// obeys the discrete maximum principle, so fills stay inside the range of
/// the valid depths.
inline DepthFrame inpaint(const DepthFrame& frame, int kernel_size = 3) {
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw std::invalid_argument("inpaint: kernel size must be odd and >= 3");
    if (frame.width <= 0 || frame.height <= 0)
        throw std::invalid_argument("inpaint: empty frame");

    const int radius = kernel_size / 2;
    constexpr double kVarFloor = 1e-6;  // squared meters

    std::vector<int> unknown(frame.pixel_count(), -1);
    int n_unknown = 0;
    for (std::size_t i = 0; i < frame.pixel_count(); ++i)
        if (!depth_valid(frame.data[i])) unknown[i] = n_unknown++;
    if (n_unknown == 0) return frame;
    if (static_cast<std::size_t>(n_unknown) == frame.pixel_count())
        throw std::invalid_argument("inpaint: frame has no valid pixels");

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
    std::vector<std::pair<std::size_t, double>> weights;  // (pixel index, w)

    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const int row = unknown[static_cast<std::size_t>(y) * frame.width + x];
            if (row < 0) continue;

            // window statistics over valid neighbors
            double sum = 0.0, sum2 = 0.0;
            int n_valid = 0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (!frame.in_bounds(nx, ny)) continue;
                    const double z = frame.at(nx, ny);
                    if (!depth_valid(z)) continue;
                    sum += z;
                    sum2 += z * z;
                    ++n_valid;
                }
            const double mean = n_valid ? sum / n_valid : 0.0;
            const double var =
                n_valid ? std::max(sum2 / n_valid - mean * mean, 0.0) : 0.0;
            const double denom = 2.0 * std::max(var, kVarFloor);

            weights.clear();
            double total = 0.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (!frame.in_bounds(nx, ny)) continue;
                    const std::size_t ni =
                        static_cast<std::size_t>(ny) * frame.width + nx;
                    const double z = frame.data[ni];
                    const double w =
                        depth_valid(z)
                            ? std::exp(-(z - mean) * (z - mean) / denom)
                            : 1.0;
                    weights.emplace_back(ni, w);
                    total += w;
                }

            trip.emplace_back(row, row, 1.0);
            for (const auto& [ni, w] : weights) {
                const double wn = w / total;
                if (unknown[ni] >= 0)
                    trip.emplace_back(row, unknown[ni], -wn);
                else
                    rhs[row] += wn * frame.data[ni];
            }
        }
    }

    Eigen::SparseMatrix<double> a(n_unknown, n_unknown);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("inpaint: sparse factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("inpaint: sparse solve failed");

    DepthFrame out = frame;
    for (std::size_t i = 0; i < out.pixel_count(); ++i)
        if (unknown[i] >= 0) out.data[i] = x[unknown[i]];
    return out;
}

}  // namespace scenesynth
