#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "scenesynth/image.hpp"

namespace scenesynth {

/// Rows are ground truth, columns predictions; ground-truth background
/// pixels are excluded and tallied separately.
struct ConfusionMatrix {
    int num_classes = 0;
    int background_id = 0;
    std::vector<std::int64_t> counts;  // row-major K*K
    std::int64_t ignored = 0;

    ConfusionMatrix() = default;
    ConfusionMatrix(int k, int background)
        : num_classes(k),
          background_id(background),
          counts(static_cast<std::size_t>(k) * k, 0) {
        if (k < 1 || background < 0 || background >= k)
            throw std::invalid_argument("confusion: bad taxonomy shape");
    }

    std::int64_t& at(int gt, int pred) {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }
    std::int64_t at(int gt, int pred) const {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }

    std::int64_t total_counted() const {
        std::int64_t t = 0;
        for (const auto c : counts) t += c;
        return t;
    }
};

inline void accumulate(const LabelFrame& gt, const LabelFrame& pred,
                       ConfusionMatrix& matrix) {
    if (!gt.same_dims(pred))
        throw std::invalid_argument("metrics: frame dimensions differ");
    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        const int g = gt.data[i], p = pred.data[i];
        if (g >= matrix.num_classes || p >= matrix.num_classes)
            throw std::invalid_argument("metrics: label outside taxonomy");
        if (g == matrix.background_id)
            ++matrix.ignored;
        else
            ++matrix.at(g, p);
    }
}

/// Pure associative merge of two compatible matrices.
inline ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    if (a.num_classes != b.num_classes || a.background_id != b.background_id)
        throw std::invalid_argument("metrics: incompatible matrices");
    ConfusionMatrix out = a;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
    out.ignored += b.ignored;
    return out;
}

/// Fraction of counted pixels on the diagonal.
inline double global_accuracy(const ConfusionMatrix& m) {
    const std::int64_t total = m.total_counted();
    if (total == 0) throw std::invalid_argument("metrics: nothing counted");
    std::int64_t diag = 0;
    for (int i = 0; i < m.num_classes; ++i) diag += m.at(i, i);
    return static_cast<double>(diag) / static_cast<double>(total);
}

struct ClassAccuracy {
    std::vector<std::optional<double>> recall;  // absent for zero-support classes
    double mean = 0.0;
};

/// Per-class recalls and their mean over classes with ground-truth support.
/// The background class never has support (its pixels are ignored).
inline ClassAccuracy class_accuracy(const ConfusionMatrix& m) {
    if (m.total_counted() == 0)
        throw std::invalid_argument("metrics: nothing counted");
    ClassAccuracy out;
    out.recall.resize(m.num_classes);
    double sum = 0.0;
    int supported = 0;
    for (int i = 0; i < m.num_classes; ++i) {
        std::int64_t row = 0;
        for (int j = 0; j < m.num_classes; ++j) row += m.at(i, j);
        if (row == 0) continue;
        out.recall[i] = static_cast<double>(m.at(i, i)) / static_cast<double>(row);
        sum += *out.recall[i];
        ++supported;
    }
    out.mean = supported ? sum / supported : 0.0;
    return out;
}

/// Per-pixel class probability vectors, K contiguous floats per pixel.
struct ProbabilityMap {
    int width = 0;
    int height = 0;
    int num_classes = 0;
    std::vector<double> p;

    ProbabilityMap() = default;
    ProbabilityMap(int w, int h, int k)
        : width(w),
          height(h),
          num_classes(k),
          p(static_cast<std::size_t>(w) * h * k, 0.0) {}

    double* pixel(int x, int y) {
        return p.data() + (static_cast<std::size_t>(y) * width + x) * num_classes;
    }
    const double* pixel(int x, int y) const {
        return p.data() + (static_cast<std::size_t>(y) * width + x) * num_classes;
    }

    void validate() const {
        for (std::size_t i = 0; i < p.size(); i += num_classes) {
            double s = 0.0;
            for (int c = 0; c < num_classes; ++c) {
                if (p[i + c] < 0.0)
                    throw std::invalid_argument("probability map: negative entry");
                s += p[i + c];
            }
            if (std::abs(s - 1.0) > 1e-6)
                throw std::invalid_argument("probability map: pixel does not sum to 1");
        }
    }
};

/// Uncertainty image: second-best probability over best, per pixel. 0 for
/// a one-hot pixel, 1 for a flat distribution (or an exact tie).
inline Image<double> confidence_ratio(const ProbabilityMap& probs) {
    if (probs.num_classes < 2)
        throw std::invalid_argument("confidence ratio: need at least two classes");
    Image<double> out(probs.width, probs.height, 0.0);
    for (int y = 0; y < probs.height; ++y)
        for (int x = 0; x < probs.width; ++x) {
            const double* v = probs.pixel(x, y);
            double best = v[0], second = -1.0;
            for (int c = 1; c < probs.num_classes; ++c) {
                if (v[c] > best) {
                    second = best;
                    best = v[c];
                } else if (v[c] > second) {
                    second = v[c];
                }
            }
            out.at(x, y) = best > 0.0 ? second / best : 1.0;
        }
    return out;
}

}  // namespace scenesynth
