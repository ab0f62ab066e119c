#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "scenesynth/image.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

/// Recommended-distance prior for an unordered class pair. `max_distance`
/// is the distance beyond which placements are penalized; `target_angle`,
/// when set, is the preferred relative yaw of the pair.
struct PairwisePrior {
    int class_a = 0;  // canonical: class_a <= class_b
    int class_b = 0;
    double max_distance = 1.0;
    std::optional<double> target_angle;
    double weight = 1.0;

    void canonicalize() {
        if (class_a > class_b) std::swap(class_a, class_b);
    }

    void validate() const {
        if (!(max_distance > 0.0))
            throw std::invalid_argument("pairwise prior: max distance must be > 0");
        if (weight < 0.0)
            throw std::invalid_argument("pairwise prior: weight must be >= 0");
    }
};

/// Wall-resting prior for one class: preferred distance to and orientation
/// against the nearest wall.
struct WallPrior {
    int class_id = 0;
    double target_distance = 0.0;
    double target_angle = 0.0;
    double weight_distance = 1.0;
    double weight_angle = 0.5;

    void validate() const {
        if (target_distance < 0.0)
            throw std::invalid_argument("wall prior: target distance must be >= 0");
        if (weight_distance < 0.0 || weight_angle < 0.0)
            throw std::invalid_argument("wall prior: weights must be >= 0");
    }
};

/// Symmetric class co-occurrence counts over a scene corpus.
struct CoOccurrenceMatrix {
    int num_classes = 0;
    std::vector<std::int64_t> counts;  // row-major K*K

    CoOccurrenceMatrix() = default;
    explicit CoOccurrenceMatrix(int k)
        : num_classes(k), counts(static_cast<std::size_t>(k) * k, 0) {}

    std::int64_t& at(int i, int j) {
        return counts[static_cast<std::size_t>(i) * num_classes + j];
    }
    std::int64_t at(int i, int j) const {
        return counts[static_cast<std::size_t>(i) * num_classes + j];
    }

    /// Row-stochastic normalization; rows with zero total stay zero.
    std::vector<std::vector<double>> row_normalized() const {
        std::vector<std::vector<double>> out(num_classes,
                                             std::vector<double>(num_classes, 0.0));
        for (int i = 0; i < num_classes; ++i) {
            std::int64_t total = 0;
            for (int j = 0; j < num_classes; ++j) total += at(i, j);
            if (total == 0) continue;
            for (int j = 0; j < num_classes; ++j)
                out[i][j] = static_cast<double>(at(i, j)) / static_cast<double>(total);
        }
        return out;
    }
};

/// Linear-interpolated percentile (the numpy "linear" rule): rank
/// p*(n-1) interpolated between order statistics. `p` in [0, 1].
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

/// Layout-level co-occurrence: counts[i][j] (i != j) is the number of
/// layouts containing at least one instance of each class; the diagonal
/// counts layouts with two or more instances of the class.
inline CoOccurrenceMatrix cooccurrence_from_layouts(
    const std::vector<SceneLayout>& layouts, int num_classes) {
    if (layouts.empty())
        throw std::invalid_argument("cooccurrence: empty layout list");
    CoOccurrenceMatrix m(num_classes);
    std::vector<int> instances(num_classes);
    for (const auto& layout : layouts) {
        std::fill(instances.begin(), instances.end(), 0);
        for (const auto& obj : layout.objects) {
            if (obj.class_id < 0 || obj.class_id >= num_classes)
                throw std::invalid_argument("cooccurrence: class id out of range");
            ++instances[obj.class_id];
        }
        for (int i = 0; i < num_classes; ++i) {
            if (instances[i] == 0) continue;
            if (instances[i] >= 2) ++m.at(i, i);
            for (int j = i + 1; j < num_classes; ++j) {
                if (instances[j] == 0) continue;
                ++m.at(i, j);
                ++m.at(j, i);
            }
        }
    }
    return m;
}

/// Estimates pairwise max-distance priors from a corpus: for every class
/// pair co-occurring in at least `min_support` layouts, M is the 90th
/// percentile of observed center distances between instances of the pair.
inline std::vector<PairwisePrior> pairwise_priors_from_layouts(
    const std::vector<SceneLayout>& layouts, int num_classes, int min_support,
    double percentile_p = 0.9) {
    if (min_support < 1)
        throw std::invalid_argument("pairwise priors: min support must be >= 1");
    const CoOccurrenceMatrix co = cooccurrence_from_layouts(layouts, num_classes);

    std::map<std::pair<int, int>, std::vector<double>> distances;
    for (const auto& layout : layouts) {
        const auto& objs = layout.objects;
        for (std::size_t i = 0; i < objs.size(); ++i)
            for (std::size_t j = i + 1; j < objs.size(); ++j) {
                const int a = std::min(objs[i].class_id, objs[j].class_id);
                const int b = std::max(objs[i].class_id, objs[j].class_id);
                if (co.at(a, b) < min_support) continue;
                distances[{a, b}].push_back(center_distance(objs[i], objs[j]));
            }
    }

    std::vector<PairwisePrior> out;
    for (auto& [pair, dists] : distances) {
        PairwisePrior p;
        p.class_a = pair.first;
        p.class_b = pair.second;
        p.max_distance = percentile(std::move(dists), percentile_p);
        if (p.max_distance <= 0.0) continue;  // coincident-only observations
        out.push_back(p);
    }
    return out;
}

/// Per-class pixel proportions over a frame set, excluding background.
/// Proportions sum to 1 over the labelled pixels.
inline std::vector<double> class_frequency(const std::vector<LabelFrame>& frames,
                                           int num_classes, int background_id) {
    std::vector<std::int64_t> counts(num_classes, 0);
    std::int64_t total = 0;
    for (const auto& f : frames)
        for (const auto px : f.data) {
            if (px >= num_classes)
                throw std::invalid_argument("class frequency: label out of range");
            if (px == background_id) continue;
            ++counts[px];
            ++total;
        }
    if (total == 0)
        throw std::invalid_argument("class frequency: no labelled pixels");
    std::vector<double> out(num_classes, 0.0);
    for (int i = 0; i < num_classes; ++i)
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return out;
}

}  // namespace scenesynth
