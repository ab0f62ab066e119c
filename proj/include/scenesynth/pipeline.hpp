#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "scenesynth/anneal.hpp"
#include "scenesynth/dha.hpp"
#include "scenesynth/inpaint.hpp"
#include "scenesynth/json_io.hpp"
#include "scenesynth/png_io.hpp"
#include "scenesynth/rasterize.hpp"
#include "scenesynth/sensor.hpp"
#include "scenesynth/viewpoints.hpp"

namespace scenesynth {

struct ViewpointConfig {
    int min_visible_classes = 2;
    ViewpointOptions options;
};

struct ArrangeConfig {
    bool enabled = true;
    bool hierarchical = false;  // per-group phase first when groups are present
    bool scatter = true;        // randomize poses before optimizing
};

/// Everything `gen` needs: input files plus inline stage parameters. Class
/// names are resolved against the taxonomy; structural surfaces come from
/// the classes named "floor", "wall" and (optionally) "ceiling".
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string taxonomy_path;
    std::string constraints_path;
    std::string layout_path;
    std::string output_dir;
    int frames = 1;
    AnnealSchedule schedule;
    CameraIntrinsics intrinsics;
    ViewpointConfig viewpoints;
    NoiseParams noise;
    int inpaint_kernel = 3;
    double floor_height = 0.0;
    ArrangeConfig arrange;
    int workers = 0;  // 0 = one per hardware thread

    void validate() const {
        namespace fs = std::filesystem;
        if (frames < 1) throw std::invalid_argument("config: frames must be >= 1");
        if (output_dir.empty()) throw std::invalid_argument("config: output dir missing");
        for (const auto* p : {&taxonomy_path, &constraints_path, &layout_path}) {
            if (p->empty()) throw std::invalid_argument("config: input path missing");
            if (!fs::exists(*p))
                throw std::invalid_argument("config: no such file: " + *p);
        }
        schedule.validate();
        intrinsics.validate();
        noise.validate();
        if (inpaint_kernel < 3 || inpaint_kernel % 2 == 0)
            throw std::invalid_argument("config: inpaint kernel must be odd and >= 3");
    }
};

inline json pipeline_config_to_json(const PipelineConfig& c) {
    return json{{"seed", c.seed},
                {"taxonomy", c.taxonomy_path},
                {"constraints", c.constraints_path},
                {"layout", c.layout_path},
                {"output", c.output_dir},
                {"frames", c.frames},
                {"schedule", schedule_to_json(c.schedule)},
                {"intrinsics", intrinsics_to_json(c.intrinsics)},
                {"viewpoints",
                 {{"min_visible_classes", c.viewpoints.min_visible_classes},
                  {"min_height", c.viewpoints.options.min_height},
                  {"max_height", c.viewpoints.options.max_height},
                  {"min_pitch", c.viewpoints.options.min_pitch},
                  {"max_pitch", c.viewpoints.options.max_pitch},
                  {"trials_per_pose", c.viewpoints.options.trials_per_pose}}},
                {"noise", noise_to_json(c.noise)},
                {"inpaint_kernel", c.inpaint_kernel},
                {"floor_height", c.floor_height},
                {"arrange",
                 {{"enabled", c.arrange.enabled},
                  {"hierarchical", c.arrange.hierarchical},
                  {"scatter", c.arrange.scatter}}},
                {"workers", c.workers}};
}

inline PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig c;
    if (!j.contains("seed"))
        throw std::invalid_argument("config: seed is required");
    c.seed = j["seed"].get<std::uint64_t>();
    c.taxonomy_path = j.value("taxonomy", "");
    c.constraints_path = j.value("constraints", "");
    c.layout_path = j.value("layout", "");
    c.output_dir = j.value("output", "");
    c.frames = j.value("frames", 1);
    if (j.contains("schedule")) c.schedule = schedule_from_json(j["schedule"]);
    if (j.contains("intrinsics")) c.intrinsics = intrinsics_from_json(j["intrinsics"]);
    if (j.contains("viewpoints")) {
        const auto& v = j["viewpoints"];
        c.viewpoints.min_visible_classes =
            v.value("min_visible_classes", c.viewpoints.min_visible_classes);
        c.viewpoints.options.min_height =
            v.value("min_height", c.viewpoints.options.min_height);
        c.viewpoints.options.max_height =
            v.value("max_height", c.viewpoints.options.max_height);
        c.viewpoints.options.min_pitch =
            v.value("min_pitch", c.viewpoints.options.min_pitch);
        c.viewpoints.options.max_pitch =
            v.value("max_pitch", c.viewpoints.options.max_pitch);
        c.viewpoints.options.trials_per_pose =
            v.value("trials_per_pose", c.viewpoints.options.trials_per_pose);
    }
    if (j.contains("noise")) c.noise = noise_from_json(j["noise"]);
    c.inpaint_kernel = j.value("inpaint_kernel", 3);
    c.floor_height = j.value("floor_height", 0.0);
    if (j.contains("arrange")) {
        const auto& a = j["arrange"];
        c.arrange.enabled = a.value("enabled", true);
        c.arrange.hierarchical = a.value("hierarchical", false);
        c.arrange.scatter = a.value("scatter", true);
    }
    c.workers = j.value("workers", 0);
    return c;
}

namespace detail {

inline std::string frame_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", i);
    return buf;
}

template <typename Fn>
auto run_stage(const char* stage, int frame, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error("gen: stage " + std::string(stage) + " failed at frame " +
                                 std::to_string(frame) + ": " + e.what());
    }
}

}  // namespace detail

/// Full pipeline: arrange -> sample viewpoints -> per frame render, corrupt,
/// inpaint, encode. Writes depth_clean/, depth_noisy/, depth_inpainted/,
/// labels/ (16-bit mm or paletted PNGs, %06d), dha/%06d.bin, poses.txt,
/// layout.json and manifest.json under the output directory, then returns
/// the manifest. Deterministic given the config: frame i draws from the
/// seed stream 1000 + i regardless of worker count.
inline json generate_dataset(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    cfg.validate();

    const ClassTaxonomy taxonomy = taxonomy_from_json(load_json(cfg.taxonomy_path));
    const ConstraintSet constraints =
        constraints_from_json(load_json(cfg.constraints_path), taxonomy);
    SceneLayout layout = layout_from_json(load_json(cfg.layout_path), taxonomy);

    for (const auto* required : {"floor", "wall"})
        if (!taxonomy.has(required))
            throw std::invalid_argument(std::string("gen: taxonomy must name a '") +
                                        required + "' class");
    const int floor_class = taxonomy.id("floor");
    const int wall_class = taxonomy.id("wall");
    const int ceiling_class = taxonomy.has("ceiling") ? taxonomy.id("ceiling") : -1;
    const auto background = static_cast<std::uint8_t>(taxonomy.background_id());

    if (cfg.arrange.enabled) {
        if (cfg.arrange.scatter) layout = scatter_layout(layout, mix_seed(cfg.seed, 10));
        const AnnealResult arranged =
            (cfg.arrange.hierarchical && layout.groups.size() > 1)
                ? anneal_hierarchical(layout, constraints, cfg.schedule,
                                      mix_seed(cfg.seed, 11))
                : anneal(layout, constraints, cfg.schedule, mix_seed(cfg.seed, 11));
        layout = arranged.best_layout;
    }

    const std::vector<TriMesh> meshes =
        assemble_scene_meshes(layout, floor_class, wall_class, ceiling_class);
    std::set<int> structural{taxonomy.background_id(), floor_class, wall_class};
    if (ceiling_class >= 0) structural.insert(ceiling_class);

    const std::vector<CameraPose> poses = sample_viewpoints(
        meshes, layout, cfg.intrinsics, cfg.frames, cfg.viewpoints.min_visible_classes,
        mix_seed(cfg.seed, 12), structural, background, cfg.viewpoints.options);

    const fs::path out(cfg.output_dir);
    for (const auto* dir :
         {"depth_clean", "depth_noisy", "depth_inpainted", "labels", "dha"})
        fs::create_directories(out / dir);
    write_poses((out / "poses.txt").string(), poses);
    save_json((out / "layout.json").string(), layout_to_json(layout, taxonomy));

    auto process_frame = [&](int i) {
        const std::string name = detail::frame_name(i);
        const CameraIntrinsics& k = cfg.intrinsics;
        const FramePair frame = detail::run_stage(
            "render", i, [&] { return rasterize(meshes, poses[i], k, background); });
        const NormalFrame normals = detail::run_stage(
            "normals", i, [&] { return estimate_normals(frame.depth, k); });
        const DepthFrame noisy = detail::run_stage("corrupt", i, [&] {
            return add_noise(frame.depth, normals, k, cfg.noise,
                             mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i)));
        });
        const DepthFrame filled = detail::run_stage(
            "inpaint", i, [&] { return inpaint(noisy, cfg.inpaint_kernel); });
        const DhaFrame dha = detail::run_stage("encode", i, [&] {
            return encode_dha(filled, poses[i], k, cfg.floor_height);
        });
        detail::run_stage("write", i, [&] {
            write_depth_png((out / "depth_clean" / (name + ".png")).string(), frame.depth);
            write_depth_png((out / "depth_noisy" / (name + ".png")).string(), noisy);
            write_depth_png((out / "depth_inpainted" / (name + ".png")).string(), filled);
            write_label_png((out / "labels" / (name + ".png")).string(), frame.label);
            write_dha((out / "dha" / (name + ".bin")).string(), dha);
            return 0;
        });
    };

    const int workers =
        cfg.workers > 0
            ? cfg.workers
            : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    if (workers == 1 || cfg.frames == 1) {
        for (int i = 0; i < cfg.frames; ++i) process_frame(i);
    } else {
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        int first_error_frame = std::numeric_limits<int>::max();
        auto worker = [&] {
            for (int i = next.fetch_add(1); i < cfg.frames; i = next.fetch_add(1)) {
                try {
                    process_frame(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (i < first_error_frame) {
                        first_error_frame = i;
                        first_error = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min(workers, cfg.frames); ++w)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // the hash fingerprints the content-determining fields only: where the
    // dataset lands and how many workers wrote it change no pixel
    json fingerprint = pipeline_config_to_json(cfg);
    fingerprint.erase("output");
    fingerprint.erase("workers");
    json manifest{{"frames", cfg.frames},
                  {"seed", cfg.seed},
                  {"config_hash", config_hash(fingerprint)},
                  {"width", cfg.intrinsics.width},
                  {"height", cfg.intrinsics.height},
                  {"classes", taxonomy.names()},
                  {"background", taxonomy.name(taxonomy.background_id())},
                  {"artifacts",
                   {{"depth_clean", "depth_clean/%06d.png"},
                    {"depth_noisy", "depth_noisy/%06d.png"},
                    {"depth_inpainted", "depth_inpainted/%06d.png"},
                    {"labels", "labels/%06d.png"},
                    {"dha", "dha/%06d.bin"},
                    {"poses", "poses.txt"},
                    {"layout", "layout.json"}}}};
    save_json((out / "manifest.json").string(), manifest);
    return manifest;
}

}  // namespace scenesynth
