#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenesynth/scenesynth.hpp"

namespace fs = std::filesystem;
using namespace scenesynth;

namespace {

struct StructuralIds {
    int floor_class;
    int wall_class;
    int ceiling_class;  // -1 when the taxonomy has no ceiling
};

StructuralIds structural_ids(const ClassTaxonomy& taxonomy) {
    for (const auto* required : {"floor", "wall"})
        if (!taxonomy.has(required))
            throw std::runtime_error(std::string("taxonomy must name a '") + required +
                                     "' class");
    return {taxonomy.id("floor"), taxonomy.id("wall"),
            taxonomy.has("ceiling") ? taxonomy.id("ceiling") : -1};
}

std::vector<fs::path> png_files(const std::string& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw std::runtime_error("no .png files in " + dir);
    return out;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump() << "\n";
    else
        save_json(out_path, j);
}

void add_arrange(CLI::App& app) {
    auto* cmd = app.add_subcommand("arrange", "Optimize an object layout");
    struct ArrangeOpts {
        std::string layout, constraints, taxonomy, schedule, out, trace;
        std::uint64_t seed = 0;
        double t0 = 0.0, cool = 0.0;
        int steps = 0;
        bool hierarchical = false;
        bool scatter = false;
        std::vector<std::string> disabled;
    };
    auto opt = std::make_shared<ArrangeOpts>();
    cmd->add_option("--layout", opt->layout, "Input layout JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--constraints", opt->constraints, "Constraint set JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--taxonomy", opt->taxonomy, "Class taxonomy JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--schedule", opt->schedule, "Annealing schedule JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt->seed, "Random seed");
    auto* t0_opt = cmd->add_option("--t0", opt->t0, "Initial temperature (0 = auto)");
    auto* cool_opt = cmd->add_option("--cool", opt->cool, "Geometric cooling factor");
    auto* steps_opt = cmd->add_option("--steps", opt->steps, "Steps per temperature");
    cmd->add_option("--out", opt->out, "Arranged layout JSON")->required();
    cmd->add_option("--trace", opt->trace, "Energy trace CSV (iteration,energy)");
    cmd->add_flag("--hierarchical", opt->hierarchical,
                  "Per-group phase before the rigid-group phase");
    cmd->add_flag("--scatter", opt->scatter, "Randomize poses before optimizing");
    cmd->add_option("--disable", opt->disabled,
                    "Drop term families: pairwise, visibility, wall, pair-angle")
        ->delimiter(',');
    cmd->callback([opt, t0_opt, cool_opt, steps_opt] {
        const ClassTaxonomy taxonomy = taxonomy_from_json(load_json(opt->taxonomy));
        ConstraintSet constraints =
            constraints_from_json(load_json(opt->constraints), taxonomy);
        SceneLayout layout = layout_from_json(load_json(opt->layout), taxonomy);
        AnnealSchedule schedule = opt->schedule.empty()
                                      ? AnnealSchedule{}
                                      : schedule_from_json(load_json(opt->schedule));
        if (t0_opt->count()) schedule.initial_temperature = opt->t0;
        if (cool_opt->count()) schedule.cooling_factor = opt->cool;
        if (steps_opt->count()) schedule.steps_per_temperature = opt->steps;
        for (const auto& term : opt->disabled) {
            if (term == "pairwise") constraints.mask.pairwise = false;
            else if (term == "visibility") constraints.mask.visibility = false;
            else if (term == "wall") constraints.mask.wall = false;
            else if (term == "pair-angle" || term == "pair_angle")
                constraints.mask.pair_angle = false;
            else throw std::runtime_error("unknown term '" + term + "'");
        }
        if (opt->scatter) layout = scatter_layout(layout, opt->seed);
        const AnnealResult result =
            (opt->hierarchical && layout.groups.size() > 1)
                ? anneal_hierarchical(layout, constraints, schedule, opt->seed)
                : anneal(layout, constraints, schedule, opt->seed);
        save_json(opt->out, layout_to_json(result.best_layout, taxonomy));
        if (!opt->trace.empty()) {
            std::ofstream csv(opt->trace);
            if (!csv) throw std::runtime_error("cannot write " + opt->trace);
            csv << "iteration,energy\n" << std::setprecision(17);
            for (const auto& [iter, energy] : result.trace)
                csv << iter << "," << energy << "\n";
        }
        const EnergyBreakdown e = total_energy(result.best_layout, constraints);
        std::cout << json{{"seed", opt->seed},
                          {"energy", e.total},
                          {"bbox", e.bbox},
                          {"feasible", result.feasible}}
                         .dump()
                  << "\n";
    });
}

void add_render(CLI::App& app) {
    auto* cmd = app.add_subcommand("render", "Rasterize depth and label frames");
    struct RenderOpts {
        std::string layout, taxonomy, poses, intrinsics, out;
    };
    auto opt = std::make_shared<RenderOpts>();
    cmd->add_option("--layout", opt->layout, "Layout JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--taxonomy", opt->taxonomy, "Class taxonomy JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--poses", opt->poses, "Trajectory file (tx ty tz qx qy qz qw)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--intrinsics", opt->intrinsics, "Camera intrinsics JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt->out, "Output directory")->required();
    cmd->callback([opt] {
        const ClassTaxonomy taxonomy = taxonomy_from_json(load_json(opt->taxonomy));
        const SceneLayout layout = layout_from_json(load_json(opt->layout), taxonomy);
        const CameraIntrinsics k = opt->intrinsics.empty()
                                       ? CameraIntrinsics{}
                                       : intrinsics_from_json(load_json(opt->intrinsics));
        const StructuralIds s = structural_ids(taxonomy);
        const auto meshes =
            assemble_scene_meshes(layout, s.floor_class, s.wall_class, s.ceiling_class);
        const auto poses = read_poses(opt->poses);
        if (poses.empty()) throw std::runtime_error("trajectory is empty");
        const auto background = static_cast<std::uint8_t>(taxonomy.background_id());
        fs::create_directories(fs::path(opt->out) / "depth");
        fs::create_directories(fs::path(opt->out) / "labels");
        for (std::size_t i = 0; i < poses.size(); ++i) {
            const FramePair frame = rasterize(meshes, poses[i], k, background);
            char name[16];
            std::snprintf(name, sizeof(name), "%06zu", i);
            write_depth_png((fs::path(opt->out) / "depth" / (std::string(name) + ".png"))
                                .string(),
                            frame.depth);
            write_label_png((fs::path(opt->out) / "labels" / (std::string(name) + ".png"))
                                .string(),
                            frame.label);
        }
        std::cout << json{{"frames", poses.size()}}.dump() << "\n";
    });
}

void add_corrupt(CLI::App& app) {
    auto* cmd = app.add_subcommand("corrupt", "Apply the depth sensor noise model");
    struct CorruptOpts {
        std::string depth, intrinsics, noise, out, inpainted;
        std::uint64_t seed = 0;
        int kernel = 3;
    };
    auto opt = std::make_shared<CorruptOpts>();
    cmd->add_option("--depth", opt->depth, "Clean depth PNG (16-bit mm)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--intrinsics", opt->intrinsics, "Camera intrinsics JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--params", opt->noise, "Noise parameters JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt->seed, "Random seed");
    cmd->add_option("--out", opt->out, "Noisy depth PNG")->required();
    cmd->add_option("--inpainted", opt->inpainted, "Also write an inpainted copy here");
    cmd->add_option("--inpaint-kernel", opt->kernel, "Inpainting window size (odd)");
    cmd->callback([opt] {
        const CameraIntrinsics k = opt->intrinsics.empty()
                                       ? CameraIntrinsics{}
                                       : intrinsics_from_json(load_json(opt->intrinsics));
        const NoiseParams params =
            opt->noise.empty() ? NoiseParams{} : noise_from_json(load_json(opt->noise));
        const DepthFrame frame = read_depth_png(opt->depth);
        const NormalFrame normals = estimate_normals(frame, k);
        const DepthFrame noisy = add_noise(frame, normals, k, params, opt->seed);
        write_depth_png(opt->out, noisy);
        std::size_t invalid = 0;
        for (const double z : noisy.data)
            if (!depth_valid(z)) ++invalid;
        if (!opt->inpainted.empty())
            write_depth_png(opt->inpainted, inpaint(noisy, opt->kernel));
        std::cout << json{{"invalid_pixels", invalid}}.dump() << "\n";
    });
}

void add_encode(CLI::App& app) {
    auto* cmd = app.add_subcommand("encode", "Encode a depth frame into DHA channels");
    struct EncodeOpts {
        std::string depth, poses, intrinsics, out, preview;
        int frame_index = 0;
        double floor_height = 0.0;
    };
    auto opt = std::make_shared<EncodeOpts>();
    cmd->add_option("--depth", opt->depth, "Depth PNG (16-bit mm)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--poses", opt->poses, "Trajectory file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--frame-index", opt->frame_index, "Pose line for this frame");
    cmd->add_option("--intrinsics", opt->intrinsics, "Camera intrinsics JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--floor-height", opt->floor_height, "World z of the floor plane");
    cmd->add_option("--out", opt->out, "Output .bin")->required();
    cmd->add_option("--preview", opt->preview,
                    "Also write 16-bit PNG previews (mm / mm / centidegrees) here");
    cmd->callback([opt] {
        const CameraIntrinsics k = opt->intrinsics.empty()
                                       ? CameraIntrinsics{}
                                       : intrinsics_from_json(load_json(opt->intrinsics));
        const auto poses = read_poses(opt->poses);
        if (opt->frame_index < 0 || opt->frame_index >= static_cast<int>(poses.size()))
            throw std::runtime_error("frame index outside trajectory");
        const DepthFrame frame = read_depth_png(opt->depth);
        const DhaFrame dha =
            encode_dha(frame, poses[opt->frame_index], k, opt->floor_height);
        write_dha(opt->out, dha);
        if (!opt->preview.empty()) {
            fs::create_directories(opt->preview);
            auto plane = [&](const std::vector<double>& src, double scale) {
                DepthFrame img(dha.width, dha.height, 0.0);
                for (std::size_t i = 0; i < src.size(); ++i)
                    img.data[i] = std::max(0.0, src[i]) * scale;
                return img;
            };
            write_depth_png((fs::path(opt->preview) / "depth.png").string(),
                            plane(dha.depth, 1.0));
            write_depth_png((fs::path(opt->preview) / "height.png").string(),
                            plane(dha.elevation, 1.0));
            write_depth_png((fs::path(opt->preview) / "angle.png").string(),
                            plane(dha.angle_deg, 0.1));
        }
        std::cout << json{{"written", opt->out}}.dump() << "\n";
    });
}

void add_stats(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "stats", "Mine priors from layouts or report label frequencies");
    struct StatsOpts {
        std::string taxonomy, labels, out;
        std::vector<std::string> layouts;
        int min_support = 1;
        double pct = 0.9;
    };
    auto opt = std::make_shared<StatsOpts>();
    cmd->add_option("--taxonomy", opt->taxonomy, "Class taxonomy JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--layouts", opt->layouts, "Layout JSON files to mine")
        ->check(CLI::ExistingFile);
    cmd->add_option("--labels", opt->labels, "Directory of label PNGs")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--min-support", opt->min_support,
                    "Co-occurrence count needed to emit a pairwise prior");
    cmd->add_option("--percentile", opt->pct, "Distance percentile for max_distance");
    cmd->add_option("--out", opt->out, "Write the report here instead of stdout");
    cmd->callback([opt] {
        const ClassTaxonomy taxonomy = taxonomy_from_json(load_json(opt->taxonomy));
        if (opt->layouts.empty() == opt->labels.empty())
            throw std::runtime_error("stats: pass exactly one of --layouts / --labels");
        if (!opt->labels.empty()) {
            std::vector<LabelFrame> frames;
            for (const auto& p : png_files(opt->labels))
                frames.push_back(read_label_png(p.string()));
            const auto freq =
                class_frequency(frames, taxonomy.size(), taxonomy.background_id());
            json rep;
            for (int i = 0; i < taxonomy.size(); ++i) rep[taxonomy.name(i)] = freq[i];
            emit(json{{"frequency", rep}}, opt->out);
            return;
        }
        std::vector<SceneLayout> layouts;
        for (const auto& p : opt->layouts)
            layouts.push_back(layout_from_json(load_json(p), taxonomy));
        const auto co = cooccurrence_from_layouts(layouts, taxonomy.size());
        const auto priors = pairwise_priors_from_layouts(
            layouts, taxonomy.size(), opt->min_support, opt->pct);
        json jp = json::array();
        for (const auto& p : priors)
            jp.push_back({{"classes", {taxonomy.name(p.class_a), taxonomy.name(p.class_b)}},
                          {"max_distance", p.max_distance},
                          {"weight", p.weight}});
        json jc = json::array();
        for (int i = 0; i < co.num_classes; ++i) {
            json row = json::array();
            for (int j = 0; j < co.num_classes; ++j) row.push_back(co.at(i, j));
            jc.push_back(row);
        }
        emit(json{{"pairwise", jp}, {"cooccurrence", jc}}, opt->out);
    });
}

void add_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Score predicted labels against ground truth");
    struct EvalOpts {
        std::string gt, pred, taxonomy, out;
    };
    auto opt = std::make_shared<EvalOpts>();
    cmd->add_option("--gt", opt->gt, "Ground-truth label PNG or directory")
        ->required()
        ->check(CLI::ExistingPath);
    cmd->add_option("--pred", opt->pred, "Predicted label PNG or directory")
        ->required()
        ->check(CLI::ExistingPath);
    cmd->add_option("--taxonomy", opt->taxonomy, "Class taxonomy JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt->out, "Write the report here instead of stdout");
    cmd->callback([opt] {
        const ClassTaxonomy taxonomy = taxonomy_from_json(load_json(opt->taxonomy));
        ConfusionMatrix m(taxonomy.size(), taxonomy.background_id());
        if (fs::is_directory(opt->gt) != fs::is_directory(opt->pred))
            throw std::runtime_error("eval: --gt and --pred must both be files or dirs");
        if (fs::is_directory(opt->gt)) {
            std::map<std::string, fs::path> preds;
            for (const auto& p : png_files(opt->pred)) preds[p.filename().string()] = p;
            int matched = 0;
            for (const auto& g : png_files(opt->gt)) {
                const auto it = preds.find(g.filename().string());
                if (it == preds.end()) continue;
                accumulate(read_label_png(g.string()), read_label_png(it->second.string()),
                           m);
                ++matched;
            }
            if (matched == 0)
                throw std::runtime_error("eval: no prediction matches ground truth names");
        } else {
            accumulate(read_label_png(opt->gt), read_label_png(opt->pred), m);
        }
        const ClassAccuracy ca = class_accuracy(m);
        json per;
        for (int i = 0; i < taxonomy.size(); ++i)
            if (ca.recall[i]) per[taxonomy.name(i)] = *ca.recall[i];
        emit(json{{"global", global_accuracy(m)},
                  {"class_mean", ca.mean},
                  {"per_class", per},
                  {"ignored_pixels", m.ignored}},
             opt->out);
    });
}

void add_gen(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen", "Run the full dataset pipeline");
    struct GenOpts {
        std::string config, output, layout, taxonomy, constraints;
        std::uint64_t seed = 0;
        int frames = 0;
        int workers = -1;
    };
    auto opt = std::make_shared<GenOpts>();
    cmd->add_option("--config", opt->config, "Pipeline config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    auto* seed_opt = cmd->add_option("--seed", opt->seed, "Override the config seed");
    auto* frames_opt =
        cmd->add_option("--frames", opt->frames, "Override the frame count");
    auto* output_opt =
        cmd->add_option("--output", opt->output, "Override the output directory");
    auto* layout_opt = cmd->add_option("--layout", opt->layout, "Override the layout");
    auto* taxonomy_opt =
        cmd->add_option("--taxonomy", opt->taxonomy, "Override the taxonomy");
    auto* constraints_opt =
        cmd->add_option("--constraints", opt->constraints, "Override the constraints");
    auto* workers_opt =
        cmd->add_option("--workers", opt->workers, "Worker threads (0 = auto)");
    cmd->callback([opt, seed_opt, frames_opt, output_opt, layout_opt, taxonomy_opt,
                   constraints_opt, workers_opt] {
        PipelineConfig cfg = pipeline_config_from_json(load_json(opt->config));
        if (seed_opt->count()) cfg.seed = opt->seed;
        if (frames_opt->count()) cfg.frames = opt->frames;
        if (output_opt->count()) cfg.output_dir = opt->output;
        if (layout_opt->count()) cfg.layout_path = opt->layout;
        if (taxonomy_opt->count()) cfg.taxonomy_path = opt->taxonomy;
        if (constraints_opt->count()) cfg.constraints_path = opt->constraints;
        if (workers_opt->count()) cfg.workers = opt->workers;
        std::cout << generate_dataset(cfg).dump() << "\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenesynth: arrange indoor scenes, render labelled depth, "
                 "simulate sensor noise and encode training channels"};
    app.require_subcommand(1);
    add_arrange(app);
    add_render(app);
    add_corrupt(app);
    add_encode(app);
    add_stats(app);
    add_eval(app);
    add_gen(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
