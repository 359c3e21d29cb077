// Command-line pipeline: scene synthesis, training-data generation, model
// training, surface reconstruction, semantic labeling, evaluation, and the
// ablation grid.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "rangeudf/checkpoint.hpp"
#include "rangeudf/extraction.hpp"
#include "rangeudf/metrics.hpp"
#include "rangeudf/scenes.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rangeudf;

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ValidationError("unknown key '" + it.key() + "' in " + what);
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("invalid JSON in '" + path + "': " + e.what());
    }
}

struct RunConfig {
    TrainConfig train;
    std::string scenes_dir;
    std::string out_checkpoint = "model.ruck";
    std::string loss_csv;
    int threads = 0;
};

RunConfig parse_run_config(const json& j) {
    reject_unknown_keys(
        j,
        {"seed", "scenes_dir", "out_checkpoint", "loss_csv", "epochs", "batch_scenes",
         "queries_per_scene", "surface_points", "k_neighbors", "encoder_neighbors", "lr", "clamp",
         "uncertainty", "semantic", "label_fraction", "no_range_term", "sem_with_q",
         "checkpoint_every", "threads"},
        "run config");
    RunConfig rc;
    TrainConfig& c = rc.train;
    c.seed = j.value("seed", std::uint64_t{0});
    c.epochs = j.value("epochs", 10);
    c.batch_scenes = j.value("batch_scenes", 4);
    c.queries_per_scene = j.value("queries_per_scene", 2048);
    c.surface_points = j.value("surface_points", 1024);
    c.k_neighbors = j.value("k_neighbors", 4);
    c.encoder_neighbors = j.value("encoder_neighbors", 8);
    c.lr = j.value("lr", 1e-3f);
    c.clamp = j.value("clamp", 0.1f);
    c.uncertainty = j.value("uncertainty", true);
    c.semantic = j.value("semantic", true);
    c.label_fraction = j.value("label_fraction", 1.0);
    c.ablation.no_range_term = j.value("no_range_term", false);
    c.ablation.sem_with_q = j.value("sem_with_q", false);
    c.checkpoint_every = j.value("checkpoint_every", 0);
    rc.scenes_dir = j.value("scenes_dir", std::string{});
    rc.out_checkpoint = j.value("out_checkpoint", std::string{"model.ruck"});
    rc.loss_csv = j.value("loss_csv", std::string{});
    rc.threads = j.value("threads", 0);
    c.checkpoint_path = rc.out_checkpoint;
    c.validate();
    if (rc.scenes_dir.empty()) throw ValidationError("run config: scenes_dir is required");
    return rc;
}

std::vector<std::string> sorted_scene_meshes(const std::string& dir) {
    std::vector<std::string> meshes;
    if (!fs::is_directory(dir)) throw IoError("scene directory '" + dir + "' does not exist");
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto p = entry.path();
        if (p.extension() == ".ply" || p.extension() == ".obj") meshes.push_back(p.string());
    }
    std::sort(meshes.begin(), meshes.end());
    if (meshes.empty()) throw ValidationError("no .ply/.obj scenes in '" + dir + "'");
    return meshes;
}

std::vector<SceneRecord> load_scene_dir(const std::string& dir, const TrainConfig& cfg) {
    std::vector<SceneRecord> scenes;
    auto meshes = sorted_scene_meshes(dir);
    for (size_t i = 0; i < meshes.size(); ++i) {
        SceneRecord rec;
        rec.mesh = load_mesh(meshes[i]);
        fs::path qpath = fs::path(meshes[i]).replace_extension(".ruqs");
        if (!fs::exists(qpath))
            throw IoError("missing query set '" + qpath.string() + "' for scene '" + meshes[i] + "'");
        rec.queries = read_query_set(qpath.string());
        rec.scene_id = i;
        rec.encoder_seed = derive_seed(cfg.seed, i ^ 0x5ce9e5ull);
        auto cloud = sample_surface(rec.mesh, cfg.surface_points, derive_seed(cfg.seed, i ^ 0xc10adull));
        rec.cloud = std::move(cloud.positions);
        scenes.push_back(std::move(rec));
    }
    return scenes;
}

int cmd_gen_scenes(const std::string& spec_path, int random_count, std::uint64_t seed,
                   const std::string& out_dir, int tessellation) {
    fs::create_directories(out_dir);
    std::vector<SceneSpec> specs;
    if (!spec_path.empty()) {
        auto j = load_json_file(spec_path);
        reject_unknown_keys(j, {"primitives", "seed", "tessellation"}, "scene spec");
        specs.push_back(j.get<SceneSpec>());
    }
    for (int i = 0; i < random_count; ++i) {
        auto spec = make_random_room(derive_seed(seed, i), 2, 5, tessellation);
        specs.push_back(spec);
    }
    if (specs.empty()) throw ValidationError("gen-scenes: provide --spec and/or --random");
    for (size_t i = 0; i < specs.size(); ++i) {
        auto mesh = build_scene(specs[i]);
        char name[64];
        std::snprintf(name, sizeof name, "scene_%03zu.ply", i);
        auto path = (fs::path(out_dir) / name).string();
        save_mesh_ply(mesh, path);
        json j = specs[i];
        std::ofstream spec_out(fs::path(path).replace_extension(".json"));
        spec_out << j.dump(2) << "\n";
        std::cerr << "wrote " << path << " (" << mesh.faces.size() << " faces)\n";
    }
    return 0;
}

int cmd_gen_data(const std::string& mesh_path, const std::string& out_path, size_t n_on, size_t n_off,
                 double uniform_fraction, std::uint64_t seed) {
    auto mesh = load_mesh(mesh_path);
    QueryGenConfig cfg;
    cfg.n_on = n_on;
    cfg.n_off = n_off;
    cfg.uniform_fraction = uniform_fraction;
    cfg.seed = seed;
    auto qs = generate_query_set(mesh, cfg);
    qs.mesh_id = std::hash<std::string>{}(fs::path(mesh_path).filename().string());
    write_query_set(qs, out_path);
    std::cerr << "wrote " << out_path << " (" << qs.on_surface.size() << " on, "
              << qs.off_surface.size() << " off, C=" << qs.class_count << ")\n";
    return 0;
}

int cmd_train(const std::string& config_path) {
    auto rc = parse_run_config(load_json_file(config_path));
    if (rc.threads > 0) set_thread_count(rc.threads);
    auto scenes = load_scene_dir(rc.scenes_dir, rc.train);
    std::cerr << "training on " << scenes.size() << " scenes, " << rc.train.epochs << " epochs\n";

    std::vector<EpochStats> trajectory;
    auto ckpt = fit(std::move(scenes), rc.train, &trajectory);
    save_checkpoint(ckpt, rc.out_checkpoint);
    std::cerr << "wrote " << rc.out_checkpoint << "\n";

    if (!rc.loss_csv.empty()) {
        std::ofstream csv(rc.loss_csv);
        if (!csv) throw IoError("cannot open '" + rc.loss_csv + "'");
        csv << "epoch,total,l1,ce\n";
        for (const auto& e : trajectory)
            csv << e.epoch << "," << e.total << "," << e.l1 << "," << e.ce << "\n";
        std::cerr << "wrote " << rc.loss_csv << "\n";
    }
    if (!trajectory.empty())
        std::cerr << "final loss: total=" << trajectory.back().total << " l1=" << trajectory.back().l1
                  << " ce=" << trajectory.back().ce << "\n";
    return 0;
}

int cmd_reconstruct(const std::string& ckpt_path, const std::string& cloud_path,
                    const std::string& out_points, const std::string& out_mesh, size_t n_min,
                    double threshold, double residual, int iters, int resolution, double level,
                    std::uint64_t seed, int threads) {
    if (threads > 0) set_thread_count(threads);
    auto ckpt = load_checkpoint(ckpt_path);
    auto cloud = load_points_ply(cloud_path);
    auto fc = extract_features(cloud.positions, ckpt.params.encoder, seed);
    ModelField field(std::move(fc), ckpt.params, ckpt.config.k_neighbors);

    if (!out_points.empty()) {
        ExtractParams params;
        params.n_min = n_min;
        params.threshold = static_cast<float>(threshold);
        params.residual = static_cast<float>(residual);
        params.iters = iters;
        params.seed = seed;
        auto pts = extract_dense_points(field, params);
        if (ckpt.params.class_count >= 2)
            pts.labels = label_points(field.scene(), pts.positions, ckpt.config.k_neighbors, ckpt.params);
        save_points_ply(pts.positions, out_points, pts.labels.empty() ? nullptr : &pts.labels);
        std::cerr << "wrote " << out_points << " (" << pts.positions.size() << " points)\n";
    }
    if (!out_mesh.empty()) {
        auto mesh = extract_mesh(field, resolution, static_cast<float>(level));
        save_mesh_ply(mesh, out_mesh);
        std::cerr << "wrote " << out_mesh << " (" << mesh.faces.size() << " faces)\n";
    }
    if (out_points.empty() && out_mesh.empty())
        throw ValidationError("reconstruct: pass --out-points and/or --out-mesh");
    return 0;
}

int cmd_segment(const std::string& ckpt_path, const std::string& cloud_path,
                const std::string& points_path, const std::string& out_path, std::uint64_t seed,
                int threads) {
    if (threads > 0) set_thread_count(threads);
    auto ckpt = load_checkpoint(ckpt_path);
    if (ckpt.params.class_count < 2)
        throw ValidationError("segment: checkpoint was trained with a single class");
    auto cloud = load_points_ply(cloud_path);
    auto fc = extract_features(cloud.positions, ckpt.params.encoder, seed);
    auto pts = points_path.empty() ? cloud.positions : load_points_ply(points_path).positions;
    auto labels = label_points(fc, pts, ckpt.config.k_neighbors, ckpt.params);
    save_points_ply(pts, out_path, &labels);
    std::cerr << "wrote " << out_path << " (" << pts.size() << " labeled points)\n";
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path, const std::string& gt_mesh_path,
             const std::string& out_path, double delta) {
    auto pred = load_points_ply(pred_path);
    auto gt = load_points_ply(gt_path);

    json out;
    out["reconstruction"] = reconstruction_report(pred.positions, gt.positions, delta);

    // Segmentation: aligned labels if both files carry them at equal length;
    // otherwise judge predicted labels against the nearest face of a ground
    // truth mesh.
    std::uint32_t class_count = 0;
    std::vector<std::uint32_t> pl, gl;
    if (!pred.labels.empty() && !gt.labels.empty() && pred.labels.size() == gt.labels.size()) {
        pl = pred.labels;
        gl = gt.labels;
    } else if (!pred.labels.empty() && !gt_mesh_path.empty()) {
        auto mesh = load_mesh(gt_mesh_path);
        if (!mesh.has_labels())
            throw ValidationError("eval: --gt-mesh has no label sidecar");
        SpatialIndex index(mesh);
        pl = pred.labels;
        gl.resize(pred.positions.size());
        parallel_for(static_cast<std::int64_t>(pred.positions.size()), [&](std::int64_t b, std::int64_t e) {
            for (std::int64_t i = b; i < e; ++i)
                gl[i] = mesh.face_labels[index.nearest(pred.positions[i]).face_id];
        });
    }
    if (!pl.empty()) {
        for (auto l : pl) class_count = std::max(class_count, l + 1);
        for (auto l : gl) class_count = std::max(class_count, l + 1);
        out["segmentation"] = seg_metrics(pl, gl, class_count);
    }

    std::string dumped = out.dump(2);  // nlohmann objects iterate in sorted key order
    if (out_path.empty()) {
        std::cout << dumped << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw IoError("cannot open '" + out_path + "'");
        f << dumped << "\n";
        std::cout << dumped << "\n";
    }
    return 0;
}

struct AblationRow {
    std::string name;
    bool ok = false;
    std::string error;
    double cd_l1 = 0, fs_delta = 0, miou = 0;
};

int cmd_ablate(const std::string& config_path, const std::string& out_csv) {
    auto j = load_json_file(config_path);
    reject_unknown_keys(
        j, {"seed", "scenes_dir", "eval_dir", "epochs", "batch_scenes", "queries_per_scene",
            "surface_points", "k_neighbors", "encoder_neighbors", "lr", "clamp", "uncertainty",
            "semantic", "label_fraction", "threads", "eval_points", "n_min", "threshold", "residual",
            "settings"},
        "ablate config");
    RunConfig rc;
    rc.train.seed = j.value("seed", std::uint64_t{0});
    rc.train.epochs = j.value("epochs", 10);
    rc.train.batch_scenes = j.value("batch_scenes", 2);
    rc.train.queries_per_scene = j.value("queries_per_scene", 1024);
    rc.train.surface_points = j.value("surface_points", 512);
    rc.train.encoder_neighbors = j.value("encoder_neighbors", 8);
    rc.train.lr = j.value("lr", 1e-3f);
    rc.train.clamp = j.value("clamp", 0.1f);
    rc.train.semantic = j.value("semantic", true);
    rc.train.label_fraction = j.value("label_fraction", 1.0);
    rc.scenes_dir = j.at("scenes_dir").get<std::string>();
    std::string eval_dir = j.at("eval_dir").get<std::string>();
    int threads = j.value("threads", 0);
    if (threads > 0) set_thread_count(threads);
    size_t eval_points = j.value("eval_points", 5000);
    size_t n_min = j.value("n_min", 5000);
    double threshold = j.value("threshold", 0.1);
    double residual = j.value("residual", 0.005);

    struct Setting {
        std::string name;
        int k = 4;
        bool no_range = false, with_q = false, uncertainty = true;
    };
    std::vector<Setting> grid = {{"full", 4, false, false, true},
                                 {"no-range-term", 4, true, false, true},
                                 {"sem-with-q", 4, false, true, true},
                                 {"K=1", 1, false, false, true},
                                 {"K=8", 8, false, false, true},
                                 {"K=16", 16, false, false, true},
                                 {"no-uncertainty", 4, false, false, false}};
    if (j.contains("settings")) {
        auto wanted = j.at("settings").get<std::vector<std::string>>();
        std::vector<Setting> filtered;
        for (const auto& s : grid)
            if (std::find(wanted.begin(), wanted.end(), s.name) != wanted.end()) filtered.push_back(s);
        if (filtered.empty()) throw ValidationError("ablate: no known settings selected");
        grid = filtered;
    }

    auto eval_meshes = sorted_scene_meshes(eval_dir);
    std::vector<AblationRow> rows;
    for (const auto& setting : grid) {
        std::cerr << "=== setting " << setting.name << " ===\n";
        AblationRow row;
        row.name = setting.name;
        try {
            TrainConfig cfg = rc.train;
            cfg.k_neighbors = setting.k;
            cfg.ablation.no_range_term = setting.no_range;
            cfg.ablation.sem_with_q = setting.with_q;
            cfg.uncertainty = setting.uncertainty;
            auto scenes = load_scene_dir(rc.scenes_dir, cfg);
            auto ckpt = fit(std::move(scenes), cfg);

            double cd_sum = 0, fs_sum = 0;
            std::vector<std::uint32_t> all_pred, all_gt;
            for (size_t i = 0; i < eval_meshes.size(); ++i) {
                auto mesh = load_mesh(eval_meshes[i]);
                auto cloud = sample_surface(mesh, cfg.surface_points, derive_seed(cfg.seed, 900 + i));
                auto fc = extract_features(cloud.positions, ckpt.params.encoder,
                                           derive_seed(cfg.seed, 950 + i));
                ModelField field(std::move(fc), ckpt.params, cfg.k_neighbors);
                ExtractParams ep;
                ep.n_min = n_min;
                ep.threshold = static_cast<float>(threshold);
                ep.residual = static_cast<float>(residual);
                ep.seed = derive_seed(cfg.seed, 990 + i);
                auto dense = extract_dense_points(field, ep);
                auto gt_pts = sample_surface(mesh, eval_points, derive_seed(cfg.seed, 970 + i));
                auto rep = reconstruction_report(dense.positions, gt_pts.positions);
                cd_sum += rep.cd_l1;
                fs_sum += rep.fs_delta;

                if (ckpt.params.class_count >= 2 && mesh.has_labels()) {
                    auto pred = label_points(field.scene(), gt_pts.positions, cfg.k_neighbors,
                                             ckpt.params);
                    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
                    all_gt.insert(all_gt.end(), gt_pts.labels.begin(), gt_pts.labels.end());
                }
            }
            row.cd_l1 = cd_sum / eval_meshes.size();
            row.fs_delta = fs_sum / eval_meshes.size();
            if (!all_pred.empty())
                row.miou = seg_metrics(all_pred, all_gt, ckpt.params.class_count).miou;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
            std::cerr << "setting " << setting.name << " failed: " << e.what() << "\n";
        }
        rows.push_back(row);
    }

    std::printf("%-16s %12s %10s %8s\n", "setting", "CD-L1(x1e2)", "FS-delta", "mIoU");
    for (const auto& r : rows) {
        if (r.ok)
            std::printf("%-16s %12.4f %10.4f %8.4f\n", r.name.c_str(), r.cd_l1 * 100, r.fs_delta,
                        r.miou);
        else
            std::printf("%-16s %12s %10s %8s  (%s)\n", r.name.c_str(), "-", "-", "-", r.error.c_str());
    }
    if (!out_csv.empty()) {
        std::ofstream csv(out_csv);
        if (!csv) throw IoError("cannot open '" + out_csv + "'");
        csv << "setting,cd_l1,fs_delta,miou,status\n";
        for (const auto& r : rows)
            csv << r.name << "," << r.cd_l1 << "," << r.fs_delta << "," << r.miou << ","
                << (r.ok ? "ok" : "failed") << "\n";
        std::cerr << "wrote " << out_csv << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-aware unsigned distance fields: reconstruction + segmentation pipeline"};
    app.require_subcommand(1);

    // gen-scenes
    auto* gen_scenes = app.add_subcommand("gen-scenes", "Generate labeled procedural scene meshes");
    std::string gs_spec, gs_out = "scenes";
    int gs_random = 0, gs_tess = 6;
    std::uint64_t gs_seed = 0;
    gen_scenes->add_option("--spec", gs_spec, "Scene spec JSON file");
    gen_scenes->add_option("--random", gs_random, "Number of random rooms to generate");
    gen_scenes->add_option("--seed", gs_seed, "Seed for random rooms");
    gen_scenes->add_option("--tessellation", gs_tess, "Primitive grid density");
    gen_scenes->add_option("--out-dir", gs_out, "Output directory");

    // gen-data
    auto* gen_data = app.add_subcommand("gen-data", "Generate a query-sample dataset from a mesh");
    std::string gd_mesh, gd_out = "queries.ruqs";
    std::uint64_t gd_seed = 0;
    size_t gd_on = 10000, gd_off = 100000;
    double gd_uniform = 0.1;
    gen_data->add_option("--mesh", gd_mesh, "Input mesh (.ply/.obj)")->required();
    gen_data->add_option("--out", gd_out, "Output dataset path (.ruqs)");
    gen_data->add_option("--n-on", gd_on, "On-surface sample count");
    gen_data->add_option("--n-off", gd_off, "Off-surface sample count");
    gen_data->add_option("--uniform-fraction", gd_uniform, "Share of uniform cube samples");
    gen_data->add_option("--seed", gd_seed, "Sampling seed");

    // train
    auto* train = app.add_subcommand("train", "Train a model from a run-config JSON");
    std::string tr_config;
    train->add_option("--config", tr_config, "Run config JSON")->required();

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "Extract dense points and/or a mesh");
    std::string rc_ckpt, rc_cloud, rc_points, rc_mesh;
    size_t rc_nmin = 100000;
    double rc_threshold = 0.1, rc_residual = 0.005, rc_level = 0.003;
    int rc_iters = 5, rc_resolution = 128, rc_threads = 0;
    std::uint64_t rc_seed = 0;
    rec->add_option("--checkpoint", rc_ckpt, "Trained checkpoint (.ruck)")->required();
    rec->add_option("--cloud", rc_cloud, "Input surface point cloud (.ply)")->required();
    rec->add_option("--out-points", rc_points, "Output dense points (.ply)");
    rec->add_option("--out-mesh", rc_mesh, "Output mesh (.ply)");
    rec->add_option("--n-min", rc_nmin, "Minimum dense point count");
    rec->add_option("--threshold", rc_threshold, "Candidate distance threshold");
    rec->add_option("--residual", rc_residual, "Acceptance residual");
    rec->add_option("--iters", rc_iters, "Projection iterations per round");
    rec->add_option("--resolution", rc_resolution, "Marching cubes grid resolution");
    rec->add_option("--level", rc_level, "Marching cubes iso level");
    rec->add_option("--seed", rc_seed, "Extraction seed");
    rec->add_option("--threads", rc_threads, "Worker threads (default: cores)");

    // segment
    auto* seg = app.add_subcommand("segment", "Label points with the semantic head");
    std::string sg_ckpt, sg_cloud, sg_points, sg_out = "labeled.ply";
    std::uint64_t sg_seed = 0;
    int sg_threads = 0;
    seg->add_option("--checkpoint", sg_ckpt, "Trained checkpoint (.ruck)")->required();
    seg->add_option("--cloud", sg_cloud, "Input surface cloud (.ply)")->required();
    seg->add_option("--points", sg_points, "Points to label (default: the cloud itself)");
    seg->add_option("--out", sg_out, "Output labeled points (.ply)");
    seg->add_option("--seed", sg_seed, "Feature extraction seed");
    seg->add_option("--threads", sg_threads, "Worker threads");

    // eval
    auto* ev = app.add_subcommand("eval", "Score predicted points against ground truth");
    std::string ev_pred, ev_gt, ev_gt_mesh, ev_out;
    double ev_delta = 0.005;
    ev->add_option("--pred", ev_pred, "Predicted points (.ply)")->required();
    ev->add_option("--gt", ev_gt, "Ground-truth points (.ply)")->required();
    ev->add_option("--gt-mesh", ev_gt_mesh, "Labeled ground-truth mesh for segmentation scoring");
    ev->add_option("--out", ev_out, "Write the JSON report here (also printed)");
    ev->add_option("--delta", ev_delta, "F-score base threshold");

    // ablate
    auto* ab = app.add_subcommand("ablate", "Run the ablation grid and print a comparison table");
    std::string ab_config, ab_csv;
    ab->add_option("--config", ab_config, "Ablation config JSON")->required();
    ab->add_option("--out-csv", ab_csv, "Write the comparison table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen_scenes) return cmd_gen_scenes(gs_spec, gs_random, gs_seed, gs_out, gs_tess);
        if (*gen_data) return cmd_gen_data(gd_mesh, gd_out, gd_on, gd_off, gd_uniform, gd_seed);
        if (*train) return cmd_train(tr_config);
        if (*rec)
            return cmd_reconstruct(rc_ckpt, rc_cloud, rc_points, rc_mesh, rc_nmin, rc_threshold,
                                   rc_residual, rc_iters, rc_resolution, rc_level, rc_seed, rc_threads);
        if (*seg) return cmd_segment(sg_ckpt, sg_cloud, sg_points, sg_out, sg_seed, sg_threads);
        if (*ev) return cmd_eval(ev_pred, ev_gt, ev_gt_mesh, ev_out, ev_delta);
        if (*ab) return cmd_ablate(ab_config, ab_csv);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
