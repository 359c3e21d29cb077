#pragma once

#include <json.hpp>

#include "rangeudf/trainer.hpp"

namespace rangeudf {

inline void to_json(nlohmann::json& j, const AblationFlags& f) {
    j = {{"no_range_term", f.no_range_term}, {"sem_with_q", f.sem_with_q}};
}
inline void from_json(const nlohmann::json& j, AblationFlags& f) {
    f.no_range_term = j.value("no_range_term", false);
    f.sem_with_q = j.value("sem_with_q", false);
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = {{"batch_scenes", c.batch_scenes},
         {"queries_per_scene", c.queries_per_scene},
         {"surface_points", c.surface_points},
         {"k_neighbors", c.k_neighbors},
         {"encoder_neighbors", c.encoder_neighbors},
         {"lr", c.lr},
         {"epochs", c.epochs},
         {"clamp", c.clamp},
         {"uncertainty", c.uncertainty},
         {"semantic", c.semantic},
         {"label_fraction", c.label_fraction},
         {"seed", c.seed},
         {"ablation", c.ablation},
         {"checkpoint_every", c.checkpoint_every},
         {"checkpoint_path", c.checkpoint_path}};
}
inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c.batch_scenes = j.value("batch_scenes", c.batch_scenes);
    c.queries_per_scene = j.value("queries_per_scene", c.queries_per_scene);
    c.surface_points = j.value("surface_points", c.surface_points);
    c.k_neighbors = j.value("k_neighbors", c.k_neighbors);
    c.encoder_neighbors = j.value("encoder_neighbors", c.encoder_neighbors);
    c.lr = j.value("lr", c.lr);
    c.epochs = j.value("epochs", c.epochs);
    c.clamp = j.value("clamp", c.clamp);
    c.uncertainty = j.value("uncertainty", c.uncertainty);
    c.semantic = j.value("semantic", c.semantic);
    c.label_fraction = j.value("label_fraction", c.label_fraction);
    c.seed = j.value("seed", c.seed);
    if (j.contains("ablation")) c.ablation = j.at("ablation").get<AblationFlags>();
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.checkpoint_path = j.value("checkpoint_path", c.checkpoint_path);
}

struct Checkpoint {
    ModelParams params;
    std::vector<Tensor> adam_m, adam_v;
    std::int64_t adam_t = 0;
    TrainConfig config;
    int epoch = 0;
    std::string rng_state;
};

inline Checkpoint snapshot(Trainer& trainer) {
    Checkpoint ckpt;
    ckpt.params = trainer.params();
    ckpt.adam_m = trainer.optimizer().m_state();
    ckpt.adam_v = trainer.optimizer().v_state();
    ckpt.adam_t = trainer.optimizer().steps_taken();
    ckpt.config = trainer.config();
    ckpt.epoch = trainer.epoch();
    ckpt.rng_state = trainer.rng().serialize();
    return ckpt;
}

// Checkpoint file: magic "RUCK", u32 version=1, u64 JSON header length, the
// JSON header (tensor names/shapes, config, epoch, RNG state), then raw f32
// tensors little-endian in header order (params, then ADAM m, then ADAM v).
inline void save_checkpoint(Checkpoint& ckpt, const std::string& path) {
    auto plist = ckpt.params.parameters();
    if (!ckpt.adam_m.empty() && ckpt.adam_m.size() != plist.size())
        throw ValidationError("checkpoint: ADAM state count mismatch");

    nlohmann::json header;
    header["class_count"] = ckpt.params.class_count;
    header["flags"] = ckpt.params.flags;
    header["encoder_neighbors"] = ckpt.params.encoder.neighbors;
    header["config"] = ckpt.config;
    header["epoch"] = ckpt.epoch;
    header["rng"] = ckpt.rng_state;
    header["adam_t"] = ckpt.adam_t;
    header["has_adam"] = !ckpt.adam_m.empty();
    auto& tensors = header["params"];
    for (const auto* p : plist) tensors.push_back({{"name", p->name}, {"shape", p->value.shape}});

    std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write("RUCK", 4);
    detail::write_raw(out, std::uint32_t{1});
    detail::write_raw(out, static_cast<std::uint64_t>(hs.size()));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    auto dump_tensor = [&](const Tensor& t) {
        out.write(reinterpret_cast<const char*>(t.ptr()), t.numel() * sizeof(float));
    };
    for (const auto* p : plist) dump_tensor(p->value);
    for (const auto& t : ckpt.adam_m) dump_tensor(t);
    for (const auto& t : ckpt.adam_v) dump_tensor(t);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4)) throw IoError("truncated checkpoint (magic)");
    if (std::memcmp(magic, "RUCK", 4) != 0) throw FormatError("bad checkpoint magic (expected RUCK)");
    std::uint32_t version;
    detail::read_raw(in, version, "checkpoint version");
    if (version != 1)
        throw FormatError("unsupported checkpoint version: expected 1, got " + std::to_string(version));
    std::uint64_t hlen;
    detail::read_raw(in, hlen, "header length");
    std::string hs(hlen, '\0');
    if (!in.read(hs.data(), static_cast<std::streamsize>(hlen))) throw IoError("truncated checkpoint header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid checkpoint header JSON: ") + e.what());
    }

    Checkpoint ckpt;
    ckpt.config = header.at("config").get<TrainConfig>();
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.rng_state = header.at("rng").get<std::string>();
    ckpt.adam_t = header.at("adam_t").get<std::int64_t>();
    AblationFlags flags = header.at("flags").get<AblationFlags>();
    std::uint32_t classes = header.at("class_count").get<std::uint32_t>();
    int enc_nb = header.at("encoder_neighbors").get<int>();
    ckpt.params = ModelParams(classes, /*seed=*/0, flags, enc_nb);

    auto plist = ckpt.params.parameters();
    const auto& tensors = header.at("params");
    if (tensors.size() != plist.size())
        throw FormatError("checkpoint lists " + std::to_string(tensors.size()) + " tensors, model has " +
                          std::to_string(plist.size()));
    auto read_tensor = [&](Tensor& t, const std::string& what) {
        if (!in.read(reinterpret_cast<char*>(t.ptr()), t.numel() * sizeof(float)))
            throw IoError("truncated checkpoint payload at " + what);
    };
    for (size_t i = 0; i < plist.size(); ++i) {
        const auto& meta = tensors[i];
        if (meta.at("name").get<std::string>() != plist[i]->name)
            throw FormatError("checkpoint tensor order mismatch at '" + plist[i]->name + "'");
        auto shape = meta.at("shape").get<std::vector<std::int64_t>>();
        if (shape != plist[i]->value.shape)
            throw FormatError("checkpoint shape mismatch for '" + plist[i]->name + "'");
        read_tensor(plist[i]->value, plist[i]->name);
    }
    if (header.at("has_adam").get<bool>()) {
        ckpt.adam_m.resize(plist.size());
        ckpt.adam_v.resize(plist.size());
        for (size_t i = 0; i < plist.size(); ++i) {
            ckpt.adam_m[i] = Tensor(plist[i]->value.shape);
            read_tensor(ckpt.adam_m[i], "adam m");
        }
        for (size_t i = 0; i < plist.size(); ++i) {
            ckpt.adam_v[i] = Tensor(plist[i]->value.shape);
            read_tensor(ckpt.adam_v[i], "adam v");
        }
    }
    return ckpt;
}

// Epochs x steps of training with optional periodic checkpointing; returns
// the final checkpoint.
inline Checkpoint fit(std::vector<SceneRecord> scenes, const TrainConfig& cfg,
                      std::vector<EpochStats>* trajectory = nullptr) {
    Trainer trainer(std::move(scenes), cfg);
    for (int e = 0; e < cfg.epochs; ++e) {
        auto stats = trainer.run_epoch();
        if (trajectory) trajectory->push_back(stats);
        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
            (e + 1) % cfg.checkpoint_every == 0) {
            auto ckpt = snapshot(trainer);
            save_checkpoint(ckpt, cfg.checkpoint_path);
        }
    }
    return snapshot(trainer);
}

}  // namespace rangeudf
