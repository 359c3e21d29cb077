#pragma once

#include "rangeudf/adam.hpp"
#include "rangeudf/loss.hpp"
#include "rangeudf/queryset.hpp"

namespace rangeudf {

struct TrainConfig {
    int batch_scenes = 4;
    int queries_per_scene = 50000;
    int surface_points = 10000;
    int k_neighbors = 4;
    int encoder_neighbors = 8;
    float lr = 1e-3f;
    int warmup_steps = 200;  // linear lr ramp; ADAM's early full-magnitude
                             // steps otherwise jolt the final ReLU into its
                             // zero-gradient region for every query at once
    int epochs = 1;
    float clamp = 0.1f;  // <= 0 disables target/prediction clamping
    bool uncertainty = true;
    bool semantic = true;
    double label_fraction = 1.0;
    std::uint64_t seed = 0;
    AblationFlags ablation;
    int checkpoint_every = 0;  // epochs between checkpoints; 0 disables
    std::string checkpoint_path;

    void validate() const {
        if (batch_scenes < 1 || queries_per_scene < 1 || surface_points < 1 || epochs < 0)
            throw ValidationError("TrainConfig: counts must be positive");
        if (k_neighbors < 1 || encoder_neighbors < 1)
            throw ValidationError("TrainConfig: neighbor counts must be >= 1");
        if (label_fraction < 0 || label_fraction > 1)
            throw ValidationError("TrainConfig: label_fraction outside [0, 1]");
        if (warmup_steps < 0) throw ValidationError("TrainConfig: warmup_steps must be >= 0");
    }
};

// Precomputed per-scene state: encoder plan, flattened query pool with
// targets, per-query kNN into the cloud, and the partial-label mask. All of
// it is geometry that never changes across steps.
struct SceneRuntime {
    EncoderPlan plan;
    std::vector<Vec3f> q_pos;
    std::vector<float> q_udf;
    std::vector<std::int32_t> q_label;
    std::vector<std::uint8_t> q_labeled;
    std::vector<std::int32_t> knn_idx;  // [pool * K]
    std::vector<Vec3f> knn_pos;         // [pool * K]
    std::vector<std::int32_t> sample_scratch;

    size_t pool_size() const { return q_pos.size(); }
};

inline SceneRuntime build_scene_runtime(const SceneRecord& scene, const TrainConfig& cfg) {
    SceneRuntime rt;
    rt.plan = build_encoder_plan(scene.cloud, scene.encoder_seed, cfg.encoder_neighbors);

    const auto& qs = scene.queries;
    size_t pool = qs.on_surface.size() + qs.off_surface.size();
    if (pool == 0) throw ValidationError("scene has no query samples");
    rt.q_pos.reserve(pool);
    rt.q_udf.reserve(pool);
    rt.q_label.reserve(pool);
    auto push = [&](const QuerySample& s) {
        rt.q_pos.push_back(s.position);
        rt.q_udf.push_back(s.udf);
        rt.q_label.push_back(static_cast<std::int32_t>(s.label));
    };
    for (const auto& s : qs.on_surface) push(s);
    for (const auto& s : qs.off_surface) push(s);

    // Partial-label mask drawn from the query-set seed, independent of the
    // training seed so the same scene keeps the same labeled subset.
    rt.q_labeled.assign(pool, 1);
    if (cfg.label_fraction < 1.0) {
        Rng rng(derive_seed(qs.seed, 0x1abe1ull));
        for (size_t i = 0; i < pool; ++i)
            rt.q_labeled[i] = rng.uniform01() < cfg.label_fraction ? 1 : 0;
    }

    const std::int64_t k = cfg.k_neighbors;
    if (static_cast<size_t>(k) > scene.cloud.size())
        throw ValidationError("k_neighbors exceeds cloud size");
    KdTree tree(scene.cloud);
    rt.knn_idx.resize(pool * k);
    rt.knn_pos.resize(pool * k);
    parallel_for(static_cast<std::int64_t>(pool), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            auto idx = tree.knn(rt.q_pos[i], static_cast<size_t>(k));
            for (std::int64_t j = 0; j < k; ++j) {
                rt.knn_idx[i * k + j] = static_cast<std::int32_t>(idx[j]);
                rt.knn_pos[i * k + j] = scene.cloud[idx[j]];
            }
        }
    });

    rt.sample_scratch.resize(pool);
    for (size_t i = 0; i < pool; ++i) rt.sample_scratch[i] = static_cast<std::int32_t>(i);
    return rt;
}

struct StepStats {
    double total = 0;
    double l1 = 0;
    double ce = 0;
    std::int64_t labeled = 0;
    double alive_fraction = 1.0;  // share of batch queries with d_pred > 0
};

namespace detail {

// Forward/backward for one scene; node gradients stay in the bank until the
// caller harvests them (sequentially, to keep accumulation order fixed).
struct SceneBackwardJob {
    Tape tape;
    std::unique_ptr<ParamBankT<float>> bank;
    StepStats stats;
    double alive = 1.0;
};

inline void run_scene_graph(SceneBackwardJob& job, const SceneRuntime& rt,
                            const std::vector<std::int32_t>& picks, ModelParams& params,
                            const TrainConfig& cfg, float loss_scale) {
    const std::int64_t k = cfg.k_neighbors;
    const std::int64_t m = static_cast<std::int64_t>(picks.size());
    job.bank = std::make_unique<ParamBankT<float>>(job.tape, true);
    auto& tape = job.tape;
    auto& bank = *job.bank;

    auto features = encoder_forward(tape, bank, rt.plan, params.encoder);

    Tensor q({m, 3}), nb_pos({m * k, 3}), d_gt({m, 1});
    std::vector<std::int32_t> nb_idx(m * k);
    std::vector<std::int32_t> labels(m);
    std::vector<std::uint8_t> mask(m);
    for (std::int64_t i = 0; i < m; ++i) {
        std::int32_t s = picks[i];
        q.data[i * 3 + 0] = rt.q_pos[s].x;
        q.data[i * 3 + 1] = rt.q_pos[s].y;
        q.data[i * 3 + 2] = rt.q_pos[s].z;
        d_gt.data[i] = cfg.clamp > 0 ? std::min(rt.q_udf[s], cfg.clamp) : rt.q_udf[s];
        labels[i] = rt.q_label[s];
        mask[i] = rt.q_labeled[s];
        for (std::int64_t j = 0; j < k; ++j) {
            nb_idx[i * k + j] = rt.knn_idx[s * k + j];
            const Vec3f& p = rt.knn_pos[s * k + j];
            nb_pos.data[(i * k + j) * 3 + 0] = p.x;
            nb_pos.data[(i * k + j) * 3 + 1] = p.y;
            nb_pos.data[(i * k + j) * 3 + 2] = p.z;
        }
    }

    auto qv = tape.constant(std::move(q));
    auto pv = tape.constant(std::move(nb_pos));
    auto heads = model_heads(tape, bank, features, qv, pv, nb_idx, k, params);
    auto gt = tape.constant(d_gt);
    // The optimized distance term regresses the pre-clip head value onto the
    // clamped target. Its optimum is the same as the clipped objective's, but
    // neither the output ReLU nor the clamp gate can zero its gradient, so
    // the optimizer has no absorbing saturation states. Targets are clamped
    // during packing; the prediction side stays unclamped here.
    auto terms = combined_loss(tape, heads.distance_pre, gt, heads.logits, labels, mask,
                               bank(params.s1), bank(params.s2), /*clamp=*/0.0, cfg.uncertainty,
                               cfg.semantic);
    job.stats.total = terms.total->value.data[0];
    job.stats.ce = terms.ce;
    job.stats.labeled = terms.labeled;
    // Report the true model error: clipped prediction vs clamped target.
    double l1 = 0;
    std::int64_t alive = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        float pred = heads.distance->value.data[i];
        alive += pred > 0;
        if (cfg.clamp > 0) pred = std::min(pred, cfg.clamp);
        l1 += std::abs(static_cast<double>(pred) - static_cast<double>(d_gt.data[i]));
    }
    job.stats.l1 = l1 / static_cast<double>(m);
    job.alive = static_cast<double>(alive) / static_cast<double>(m);
    auto scaled = tape.scale(terms.total, loss_scale);
    tape.backward(scaled);
}

}  // namespace detail

// One optimizer update over a batch of scenes. Scene graphs run in parallel;
// gradient harvesting and the ADAM update are sequential in scene order, so
// the result is bit-identical for any thread count.
inline StepStats train_step(std::vector<const SceneRuntime*> batch,
                            const std::vector<std::vector<std::int32_t>>& picks, ModelParams& params,
                            Adam& opt, const TrainConfig& cfg) {
    if (batch.empty()) throw ValidationError("train_step: empty batch");
    const float loss_scale = 1.0f / static_cast<float>(batch.size());
    std::vector<detail::SceneBackwardJob> jobs(batch.size());

    parallel_for(static_cast<std::int64_t>(batch.size()), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i)
            detail::run_scene_graph(jobs[i], *batch[i], picks[i], params, cfg, loss_scale);
    });

    auto plist = params.parameters();
    for (auto* p : plist) p->zero_grad();
    for (auto& job : jobs) job.bank->harvest();

    float warm = cfg.warmup_steps > 0
                     ? std::min(1.0f, static_cast<float>(opt.steps_taken() + 1) /
                                          static_cast<float>(cfg.warmup_steps))
                     : 1.0f;
    opt.config().lr = cfg.lr * warm;
    opt.step(plist);

    StepStats stats;
    stats.alive_fraction = 0;
    for (const auto& job : jobs) {
        stats.total += job.stats.total / static_cast<double>(jobs.size());
        stats.l1 += job.stats.l1 / static_cast<double>(jobs.size());
        stats.ce += job.stats.ce / static_cast<double>(jobs.size());
        stats.labeled += job.stats.labeled;
        stats.alive_fraction += job.alive / static_cast<double>(jobs.size());
    }
    return stats;
}

struct EpochStats {
    int epoch = 0;
    double total = 0;
    double l1 = 0;
    double ce = 0;
};

class Trainer {
public:
    Trainer(std::vector<SceneRecord> scenes, const TrainConfig& cfg)
        : scenes_(std::move(scenes)), cfg_(cfg), rng_(derive_seed(cfg.seed, 0x7241ull)) {
        cfg_.validate();
        if (scenes_.empty()) throw ValidationError("Trainer: empty scene list");
        std::uint32_t classes = 1;
        for (const auto& s : scenes_) classes = std::max(classes, s.queries.class_count);
        params_ = ModelParams(classes, cfg.seed, cfg.ablation, cfg.encoder_neighbors);
        opt_ = Adam(params_.parameters(), AdamConfig{cfg.lr, 0.9f, 0.999f, 1e-8f});
        runtimes_.resize(scenes_.size());
    }

    // Accessors used by tests and checkpointing.
    ModelParams& params() { return params_; }
    Adam& optimizer() { return opt_; }
    const TrainConfig& config() const { return cfg_; }
    const std::vector<SceneRecord>& scenes() const { return scenes_; }
    Rng& rng() { return rng_; }
    int epoch() const { return epoch_; }
    void set_epoch(int e) { epoch_ = e; }

    const SceneRuntime& runtime(size_t scene) {
        if (!runtimes_[scene])
            runtimes_[scene] = std::make_unique<SceneRuntime>(build_scene_runtime(scenes_[scene], cfg_));
        return *runtimes_[scene];
    }

    // One pass over all scenes in seeded shuffled order.
    EpochStats run_epoch() {
        std::vector<std::int32_t> order(scenes_.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng_.uniform_index(i)]);

        EpochStats es;
        es.epoch = epoch_;
        size_t steps = (order.size() + cfg_.batch_scenes - 1) / cfg_.batch_scenes;
        for (size_t s = 0; s < steps; ++s) {
            std::vector<const SceneRuntime*> batch;
            std::vector<std::vector<std::int32_t>> picks;
            for (int b = 0; b < cfg_.batch_scenes; ++b) {
                size_t scene = order[(s * cfg_.batch_scenes + b) % order.size()];
                const auto& rt = runtime(scene);
                batch.push_back(&rt);
                picks.push_back(sample_queries(rt));
            }
            auto stats = train_step(batch, picks, params_, opt_, cfg_);
            es.total += stats.total / static_cast<double>(steps);
            es.l1 += stats.l1 / static_cast<double>(steps);
            es.ce += stats.ce / static_cast<double>(steps);
        }
        ++epoch_;
        return es;
    }

    std::vector<std::int32_t> sample_queries(const SceneRuntime& rt) {
        size_t pool = rt.pool_size();
        size_t want = std::min<size_t>(cfg_.queries_per_scene, pool);
        std::vector<std::int32_t> picks(rt.sample_scratch);
        for (size_t i = 0; i < want; ++i) {
            size_t j = i + rng_.uniform_index(pool - i);
            std::swap(picks[i], picks[j]);
        }
        picks.resize(want);
        return picks;
    }

private:
    std::vector<SceneRecord> scenes_;
    TrainConfig cfg_;
    ModelParams params_;
    Adam opt_;
    Rng rng_;
    std::vector<std::unique_ptr<SceneRuntime>> runtimes_;
    int epoch_ = 0;
};

}  // namespace rangeudf
