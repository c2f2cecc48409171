#include "soar/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace soar {

const char* variant_name(PolicyVariant v) {
    return v == PolicyVariant::GC ? "gc" : "lc";
}

PolicyVariant variant_from_name(const std::string& name) {
    if (name == "gc") return PolicyVariant::GC;
    if (name == "lc") return PolicyVariant::LC;
    throw SoarError("unknown policy variant: " + name);
}

std::array<int, 3> task_tokens(const TaskSpec& task, const SceneConfig& config,
                               const TokenVocab& vocab) {
    int object_kind = -1;
    for (const auto& o : config.objects)
        if (o.id == task.object_id) object_kind = o.kind;
    if (object_kind < 0) throw UnknownId("task object not in scene config");
    int container_token = vocab.none_token();
    if (task.tmpl != TaskTemplate::MoveToRegion) {
        int container_kind = -1;
        for (const auto& c : config.containers)
            if (c.id == task.container_id) container_kind = c.kind;
        if (container_kind < 0) throw UnknownId("task container not in scene config");
        container_token = vocab.container_kind_token(container_kind);
    }
    return {vocab.template_token(task.tmpl), vocab.object_kind_token(object_kind),
            container_token};
}

PolicyParams init_policy(PolicyVariant variant, const SceneConfig& scene_config,
                         const PolicyConfig& cfg, std::uint64_t seed) {
    PolicyParams p;
    p.variant = variant;
    p.hidden = cfg.hidden;
    if (variant == PolicyVariant::GC) {
        p.feature_dim = encode_dim(scene_config);
        p.embed_dim = 0;
    } else {
        p.feature_dim = encode_dim(scene_config) / 2;  // single-state planes
        p.embed_dim = cfg.embed_dim;
        p.vocab.num_object_kinds = scene_config.num_object_kinds;
        p.vocab.num_container_kinds = scene_config.num_container_kinds;
    }
    p.flat.assign(p.total(), 0.0);
    Rng rng(seed);
    auto fill_layer = [&](std::size_t offset, int fan_in, std::size_t count) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < count; ++i) p.flat[offset + i] = dist(rng);
    };
    fill_layer(p.w1(), p.input_dim(), static_cast<std::size_t>(p.hidden) * p.input_dim());
    fill_layer(p.w2(), p.hidden, static_cast<std::size_t>(p.hidden) * p.hidden);
    fill_layer(p.w3(), p.hidden, static_cast<std::size_t>(kActionCount) * p.hidden);
    if (variant == PolicyVariant::LC)
        fill_layer(p.embed(), p.embed_dim,
                   static_cast<std::size_t>(p.vocab.size()) * p.embed_dim);
    return p;
}

namespace {

// Full input vector including embedding lookups.
std::vector<double> build_input(const PolicyParams& p, std::span<const double> features,
                                std::span<const int> tokens) {
    if (static_cast<int>(features.size()) != p.feature_dim)
        throw DimMismatch("feature length " + std::to_string(features.size()) +
                          " != " + std::to_string(p.feature_dim));
    std::vector<double> x(features.begin(), features.end());
    if (p.variant == PolicyVariant::GC) {
        // difference planes: the goal half minus the current half
        const int half = p.feature_dim / 2;
        x.resize(static_cast<std::size_t>(p.feature_dim + half));
        for (int k = 0; k < half; ++k)
            x[static_cast<std::size_t>(p.feature_dim + k)] = features[half + k] - features[k];
    }
    if (p.variant == PolicyVariant::LC) {
        if (tokens.size() != 3) throw DimMismatch("LC forward needs 3 tokens");
        for (int k = 0; k < 3; ++k) {
            int tok = tokens[k];
            if (tok < 0 || tok >= p.vocab.size()) throw DimMismatch("token id out of vocab");
            const double* row = p.flat.data() + p.embed() +
                                static_cast<std::size_t>(tok) * p.embed_dim;
            x.insert(x.end(), row, row + p.embed_dim);
        }
    }
    return x;
}

struct ForwardTrace {
    std::vector<double> input;
    std::vector<int> nz;         // indices of nonzero inputs (planes are sparse)
    std::vector<double> h1, h2;  // post-ReLU
    std::vector<double> logits;
};

ForwardTrace forward_trace(const PolicyParams& p, std::span<const double> features,
                           std::span<const int> tokens) {
    ForwardTrace t;
    t.input = build_input(p, features, tokens);
    const int in = p.input_dim();
    const int h = p.hidden;
    t.nz.reserve(64);
    for (int k = 0; k < in; ++k)
        if (t.input[k] != 0.0) t.nz.push_back(k);
    t.h1.assign(h, 0.0);
    const double* w1 = p.flat.data() + p.w1();
    const double* b1 = p.flat.data() + p.b1();
    for (int i = 0; i < h; ++i) {
        double z = b1[i];
        const double* row = w1 + static_cast<std::size_t>(i) * in;
        for (int k : t.nz) z += row[k] * t.input[k];
        t.h1[i] = z > 0.0 ? z : 0.0;
    }
    t.h2.assign(h, 0.0);
    const double* w2 = p.flat.data() + p.w2();
    const double* b2 = p.flat.data() + p.b2();
    for (int i = 0; i < h; ++i) {
        double z = b2[i];
        const double* row = w2 + static_cast<std::size_t>(i) * h;
        for (int k = 0; k < h; ++k) z += row[k] * t.h1[k];
        t.h2[i] = z > 0.0 ? z : 0.0;
    }
    t.logits.assign(kActionCount, 0.0);
    const double* w3 = p.flat.data() + p.w3();
    const double* b3 = p.flat.data() + p.b3();
    for (int i = 0; i < kActionCount; ++i) {
        double z = b3[i];
        const double* row = w3 + static_cast<std::size_t>(i) * h;
        for (int k = 0; k < h; ++k) z += row[k] * t.h2[k];
        t.logits[i] = z;
    }
    return t;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += p[i] = std::exp(logits[i] - m);
    for (auto& v : p) v /= sum;
    return p;
}

}  // namespace

std::vector<double> policy_forward(const PolicyParams& params,
                                   std::span<const double> features,
                                   std::span<const int> tokens) {
    return forward_trace(params, features, tokens).logits;
}

double loss_and_grad(const PolicyParams& params, const std::vector<TrainSample>& batch,
                     std::vector<double>& grad) {
    if (batch.empty()) throw EmptyDataset("loss_and_grad on empty batch");
    grad.assign(params.flat.size(), 0.0);
    const int in = params.input_dim();
    const int h = params.hidden;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    double* gw1 = grad.data() + params.w1();
    double* gb1 = grad.data() + params.b1();
    double* gw2 = grad.data() + params.w2();
    double* gb2 = grad.data() + params.b2();
    double* gw3 = grad.data() + params.w3();
    double* gb3 = grad.data() + params.b3();
    const double* w2 = params.flat.data() + params.w2();
    const double* w3 = params.flat.data() + params.w3();

    std::vector<double> dlogits(kActionCount), dh2(h), dh1(h), dinput(in);
    for (const auto& sample : batch) {
        if (sample.action < 0 || sample.action >= kActionCount)
            throw DimMismatch("action label out of range");
        ForwardTrace t = forward_trace(params, sample.features,
                                       params.variant == PolicyVariant::LC
                                           ? std::span<const int>(sample.tokens)
                                           : std::span<const int>());
        std::vector<double> probs = softmax(t.logits);
        loss += -std::log(std::max(probs[sample.action], 1e-300)) * inv_n;
        for (int i = 0; i < kActionCount; ++i)
            dlogits[i] = (probs[i] - (i == sample.action ? 1.0 : 0.0)) * inv_n;
        // layer 3
        std::fill(dh2.begin(), dh2.end(), 0.0);
        for (int i = 0; i < kActionCount; ++i) {
            gb3[i] += dlogits[i];
            double* grow = gw3 + static_cast<std::size_t>(i) * h;
            const double* wrow = w3 + static_cast<std::size_t>(i) * h;
            for (int k = 0; k < h; ++k) {
                grow[k] += dlogits[i] * t.h2[k];
                dh2[k] += dlogits[i] * wrow[k];
            }
        }
        // layer 2
        std::fill(dh1.begin(), dh1.end(), 0.0);
        for (int i = 0; i < h; ++i) {
            double d = t.h2[i] > 0.0 ? dh2[i] : 0.0;
            if (d == 0.0) continue;
            gb2[i] += d;
            double* grow = gw2 + static_cast<std::size_t>(i) * h;
            const double* wrow = w2 + static_cast<std::size_t>(i) * h;
            for (int k = 0; k < h; ++k) {
                grow[k] += d * t.h1[k];
                dh1[k] += d * wrow[k];
            }
        }
        // layer 1
        if (params.variant == PolicyVariant::LC)
            std::fill(dinput.begin(), dinput.end(), 0.0);
        const double* w1 = params.flat.data() + params.w1();
        for (int i = 0; i < h; ++i) {
            double d = t.h1[i] > 0.0 ? dh1[i] : 0.0;
            if (d == 0.0) continue;
            gb1[i] += d;
            double* grow = gw1 + static_cast<std::size_t>(i) * in;
            for (int k : t.nz) grow[k] += d * t.input[k];
            if (params.variant == PolicyVariant::LC) {
                const double* wrow = w1 + static_cast<std::size_t>(i) * in;
                for (int k = params.feature_dim; k < in; ++k) dinput[k] += d * wrow[k];
            }
        }
        if (params.variant == PolicyVariant::LC) {
            for (int k = 0; k < 3; ++k) {
                int tok = sample.tokens[k];
                double* grow = grad.data() + params.embed() +
                               static_cast<std::size_t>(tok) * params.embed_dim;
                const double* src = dinput.data() + params.feature_dim +
                                    static_cast<std::size_t>(k) * params.embed_dim;
                for (int e = 0; e < params.embed_dim; ++e) grow[e] += src[e];
            }
        }
    }
    return loss;
}

void sgd_update(PolicyParams& params, const std::vector<double>& grad, double step_size) {
    if (grad.size() != params.flat.size()) throw DimMismatch("gradient/parameter size mismatch");
    for (std::size_t i = 0; i < grad.size(); ++i) params.flat[i] -= step_size * grad[i];
}

// ---------------------------------------------------------------------------
// Data assembly
// ---------------------------------------------------------------------------

namespace {

const SceneState& commanded_subgoal_at(const Trajectory& traj, int t) {
    if (traj.subgoals.empty()) return traj.observations.back();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < traj.subgoal_steps.size(); ++i)
        if (traj.subgoal_steps[i] <= t) idx = i;
    return traj.subgoals[idx];
}

}  // namespace

TrainSample gc_sample(const Trajectory& traj, int t, const SceneConfig& config,
                      int window, double fraction, Rng& rng) {
    if (traj.observations.empty()) throw EmptyTrajectory("trajectory has no observations");
    const int last = static_cast<int>(traj.observations.size()) - 1;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const SceneState* goal = nullptr;
    if (coin(rng) < fraction) {
        int hi = std::min(t + window, last);
        std::uniform_int_distribution<int> off(t, hi);
        goal = &traj.observations[off(rng)];
    } else {
        goal = &commanded_subgoal_at(traj, t);
    }
    TrainSample s;
    s.features = encode(traj.observations[t], *goal, config);
    s.action = static_cast<int>(traj.actions[t]);
    return s;
}

std::vector<TrainSample> hindsight_samples(const Trajectory& traj, const SceneConfig& config,
                                           int window, double fraction, Rng& rng) {
    if (traj.observations.empty()) throw EmptyTrajectory("trajectory has no observations");
    std::vector<TrainSample> out;
    out.reserve(traj.actions.size());
    for (int t = 0; t < static_cast<int>(traj.actions.size()); ++t)
        out.push_back(gc_sample(traj, t, config, window, fraction, rng));
    return out;
}

TrainSample lc_sample(const Trajectory& traj, int t, const SceneConfig& config,
                      const TokenVocab& vocab) {
    TrainSample s;
    s.features = encode_state(traj.observations[t], config);
    s.tokens = task_tokens(traj.task, config, vocab);
    s.action = static_cast<int>(traj.actions[t]);
    return s;
}

std::vector<std::vector<double>> chain_actions(const std::vector<std::vector<double>>& actions) {
    if (actions.empty()) throw RaggedInput("chain_actions on empty input");
    const std::size_t dim = actions.front().size();
    for (const auto& a : actions)
        if (a.size() != dim) throw RaggedInput("ragged action vectors");
    std::vector<std::vector<double>> out(actions.size());
    for (std::size_t t = 0; t < actions.size(); ++t) {
        out[t] = actions[t];
        if (t + 1 < actions.size())
            for (std::size_t k = 0; k < dim; ++k) out[t][k] += actions[t + 1][k];
    }
    return out;
}

std::vector<const Trajectory*> filter_success(const std::vector<Trajectory>& dataset) {
    std::vector<const Trajectory*> out;
    for (const auto& t : dataset)
        if (t.vlm_success) out.push_back(&t);
    return out;
}

MixtureSampler::MixtureSampler(std::vector<std::size_t> dataset_sizes, MixtureConfig mix)
    : sizes_(std::move(dataset_sizes)) {
    if (mix.ratios.size() != sizes_.size())
        throw DimMismatch("mixture ratios / dataset count mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (sizes_[i] == 0 && mix.ratios[i] > 0.0)
            throw EmptyDataset("mixture includes an empty dataset");
        sum += mix.ratios[i];
        cumulative_.push_back(sum);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigInvalid("mixture ratios must sum to 1");
}

MixtureSampler::Pick MixtureSampler::next(Rng& rng) const {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    double u = coin(rng);
    std::size_t d = 0;
    while (d + 1 < cumulative_.size() && u >= cumulative_[d]) ++d;
    std::uniform_int_distribution<std::size_t> item(0, sizes_[d] - 1);
    return {d, item(rng)};
}

std::vector<MixtureSampler::Pick> MixtureSampler::next_batch(int batch_size, Rng& rng) const {
    std::vector<Pick> out;
    out.reserve(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < batch_size; ++i) out.push_back(next(rng));
    return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {
constexpr double kMomentum = 0.9;
}  // namespace

PolicyParams train(PolicyVariant variant, const std::vector<TrainDataset>& datasets,
                   const MixtureConfig& mix, const TrainConfig& cfg,
                   const SceneConfig& scene_config, const PolicyConfig& policy_cfg,
                   const PolicyParams* warm_start) {
    if (datasets.empty()) throw EmptyDataset("train with no datasets");
    for (std::size_t d = 0; d < datasets.size(); ++d)
        if (datasets[d].trajectories.empty() && mix.ratios.size() > d && mix.ratios[d] > 0.0)
            throw EmptyDataset("train dataset " + std::to_string(d) + " is empty");

    PolicyParams params = warm_start ? *warm_start
                                     : init_policy(variant, scene_config, policy_cfg, cfg.seed);
    std::vector<std::size_t> sizes;
    for (const auto& d : datasets) sizes.push_back(d.trajectories.size());
    MixtureSampler sampler(sizes, mix);
    // accept probability per action class ~ sqrt(min_freq / freq): flattens the
    // NoOp-heavy label marginal without fully discarding idle transitions
    std::vector<std::vector<double>> accept(datasets.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::array<std::size_t, kActionCount> hist{};
        std::size_t total = 0;
        for (const Trajectory* traj : datasets[d].trajectories)
            for (Action a : traj->actions) {
                ++hist[static_cast<std::size_t>(a)];
                ++total;
            }
        std::size_t lo = total;
        for (std::size_t n : hist)
            if (n > 0 && n < lo) lo = n;
        accept[d].assign(kActionCount, 1.0);
        if (total > 0)
            for (int a = 0; a < kActionCount; ++a)
                if (hist[static_cast<std::size_t>(a)] > 0)
                    accept[d][static_cast<std::size_t>(a)] = std::sqrt(
                        static_cast<double>(lo) / hist[static_cast<std::size_t>(a)]);
    }
    Rng rng(cfg.seed + 0x9e3779b97f4a7c15ULL);
    std::vector<double> grad;
    std::vector<double> velocity(params.flat.size(), 0.0);
    std::vector<TrainSample> batch;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int it = 0; it < cfg.gradient_steps; ++it) {
        batch.clear();
        for (int b = 0; b < cfg.batch_size; ++b) {
            auto pick = sampler.next(rng);
            const TrainDataset& ds = datasets[pick.dataset];
            const Trajectory& traj = *ds.trajectories[pick.item];
            std::uniform_int_distribution<int> ts(0, traj.horizon() - 1);
            int t = ts(rng);
            // Expert and policy rollouts idle once a stage goal is met, so NoOp
            // dominates the label marginal; rejection-resample timesteps toward
            // a flatter class balance or the learned argmax collapses to NoOp.
            for (int tries = 0; tries < 20; ++tries) {
                double a = accept[pick.dataset]
                                 [static_cast<std::size_t>(traj.actions[static_cast<std::size_t>(t)])];
                if (coin(rng) < a) break;
                t = ts(rng);
            }
            if (variant == PolicyVariant::GC)
                batch.push_back(gc_sample(traj, t, scene_config, ds.goal_window,
                                          ds.hindsight_fraction, rng));
            else
                batch.push_back(lc_sample(traj, t, scene_config, params.vocab));
        }
        double loss = loss_and_grad(params, batch, grad);
        (void)loss;
        for (std::size_t i = 0; i < grad.size(); ++i)
            velocity[i] = kMomentum * velocity[i] + grad[i];
        double step = cfg.step_size;
        if (it >= cfg.gradient_steps * 85 / 100) step *= 0.04;
        else if (it >= cfg.gradient_steps * 6 / 10) step *= 0.2;
        sgd_update(params, velocity, step);
    }
    return params;
}

Action sample_action(const PolicyParams& params, std::span<const double> features,
                     std::span<const int> tokens, Rng& rng) {
    std::vector<double> probs = softmax(policy_forward(params, features, tokens));
    std::discrete_distribution<int> dist(probs.begin(), probs.end());
    return static_cast<Action>(dist(rng));
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvalResult evaluate(const PolicyParams& params, PolicyVariant variant,
                    const SceneConfig& scene_config, const std::vector<TaskSpec>& tasks,
                    const EvalConfig& cfg, const SubgoalGenerator* generator) {
    if (cfg.episodes_per_task < 1) throw SoarError("episodes_per_task must be >= 1");
    if (tasks.empty()) throw SoarError("evaluate with no tasks");
    if (variant == PolicyVariant::GC && !generator)
        throw SoarError("GC evaluation needs a subgoal generator");
    TruthfulOracle oracle(scene_config);
    EvalResult result;
    const int stages = cfg.horizon / cfg.subgoal_period;
    double total = 0.0;
    for (const auto& task : tasks) {
        int successes = 0;
        for (int ep = 0; ep < cfg.episodes_per_task; ++ep) {
            // fresh feasible start
            std::uint64_t base = cfg.seed * 1000003ULL +
                                 static_cast<std::uint64_t>(task.id) * 7919ULL +
                                 static_cast<std::uint64_t>(ep) * 104729ULL;
            SceneState state;
            bool found = false;
            for (int tries = 0; tries < cfg.max_start_tries; ++tries) {
                state = make_scene(scene_config, base + static_cast<std::uint64_t>(tries));
                if (oracle.judge_feasible(state, task)) {
                    found = true;
                    break;
                }
            }
            if (!found) throw NoFeasibleStart("task " + std::to_string(task.id));
            Rng rng(base ^ 0xabcdef1234567890ULL);
            if (variant == PolicyVariant::GC) {
                for (int s = 0; s < stages; ++s) {
                    SceneState goal = generator->next_subgoal(state, task, s, rng);
                    for (int k = 0; k < cfg.subgoal_period; ++k) {
                        auto features = encode(state, goal, scene_config);
                        Action a = sample_action(params, features, {}, rng);
                        state = step(state, a);
                    }
                }
            } else {
                auto tokens = task_tokens(task, scene_config, params.vocab);
                for (int t = 0; t < cfg.horizon; ++t) {
                    auto features = encode_state(state, scene_config);
                    Action a = sample_action(params, features, tokens, rng);
                    state = step(state, a);
                }
            }
            if (oracle.ground_truth_success(state, task)) ++successes;
        }
        double rate = static_cast<double>(successes) / cfg.episodes_per_task;
        result.task_ids.push_back(task.id);
        result.success_rates.push_back(rate);
        total += rate;
    }
    result.average = total / static_cast<double>(tasks.size());
    return result;
}

// ---------------------------------------------------------------------------
// Policy artifact I/O
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'S', 'O', 'A', 'R', 'P', 'O', 'L', '1'};
}

void save_policy(const PolicyParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SoarError("cannot open for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    std::int32_t header[8] = {
        params.variant == PolicyVariant::GC ? 0 : 1,
        params.feature_dim,
        params.hidden,
        params.embed_dim,
        params.vocab.num_templates,
        params.vocab.num_object_kinds,
        params.vocab.num_container_kinds,
        static_cast<std::int32_t>(params.flat.size()),
    };
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(params.flat.data()),
              static_cast<std::streamsize>(params.flat.size() * sizeof(double)));
}

PolicyParams load_policy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SoarError("cannot open for read: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw SchemaViolation("bad policy file header: " + path);
    std::int32_t header[8];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw SchemaViolation("truncated policy header: " + path);
    PolicyParams p;
    p.variant = header[0] == 0 ? PolicyVariant::GC : PolicyVariant::LC;
    p.feature_dim = header[1];
    p.hidden = header[2];
    p.embed_dim = header[3];
    p.vocab.num_templates = header[4];
    p.vocab.num_object_kinds = header[5];
    p.vocab.num_container_kinds = header[6];
    p.flat.resize(static_cast<std::size_t>(header[7]));
    in.read(reinterpret_cast<char*>(p.flat.data()),
            static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
    if (!in) throw SchemaViolation("truncated policy payload: " + path);
    if (p.flat.size() != p.total()) throw SchemaViolation("policy size/dims mismatch: " + path);
    return p;
}

}  // namespace soar
