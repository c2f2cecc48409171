#pragma once

#include <array>
#include <functional>
#include <span>

#include "soar/datastore.hpp"
#include "soar/subgoal.hpp"

namespace soar {

enum class PolicyVariant : std::uint8_t { GC, LC };

const char* variant_name(PolicyVariant v);
PolicyVariant variant_from_name(const std::string& name);

struct PolicyConfig {
    int hidden = 64;
    int embed_dim = 8;
};

/// Token vocabulary for the language-conditioned variant: task template,
/// object kind, container kind, plus a none slot for templates without a
/// container. Unseen kinds keep their random-init embeddings, which is the
/// grounding-failure mechanism under distribution shift.
struct TokenVocab {
    int num_templates = 3;
    int num_object_kinds = 0;
    int num_container_kinds = 0;

    int size() const { return num_templates + num_object_kinds + num_container_kinds + 1; }
    int none_token() const { return size() - 1; }
    int template_token(TaskTemplate t) const { return static_cast<int>(t); }
    int object_kind_token(int kind) const { return num_templates + kind; }
    int container_kind_token(int kind) const {
        return num_templates + num_object_kinds + kind;
    }
};

std::array<int, 3> task_tokens(const TaskSpec& task, const SceneConfig& config,
                               const TokenVocab& vocab);

/// Two-hidden-layer fully connected policy over flattened state planes.
/// Parameters live in one flat vector so updates and finite-difference
/// checks stay trivial.
struct PolicyParams {
    PolicyVariant variant = PolicyVariant::GC;
    int feature_dim = 0;  // plane features, excluding embeddings
    int hidden = 64;
    int embed_dim = 0;    // 0 for GC
    TokenVocab vocab;
    std::vector<double> flat;

    // GC inputs are augmented with goal-minus-current difference planes; LC
    // inputs with the three token embeddings.
    int input_dim() const {
        return variant == PolicyVariant::GC ? feature_dim + feature_dim / 2
                                            : feature_dim + 3 * embed_dim;
    }
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return w1() + static_cast<std::size_t>(hidden) * input_dim(); }
    std::size_t w2() const { return b1() + hidden; }
    std::size_t b2() const { return w2() + static_cast<std::size_t>(hidden) * hidden; }
    std::size_t w3() const { return b2() + hidden; }
    std::size_t b3() const { return w3() + static_cast<std::size_t>(kActionCount) * hidden; }
    std::size_t embed() const { return b3() + kActionCount; }
    std::size_t total() const {
        return embed() + static_cast<std::size_t>(variant == PolicyVariant::LC
                                                      ? vocab.size() * embed_dim
                                                      : 0);
    }
};

struct TrainSample {
    std::vector<double> features;        // GC: encode(state, goal); LC: encode_state(state)
    std::array<int, 3> tokens{-1, -1, -1};  // LC only
    int action = 0;                      // label, 0..kActionCount-1
};

PolicyParams init_policy(PolicyVariant variant, const SceneConfig& scene_config,
                         const PolicyConfig& cfg, std::uint64_t seed);

std::vector<double> policy_forward(const PolicyParams& params,
                                   std::span<const double> features,
                                   std::span<const int> tokens = {});

/// Mean cross-entropy over the batch; exact analytic gradient written to
/// grad (resized to params.flat.size()).
double loss_and_grad(const PolicyParams& params, const std::vector<TrainSample>& batch,
                     std::vector<double>& grad);

void sgd_update(PolicyParams& params, const std::vector<double>& grad, double step_size);

// ---------------------------------------------------------------------------
// Data assembly
// ---------------------------------------------------------------------------

struct RelabelConfig {
    int pretrain_window = 24;    // goal offset upper bound, pretraining data
    int autonomous_window = 12;  // goal offset upper bound, autonomous data
    double hindsight_fraction = 1.0;
};

struct MixtureConfig {
    std::vector<double> ratios;  // per dataset, must sum to 1
};

struct TrainConfig {
    double step_size = 1e-2;
    int batch_size = 64;
    int gradient_steps = 4000;
    std::uint64_t seed = 0;
};

/// One GC training tuple for timestep t of a trajectory: hindsight goal with
/// probability `fraction` (offset uniform over [0, window], clipped at the
/// end), else the commanded subgoal active at t.
TrainSample gc_sample(const Trajectory& traj, int t, const SceneConfig& config,
                      int window, double fraction, Rng& rng);

/// All timesteps of one trajectory as GC tuples.
std::vector<TrainSample> hindsight_samples(const Trajectory& traj, const SceneConfig& config,
                                           int window, double fraction, Rng& rng);

TrainSample lc_sample(const Trajectory& traj, int t, const SceneConfig& config,
                      const TokenVocab& vocab);

/// a'_t = a_t + a_{t+1} over per-step delta vectors, last element unchanged.
std::vector<std::vector<double>> chain_actions(const std::vector<std::vector<double>>& actions);

std::vector<const Trajectory*> filter_success(const std::vector<Trajectory>& dataset);

/// Batch-level dataset mixing: each element independently picks dataset d
/// with probability ratios[d], then an item uniformly inside it.
class MixtureSampler {
public:
    MixtureSampler(std::vector<std::size_t> dataset_sizes, MixtureConfig mix);

    struct Pick {
        std::size_t dataset = 0;
        std::size_t item = 0;
    };
    Pick next(Rng& rng) const;
    std::vector<Pick> next_batch(int batch_size, Rng& rng) const;

private:
    std::vector<std::size_t> sizes_;
    std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Training and evaluation
// ---------------------------------------------------------------------------

struct TrainDataset {
    std::vector<const Trajectory*> trajectories;
    int goal_window = 24;  // GC goal-offset window for this dataset
    double hindsight_fraction = 1.0;
};

/// Imitation training on mixture batches. GC tuples use hindsight goals per
/// dataset window; LC tuples use the commanded language tokens. Deterministic
/// given seed.
PolicyParams train(PolicyVariant variant, const std::vector<TrainDataset>& datasets,
                   const MixtureConfig& mix, const TrainConfig& cfg,
                   const SceneConfig& scene_config, const PolicyConfig& policy_cfg,
                   const PolicyParams* warm_start = nullptr);

/// Softmax-sample an action from the policy.
Action sample_action(const PolicyParams& params, std::span<const double> features,
                     std::span<const int> tokens, Rng& rng);

struct EvalConfig {
    int episodes_per_task = 50;
    int horizon = 100;
    int subgoal_period = 20;
    std::uint64_t seed = 0;
    int max_start_tries = 2000;
};

struct EvalResult {
    std::vector<int> task_ids;
    std::vector<double> success_rates;
    double average = 0.0;
};

/// Seeded evaluation episodes from fresh feasible starts. GC runs the
/// 5-subgoal cadence through `generator`; LC conditions on language for the
/// full horizon. Success is judged by the ground-truth predicate.
EvalResult evaluate(const PolicyParams& params, PolicyVariant variant,
                    const SceneConfig& scene_config, const std::vector<TaskSpec>& tasks,
                    const EvalConfig& cfg, const SubgoalGenerator* generator);

// Policy artifact I/O: versioned flat binary layout (header, dims, weights).
void save_policy(const PolicyParams& params, const std::string& path);
PolicyParams load_policy(const std::string& path);

}  // namespace soar
