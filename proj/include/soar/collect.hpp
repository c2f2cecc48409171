#pragma once

#include <mutex>

#include "soar/bandit.hpp"
#include "soar/datastore.hpp"
#include "soar/expert.hpp"
#include "soar/policy.hpp"
#include "soar/subgoal.hpp"

namespace soar {

/// Acting policy seam for rollouts: learned GC, learned LC, or the scripted
/// expert. The subgoal for the current stage is always supplied; LC-style
/// actors simply ignore it.
class RolloutPolicy {
public:
    virtual ~RolloutPolicy() = default;
    virtual Action act(const SceneState& state, const TaskSpec& task,
                       const SceneState& subgoal, Rng& rng) = 0;
    virtual std::string version() const = 0;
};

class GcPolicyActor : public RolloutPolicy {
public:
    GcPolicyActor(const PolicyParams& params, const SceneConfig& config,
                  std::string version = "gc-policy")
        : params_(params), config_(config), version_(std::move(version)) {}
    Action act(const SceneState& state, const TaskSpec& task, const SceneState& subgoal,
               Rng& rng) override;
    std::string version() const override { return version_; }

private:
    const PolicyParams& params_;
    const SceneConfig& config_;
    std::string version_;
};

class LcPolicyActor : public RolloutPolicy {
public:
    LcPolicyActor(const PolicyParams& params, const SceneConfig& config,
                  std::string version = "lc-policy")
        : params_(params), config_(config), version_(std::move(version)) {}
    Action act(const SceneState& state, const TaskSpec& task, const SceneState& subgoal,
               Rng& rng) override;
    std::string version() const override { return version_; }

private:
    const PolicyParams& params_;
    const SceneConfig& config_;
    std::string version_;
};

class ExpertActor : public RolloutPolicy {
public:
    explicit ExpertActor(double epsilon) : epsilon_(epsilon) {}
    Action act(const SceneState& state, const TaskSpec& task, const SceneState& subgoal,
               Rng& rng) override {
        (void)task;
        return scripted_expert_action(state, subgoal, epsilon_, rng);
    }
    std::string version() const override { return "scripted-expert"; }

private:
    double epsilon_;
};

struct RolloutConfig {
    int horizon = 100;
    int subgoal_period = 20;
    double fault_prob = 0.0;

    int subgoal_count() const { return horizon / subgoal_period; }
    void check() const {
        if (horizon <= 0 || subgoal_period <= 0 || horizon % subgoal_period != 0)
            throw ConfigInvalid("horizon must be a positive multiple of subgoal_period");
    }
};

struct RolloutResult {
    Trajectory trajectory;
    SceneState end_state;
    bool faulted = false;
};

/// One reset-free episode: per stage, query the generator from the CURRENT
/// state, then run subgoal_period policy steps on it. Labels the final state
/// with both the noisy detector and ground truth.
RolloutResult rollout(const SceneState& start_state, RolloutPolicy& policy,
                      const TaskSpec& task, const SubgoalGenerator& generator,
                      const OracleClient& oracle, const SceneConfig& scene_config,
                      const DetectorConfig& detector, const RolloutConfig& cfg, Rng& rng);

struct CollectionStats {
    std::size_t episodes = 0;
    std::size_t valid = 0;
    std::size_t faulted = 0;
    std::size_t fallbacks = 0;
    std::size_t vlm_successes = 0;
    std::size_t gt_successes = 0;
    std::size_t scene_inits = 0;
    std::map<int, std::size_t> attempts_per_task;

    double vlm_success_rate() const {
        return valid == 0 ? 0.0 : static_cast<double>(vlm_successes) / valid;
    }
};

struct CollectorContext {
    const SceneConfig* scene = nullptr;
    RolloutPolicy* policy = nullptr;
    const SubgoalGenerator* generator = nullptr;
    const OracleClient* oracle = nullptr;
    DetectorConfig detector;
    RolloutConfig rollout_cfg;
};

/// Reset-free collection run: one scene initialization, then
/// propose -> rollout -> append, carrying the end state forward. Locks, when
/// provided, guard shared bandit and store against fleet workers.
CollectionStats autonomous_loop(const CollectorContext& ctx, BanditState& bandit,
                                Datastore& store, int n_trajectories, std::uint64_t seed,
                                std::mutex* bandit_mu = nullptr,
                                std::mutex* store_mu = nullptr);

struct WorkerSpec {
    CollectorContext ctx;
    BanditState* bandit = nullptr;  // shared per scene
    int n_trajectories = 0;
    std::uint64_t seed = 0;
};

/// Fleet-style concurrent collection. Each worker owns its environment and
/// rng stream; appends funnel into the shared store.
std::vector<CollectionStats> run_fleet(const std::vector<WorkerSpec>& workers,
                                       Datastore& store);

}  // namespace soar
