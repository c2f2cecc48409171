#include "soar/collect.hpp"

#include <thread>

namespace soar {

Action GcPolicyActor::act(const SceneState& state, const TaskSpec& task,
                          const SceneState& subgoal, Rng& rng) {
    (void)task;
    auto features = encode(state, subgoal, config_);
    return sample_action(params_, features, {}, rng);
}

Action LcPolicyActor::act(const SceneState& state, const TaskSpec& task,
                          const SceneState& subgoal, Rng& rng) {
    (void)subgoal;
    auto features = encode_state(state, config_);
    auto tokens = task_tokens(task, config_, params_.vocab);
    return sample_action(params_, features, tokens, rng);
}

RolloutResult rollout(const SceneState& start_state, RolloutPolicy& policy,
                      const TaskSpec& task, const SubgoalGenerator& generator,
                      const OracleClient& oracle, const SceneConfig& scene_config,
                      const DetectorConfig& detector, const RolloutConfig& cfg, Rng& rng) {
    cfg.check();
    RolloutResult result;
    Trajectory& traj = result.trajectory;
    traj.scene_id = scene_config.name;
    traj.task = task;
    traj.vqa = translate_task(task, scene_config);
    traj.policy_version = policy.version();

    if (cfg.fault_prob > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < cfg.fault_prob) result.faulted = true;
    }

    SceneState state = start_state;
    traj.observations.push_back(state);
    for (int stage = 0; stage < cfg.subgoal_count(); ++stage) {
        SceneState subgoal = generator.next_subgoal(state, task, stage, rng);
        traj.subgoals.push_back(subgoal);
        traj.subgoal_steps.push_back(stage * cfg.subgoal_period);
        for (int k = 0; k < cfg.subgoal_period; ++k) {
            Action a = policy.act(state, task, subgoal, rng);
            state = step(state, a);
            traj.actions.push_back(a);
            traj.observations.push_back(state);
        }
    }
    traj.vlm_success = oracle.judge_success(state, task, detector, rng);
    bool holds = predicate_holds(state, traj.vqa.predicate);
    traj.gt_success = holds == !traj.vqa.answer_implies_feasible;
    result.end_state = state;
    return result;
}

CollectionStats autonomous_loop(const CollectorContext& ctx, BanditState& bandit,
                                Datastore& store, int n_trajectories, std::uint64_t seed,
                                std::mutex* bandit_mu, std::mutex* store_mu) {
    if (n_trajectories < 1) throw ConfigInvalid("n_trajectories must be >= 1");
    CollectionStats stats;
    SceneState state = make_scene(*ctx.scene, seed);
    stats.scene_inits = 1;
    Rng rng(seed ^ 0x5851f42d4c957f2dULL);
    std::int64_t episode = 0;
    while (stats.valid < static_cast<std::size_t>(n_trajectories)) {
        Proposal proposal;
        {
            std::unique_lock<std::mutex> lock;
            if (bandit_mu) lock = std::unique_lock<std::mutex>(*bandit_mu);
            proposal = propose(state, ctx.scene->tasks, bandit, *ctx.oracle, rng);
        }
        ++stats.episodes;
        ++stats.attempts_per_task[proposal.task.id];
        if (proposal.used_fallback) ++stats.fallbacks;
        RolloutResult r = rollout(state, *ctx.policy, proposal.task, *ctx.generator,
                                  *ctx.oracle, *ctx.scene, ctx.detector, ctx.rollout_cfg, rng);
        state = r.end_state;
        if (r.faulted) {
            ++stats.faulted;
            ++episode;
            continue;
        }
        r.trajectory.used_fallback = proposal.used_fallback;
        r.trajectory.seed = seed;
        r.trajectory.created_at = episode;
        if (r.trajectory.vlm_success) ++stats.vlm_successes;
        if (r.trajectory.gt_success) ++stats.gt_successes;
        {
            std::unique_lock<std::mutex> lock;
            if (store_mu) lock = std::unique_lock<std::mutex>(*store_mu);
            store.append(std::move(r.trajectory));
        }
        ++stats.valid;
        ++episode;
    }
    return stats;
}

std::vector<CollectionStats> run_fleet(const std::vector<WorkerSpec>& workers,
                                       Datastore& store) {
    std::vector<CollectionStats> stats(workers.size());
    std::vector<std::exception_ptr> errors(workers.size());
    std::mutex store_mu;
    std::mutex bandit_mu;
    std::vector<std::thread> threads;
    threads.reserve(workers.size());
    for (std::size_t w = 0; w < workers.size(); ++w) {
        threads.emplace_back([&, w] {
            try {
                stats[w] = autonomous_loop(workers[w].ctx, *workers[w].bandit, store,
                                           workers[w].n_trajectories, workers[w].seed,
                                           &bandit_mu, &store_mu);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    // a failed worker isolates to itself; surface the first error only if
    // every worker failed
    bool any_ok = false;
    for (std::size_t w = 0; w < workers.size(); ++w)
        if (!errors[w]) any_ok = true;
    if (!any_ok && !workers.empty())
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    return stats;
}

}  // namespace soar
