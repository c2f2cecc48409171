#pragma once

#include <map>

#include "soar/vqa.hpp"

namespace soar {

/// Per-scene attempt counts. The exploration bonus has no exploitation term,
/// so selection reduces to least-attempted with deterministic tie-breaks.
struct BanditState {
    std::map<int, long> counts;  // task id -> attempts

    long count(int task_id) const {
        auto it = counts.find(task_id);
        return it == counts.end() ? 0 : it->second;
    }
};

std::vector<int> feasible_tasks(const SceneState& state, const std::vector<TaskSpec>& tasks,
                                const OracleClient& oracle);

/// argmax over feasible of sqrt(log(N+1)/(n+1)), N summed over the feasible
/// subset; ties broken by lowest task id.
int ucb_select(const BanditState& bandit, const std::vector<int>& feasible);

void record_attempt(BanditState& bandit, int task_id);

struct Proposal {
    TaskSpec task;
    bool used_fallback = false;
};

/// UCB selection over the feasible set, or a uniformly random task from the
/// full list when nothing is feasible. Records the attempt either way.
Proposal propose(const SceneState& state, const std::vector<TaskSpec>& tasks,
                 BanditState& bandit, const OracleClient& oracle, Rng& rng);

}  // namespace soar
