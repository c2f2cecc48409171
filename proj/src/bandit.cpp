#include "soar/bandit.hpp"

#include <cmath>

namespace soar {

std::vector<int> feasible_tasks(const SceneState& state, const std::vector<TaskSpec>& tasks,
                                const OracleClient& oracle) {
    std::vector<int> out;
    for (const auto& t : tasks)
        if (oracle.judge_feasible(state, t)) out.push_back(t.id);
    return out;
}

int ucb_select(const BanditState& bandit, const std::vector<int>& feasible) {
    if (feasible.empty()) throw EmptyFeasibleSet("ucb_select on empty feasible set");
    long total = 0;
    for (int id : feasible) total += bandit.count(id);
    int best = -1;
    double best_bonus = -1.0;
    for (int id : feasible) {
        double bonus = std::sqrt(std::log(static_cast<double>(total) + 1.0) /
                                 (static_cast<double>(bandit.count(id)) + 1.0));
        if (bonus > best_bonus || (bonus == best_bonus && id < best)) {
            best = id;
            best_bonus = bonus;
        }
    }
    return best;
}

void record_attempt(BanditState& bandit, int task_id) {
    ++bandit.counts[task_id];
}

Proposal propose(const SceneState& state, const std::vector<TaskSpec>& tasks,
                 BanditState& bandit, const OracleClient& oracle, Rng& rng) {
    std::vector<int> feasible = feasible_tasks(state, tasks, oracle);
    Proposal p;
    if (!feasible.empty()) {
        int id = ucb_select(bandit, feasible);
        for (const auto& t : tasks)
            if (t.id == id) p.task = t;
        p.used_fallback = false;
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, tasks.size() - 1);
        p.task = tasks[pick(rng)];
        p.used_fallback = true;
    }
    record_attempt(bandit, p.task.id);
    return p;
}

}  // namespace soar
