#include "soar/subgoal.hpp"

#include <deque>

namespace soar {

namespace {

void check_task(const SceneState& state, const TaskSpec& task) {
    if (task.object_id < 0 || task.object_id >= static_cast<int>(state.objects.size()))
        throw UnknownId("task object id not in scene");
    if (task.tmpl != TaskTemplate::MoveToRegion &&
        (task.container_id < 0 || task.container_id >= static_cast<int>(state.containers.size())))
        throw UnknownId("task container id not in scene");
}

bool cell_droppable(const SceneState& s, GridPos p, int ignore_object) {
    if (!s.in_bounds(p) || s.is_barrier(p)) return false;
    if (s.container_at(p)) return false;
    auto occ = s.table_object_at(p);
    return !occ || *occ == ignore_object;
}

// Deterministic BFS scan for a droppable table cell near `from`.
GridPos nearest_droppable(const SceneState& s, GridPos from, int ignore_object) {
    std::vector<char> seen(static_cast<std::size_t>(s.width) * s.height, 0);
    auto idx = [&](GridPos p) { return static_cast<std::size_t>(p.y) * s.width + p.x; };
    std::deque<GridPos> q{from};
    seen[idx(from)] = 1;
    const GridPos deltas[4] = {{0, -1}, {0, 1}, {1, 0}, {-1, 0}};
    while (!q.empty()) {
        GridPos p = q.front();
        q.pop_front();
        if (cell_droppable(s, p, ignore_object)) return p;
        for (const auto& d : deltas) {
            GridPos n{p.x + d.x, p.y + d.y};
            if (!s.in_bounds(n) || seen[idx(n)]) continue;
            seen[idx(n)] = 1;
            q.push_back(n);
        }
    }
    throw Unreachable("no droppable table cell exists");
}

void set_gripper(SceneState& s, GridPos p) {
    s.gripper = p;
    if (s.holding) s.objects[*s.holding].pos = p;
}

// Drop any held object other than `keep` onto the nearest free table cell.
void stash_other_held(SceneState& s, int keep) {
    if (!s.holding || *s.holding == keep) return;
    int h = *s.holding;
    GridPos at = nearest_droppable(s, s.objects[h].pos, h);
    s.holding = std::nullopt;
    s.objects[h].in_container = std::nullopt;
    s.objects[h].pos = at;
}

}  // namespace

WaypointPlan waypoint_plan(const TaskSpec& task) {
    switch (task.tmpl) {
        case TaskTemplate::PutIn:
        case TaskTemplate::TakeOut:
        case TaskTemplate::MoveToRegion:
            return WaypointPlan{};
    }
    throw UnsupportedTemplate("unsupported task template");
}

GridPos nearest_free_table_cell(const SceneState& state, GridPos from) {
    return nearest_droppable(state, from, -1);
}

SceneState OracleSubgoalGenerator::next_subgoal(const SceneState& state, const TaskSpec& task,
                                                int stage_index, Rng& rng) const {
    if (stage_index < 0 || stage_index >= kWaypointCount)
        throw SoarError("stage index out of range");
    check_task(state, task);
    waypoint_plan(task);  // template support check

    int obj = task.object_id;
    if (hallucination_prob_ > 0.0 && state.objects.size() > 1) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < hallucination_prob_)
            obj = (obj + 1) % static_cast<int>(state.objects.size());
    }

    // Placement target for the final stages, computed against `ref` so it
    // never collides with a freshly stashed object.
    bool into_container = task.tmpl == TaskTemplate::PutIn;
    auto compute_target = [&](const SceneState& ref) -> GridPos {
        switch (task.tmpl) {
            case TaskTemplate::PutIn:
                return ref.containers[task.container_id].pos;
            case TaskTemplate::TakeOut:
                return nearest_droppable(ref, ref.containers[task.container_id].pos, obj);
            case TaskTemplate::MoveToRegion: {
                GridPos centroid{(task.region.x0 + task.region.x1) / 2,
                                 (task.region.y0 + task.region.y1) / 2};
                if (!ref.objects[obj].in_container && ref.holding != obj &&
                    task.region.contains(ref.objects[obj].pos))
                    return ref.objects[obj].pos;
                if (cell_droppable(ref, centroid, obj)) return centroid;
                GridPos t = nearest_droppable(ref, centroid, obj);
                if (!task.region.contains(t))
                    throw Unreachable("no droppable cell inside target region");
                return t;
            }
        }
        throw UnsupportedTemplate("unsupported task template");
    };

    SceneState goal = state;
    Waypoint stage = WaypointPlan{}.stages[static_cast<std::size_t>(stage_index)];
    switch (stage) {
        case Waypoint::ReachObject:
            set_gripper(goal, goal.objects[obj].pos);
            break;
        case Waypoint::GraspObject:
            stash_other_held(goal, obj);
            goal.gripper = goal.objects[obj].pos;
            goal.holding = obj;
            goal.objects[obj].in_container = std::nullopt;
            break;
        case Waypoint::TransportToTarget: {
            stash_other_held(goal, obj);
            GridPos target = compute_target(goal);
            goal.gripper = target;
            goal.holding = obj;
            goal.objects[obj].in_container = std::nullopt;
            goal.objects[obj].pos = target;
            break;
        }
        case Waypoint::PlaceAtTarget:
        case Waypoint::ReturnHome: {
            stash_other_held(goal, obj);
            GridPos target = compute_target(goal);
            goal.holding = std::nullopt;
            goal.objects[obj].pos = target;
            goal.objects[obj].in_container =
                into_container ? std::optional<int>(task.container_id) : std::nullopt;
            goal.gripper = stage == Waypoint::PlaceAtTarget ? target : goal.home;
            break;
        }
    }

    // Exploration offset on intermediate gripper targets only.
    if (stage_index <= 2 && noise_.perturb_prob > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < noise_.perturb_prob) {
            std::vector<GridPos> candidates;
            for (int dy = -noise_.max_offset; dy <= noise_.max_offset; ++dy)
                for (int dx = -noise_.max_offset; dx <= noise_.max_offset; ++dx) {
                    GridPos p{goal.gripper.x + dx, goal.gripper.y + dy};
                    if (p == goal.gripper) continue;
                    if (!goal.in_bounds(p) || goal.is_barrier(p)) continue;
                    // a held object may not land on another on-table object
                    if (goal.holding && !cell_droppable(goal, p, *goal.holding) &&
                        !goal.container_at(p))
                        continue;
                    candidates.push_back(p);
                }
            if (!candidates.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
                set_gripper(goal, candidates[pick(rng)]);
            }
        }
    }
    return goal;
}

}  // namespace soar
