#include "soar/expert.hpp"

#include <deque>

namespace soar {

namespace {

constexpr Action kMoves[4] = {Action::MoveNorth, Action::MoveSouth,
                              Action::MoveEast, Action::MoveWest};

GridPos neighbor(GridPos p, Action a) {
    switch (a) {
        case Action::MoveNorth: return {p.x, p.y - 1};
        case Action::MoveSouth: return {p.x, p.y + 1};
        case Action::MoveEast: return {p.x + 1, p.y};
        case Action::MoveWest: return {p.x - 1, p.y};
        default: return p;
    }
}

// BFS over free cells; returns the first move of a shortest path, NoOp when
// already there, nullopt when disconnected.
std::optional<Action> first_move_towards(const SceneState& s, GridPos from, GridPos to) {
    if (from == to) return Action::NoOp;
    if (!s.in_bounds(to) || s.is_barrier(to)) return std::nullopt;
    std::vector<int> dist(static_cast<std::size_t>(s.width) * s.height, -1);
    std::vector<Action> first(dist.size(), Action::NoOp);
    auto idx = [&](GridPos p) { return static_cast<std::size_t>(p.y) * s.width + p.x; };
    std::deque<GridPos> q;
    dist[idx(from)] = 0;
    q.push_back(from);
    while (!q.empty()) {
        GridPos p = q.front();
        q.pop_front();
        for (Action a : kMoves) {
            GridPos n = neighbor(p, a);
            if (!s.in_bounds(n) || s.is_barrier(n)) continue;
            if (dist[idx(n)] != -1) continue;
            dist[idx(n)] = dist[idx(p)] + 1;
            first[idx(n)] = (p == from) ? a : first[idx(p)];
            if (n == to) return first[idx(n)];
            q.push_back(n);
        }
    }
    return std::nullopt;
}

struct Placement {
    bool held = false;
    std::optional<int> container;
    GridPos pos;

    friend bool operator==(const Placement&, const Placement&) = default;
};

Placement placement_of(const SceneState& s, int object_id) {
    Placement p;
    p.held = s.holding == object_id;
    p.container = s.objects[object_id].in_container;
    p.pos = s.objects[object_id].pos;
    return p;
}

// Target cell the gripper must stand on to realize goal's placement of o.
GridPos goal_cell(const SceneState& goal, int object_id) {
    const auto& o = goal.objects[object_id];
    if (o.in_container) return goal.containers[*o.in_container].pos;
    return o.pos;
}

Action planned_action(const SceneState& state, const SceneState& goal) {
    const int n = static_cast<int>(state.objects.size());

    // Deliver a held object whose goal placement is not "held".
    if (state.holding && goal.holding != state.holding) {
        int h = *state.holding;
        GridPos target = goal_cell(goal, h);
        auto mv = first_move_towards(state, state.gripper, target);
        if (!mv) throw Unreachable("no path to placement target");
        if (*mv != Action::NoOp) return *mv;
        return Action::Release;
    }

    // First mismatched object, preferring one whose target cell is currently
    // droppable (avoids releasing onto an occupied table cell).
    auto mismatched = [&](int i) {
        Placement now = placement_of(state, i);
        Placement want;
        want.held = goal.holding == i;
        want.container = goal.objects[i].in_container;
        want.pos = goal.objects[i].pos;
        if (want.held) return !now.held;
        if (now.held) return true;
        if (now.container != want.container) return true;
        return !now.container && now.pos != want.pos;
    };
    auto droppable = [&](int i) {
        if (goal.holding == i) return true;
        GridPos t = goal_cell(goal, i);
        if (goal.objects[i].in_container) return true;
        auto occ = state.table_object_at(t);
        return !occ || *occ == i;
    };
    int pick = -1;
    for (int i = 0; i < n && pick == -1; ++i)
        if (mismatched(i) && droppable(i)) pick = i;
    for (int i = 0; i < n && pick == -1; ++i)
        if (mismatched(i)) pick = i;

    if (pick != -1) {
        if (state.holding == pick) {
            GridPos target = goal_cell(goal, pick);
            auto mv = first_move_towards(state, state.gripper, target);
            if (!mv) throw Unreachable("no path to placement target");
            if (*mv != Action::NoOp) return *mv;
            return Action::Release;
        }
        // go grasp it
        GridPos at = state.objects[pick].pos;
        auto mv = first_move_towards(state, state.gripper, at);
        if (!mv) throw Unreachable("no path to object");
        if (*mv != Action::NoOp) return *mv;
        return Action::Grasp;
    }

    // Objects placed; match the gripper.
    auto mv = first_move_towards(state, state.gripper, goal.gripper);
    if (!mv) throw Unreachable("no path to goal gripper cell");
    return *mv;
}

}  // namespace

bool goal_reached(const SceneState& state, const SceneState& goal) {
    if (state.holding != goal.holding) return false;
    if (state.gripper != goal.gripper) return false;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        if (state.objects[i].in_container != goal.objects[i].in_container) return false;
        if (state.objects[i].pos != goal.objects[i].pos) return false;
    }
    return true;
}

int shortest_path_len(const SceneState& state, GridPos from, GridPos to) {
    if (from == to) return 0;
    std::vector<int> dist(static_cast<std::size_t>(state.width) * state.height, -1);
    auto idx = [&](GridPos p) { return static_cast<std::size_t>(p.y) * state.width + p.x; };
    std::deque<GridPos> q;
    dist[idx(from)] = 0;
    q.push_back(from);
    while (!q.empty()) {
        GridPos p = q.front();
        q.pop_front();
        for (Action a : kMoves) {
            GridPos n = neighbor(p, a);
            if (!state.in_bounds(n) || state.is_barrier(n)) continue;
            if (dist[idx(n)] != -1) continue;
            dist[idx(n)] = dist[idx(p)] + 1;
            if (n == to) return dist[idx(n)];
            q.push_back(n);
        }
    }
    return -1;
}

Action scripted_expert_action(const SceneState& state, const SceneState& goal,
                              double epsilon, Rng& rng) {
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<int> pick(0, kActionCount - 1);
            return static_cast<Action>(pick(rng));
        }
    }
    if (goal_reached(state, goal)) return Action::NoOp;
    return planned_action(state, goal);
}

}  // namespace soar
