#pragma once

#include "soar/scene.hpp"

namespace soar {

/// Greedy optimal-ish demonstrator. Reduces a lexicographic distance to the
/// goal (object placements first, then gripper position) by following
/// shortest barrier-avoiding paths. With probability epsilon it emits a
/// uniformly random action instead.
Action scripted_expert_action(const SceneState& state, const SceneState& goal,
                              double epsilon, Rng& rng);

/// True when state matches goal on object placements, holding and gripper.
bool goal_reached(const SceneState& state, const SceneState& goal);

/// Shortest barrier-avoiding path length between two cells, or -1 when
/// disconnected.
int shortest_path_len(const SceneState& state, GridPos from, GridPos to);

}  // namespace soar
