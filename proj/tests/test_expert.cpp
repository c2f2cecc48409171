#include <doctest.h>

#include "helpers.hpp"
#include "soar/expert.hpp"
#include "soar/subgoal.hpp"

using namespace soar;
using test::base_config;

TEST_CASE("expert: at the goal it emits NoOp") {
    SceneState s = make_scene(base_config(), 1);
    Rng rng(0);
    CHECK(scripted_expert_action(s, s, 0.0, rng) == Action::NoOp);
}

TEST_CASE("expert: single-cell gripper offset yields the single-step move") {
    SceneState s = make_scene(base_config(), 1);
    SceneState goal = s;
    goal.gripper = {s.gripper.x + 1, s.gripper.y};
    Rng rng(0);
    CHECK(scripted_expert_action(s, goal, 0.0, rng) == Action::MoveEast);
}

TEST_CASE("expert: reaches random solvable goals within the step bound") {
    SceneConfig c = base_config();
    c.barriers = {{3, 3}, {3, 4}, {5, 1}};
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(91);
    int solved = 0;
    for (int trial = 0; trial < 50; ++trial) {
        SceneState s = make_scene(c, 1000 + trial);
        const TaskSpec& task = c.tasks[trial % c.tasks.size()];
        // final-stage subgoal doubles as a full goal state
        SceneState goal;
        try {
            goal = gen.next_subgoal(s, task, 4, rng);
        } catch (const Unreachable&) {
            continue;
        }
        // BFS plan-length bound from the spec's contract
        int bound = c.width * c.height *
                    (static_cast<int>(s.objects.size()) * 4 + 2);
        bool reached = false;
        for (int t = 0; t < bound && !reached; ++t) {
            Action a = scripted_expert_action(s, goal, 0.0, rng);
            s = step(s, a);
            reached = goal_reached(s, goal);
        }
        CHECK(reached);
        ++solved;
    }
    CHECK(solved >= 45);
}

TEST_CASE("expert: unreachable goal throws") {
    SceneConfig c;
    c.width = 5;
    c.height = 5;
    c.num_object_kinds = 1;
    c.num_container_kinds = 1;
    c.objects = {{0, 0, {0, 0, 0, 0}}};
    // wall splitting the grid, gripper left, target right
    c.barriers = {{2, 0}, {2, 1}, {2, 2}, {2, 3}, {2, 4}};
    c.home = {0, 2};
    SceneState s = make_scene(c, 0);
    SceneState goal = s;
    goal.gripper = {4, 2};
    Rng rng(0);
    CHECK_THROWS_AS(scripted_expert_action(s, goal, 0.0, rng), Unreachable);
}

TEST_CASE("expert: epsilon=1 draws uniformly over actions") {
    SceneState s = make_scene(base_config(), 4);
    SceneState goal = s;
    goal.gripper = {7, 7};
    Rng rng(17);
    std::vector<int> counts(kActionCount, 0);
    for (int i = 0; i < 7000; ++i)
        ++counts[static_cast<int>(scripted_expert_action(s, goal, 1.0, rng))];
    for (int c : counts) CHECK(c > 700);
}
