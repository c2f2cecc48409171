#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "soar/expert.hpp"
#include "soar/subgoal.hpp"

using namespace soar;
using test::base_config;

TEST_CASE("waypoint_plan: always the fixed 5-stage skeleton") {
    SceneConfig c = base_config();
    for (const auto& task : c.tasks) {
        WaypointPlan plan = waypoint_plan(task);
        REQUIRE(plan.stages.size() == 5);
        CHECK(plan.stages[0] == Waypoint::ReachObject);
        CHECK(plan.stages[4] == Waypoint::ReturnHome);
    }
}

TEST_CASE("next_subgoal: stage 0 moves only the gripper onto the object") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 20);
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(0);
    SceneState g = gen.next_subgoal(s, c.tasks[0], 0, rng);
    CHECK(g.gripper == s.objects[0].pos);
    CHECK(g.holding == s.holding);
    CHECK(g.objects == s.objects);
}

TEST_CASE("next_subgoal: stage 3 for PutIn places the object in the container") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 20);
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(0);
    const TaskSpec& task = c.tasks[0];  // put object 0 in container 0
    SceneState g = gen.next_subgoal(s, task, 3, rng);
    CHECK(g.objects[0].in_container == 0);
    CHECK_FALSE(g.holding);
    CHECK(g.gripper == s.containers[0].pos);
}

TEST_CASE("next_subgoal: TakeOut stage-4 target is the nearest free table cell") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 20);
    s.objects[0].pos = s.containers[0].pos;
    s.objects[0].in_container = 0;
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(0);
    const TaskSpec& task = c.tasks[1];  // take object 0 out of container 0
    SceneState g = gen.next_subgoal(s, task, 4, rng);
    CHECK_FALSE(g.objects[0].in_container);
    // independent check: no strictly closer droppable cell than the chosen one
    GridPos chosen = g.objects[0].pos;
    GridPos from = s.containers[0].pos;
    auto manhattan = [](GridPos a, GridPos b) {
        return std::abs(a.x - b.x) + std::abs(a.y - b.y);
    };
    for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x) {
            GridPos p{x, y};
            if (s.is_barrier(p) || s.container_at(p) || s.table_object_at(p)) continue;
            CHECK(manhattan(from, p) >= manhattan(from, chosen));
        }
}

TEST_CASE("next_subgoal: every emitted subgoal is a valid scene state") {
    SceneConfig c = base_config();
    c.barriers = {{4, 4}, {1, 5}};
    OracleSubgoalGenerator gen(SubgoalNoise{0.5, 1});
    Rng rng(71);
    SceneState s = make_scene(c, 71);
    for (int i = 0; i < 2000; ++i) {
        s = step(s, test::random_action(rng));
        const TaskSpec& task = c.tasks[i % c.tasks.size()];
        int stage = i % kWaypointCount;
        SceneState g = gen.next_subgoal(s, task, stage, rng);
        REQUIRE(state_valid(g));
    }
}

TEST_CASE("next_subgoal: final-stage soundness under noise") {
    SceneConfig c = base_config();
    OracleSubgoalGenerator gen(SubgoalNoise{1.0, 1});
    Rng rng(72);
    SceneState s = make_scene(c, 72);
    TruthfulOracle oracle(c);
    for (int i = 0; i < 1000; ++i) {
        s = step(s, test::random_action(rng));
        const TaskSpec& task = c.tasks[i % c.tasks.size()];
        VqaPair pair = translate_task(task, c);
        for (int stage : {3, 4}) {
            SceneState g = gen.next_subgoal(s, task, stage, rng);
            CHECK(predicate_holds(g, pair.predicate) == !pair.answer_implies_feasible);
        }
    }
}

TEST_CASE("next_subgoal: perturbed stage-0 target stays within Chebyshev 1 on valid cells") {
    SceneConfig c = base_config();
    c.barriers = {{3, 3}};
    OracleSubgoalGenerator gen(SubgoalNoise{1.0, 1});
    Rng rng(73);
    SceneState s = make_scene(c, 73);
    for (int i = 0; i < 500; ++i) {
        s = step(s, test::random_action(rng));
        SceneState g = gen.next_subgoal(s, c.tasks[0], 0, rng);
        int dx = std::abs(g.gripper.x - s.objects[0].pos.x);
        int dy = std::abs(g.gripper.y - s.objects[0].pos.y);
        CHECK(std::max(dx, dy) <= 1);
        CHECK(g.in_bounds(g.gripper));
        CHECK_FALSE(g.is_barrier(g.gripper));
    }
}

TEST_CASE("next_subgoal: absorption of off-task state changes between queries") {
    SceneConfig c = base_config();
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(74);
    SceneState s = make_scene(c, 74);
    SceneState g1 = gen.next_subgoal(s, c.tasks[0], 0, rng);
    CHECK(g1.gripper == s.objects[0].pos);
    // object gets knocked elsewhere between queries
    SceneState moved = s;
    moved.objects[0].pos = {s.objects[0].pos.x == 2 ? 3 : 2, s.objects[0].pos.y};
    SceneState g2 = gen.next_subgoal(moved, c.tasks[0], 0, rng);
    CHECK(g2.gripper == moved.objects[0].pos);
}

TEST_CASE("next_subgoal: stage-k goal reachable from stage-(k-1) goal within 2(W+H)") {
    SceneConfig c = base_config();
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    Rng rng(75);
    for (int trial = 0; trial < 20; ++trial) {
        SceneState s = make_scene(c, 300 + trial);
        const TaskSpec& task = c.tasks[trial % c.tasks.size()];
        SceneState cur = s;
        for (int stage = 0; stage < kWaypointCount; ++stage) {
            SceneState goal = gen.next_subgoal(cur, task, stage, rng);
            int bound = 2 * (c.width + c.height);
            bool reached = goal_reached(cur, goal);
            for (int t = 0; t < bound && !reached; ++t) {
                cur = step(cur, scripted_expert_action(cur, goal, 0.0, rng));
                reached = goal_reached(cur, goal);
            }
            REQUIRE(reached);
        }
    }
}

TEST_CASE("next_subgoal: unknown ids rejected") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 1);
    OracleSubgoalGenerator gen;
    Rng rng(0);
    TaskSpec bad{0, TaskTemplate::PutIn, 7, 0, {}, ""};
    CHECK_THROWS_AS(gen.next_subgoal(s, bad, 0, rng), UnknownId);
}
