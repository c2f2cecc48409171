#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "soar/expert.hpp"

using namespace soar;
using test::base_config;

TEST_CASE("make_scene: single-cell spawn region forces placement") {
    SceneConfig c;
    c.width = 8;
    c.height = 8;
    c.num_object_kinds = 1;
    c.num_container_kinds = 1;
    c.objects = {{0, 0, {2, 3, 2, 3}}};
    SceneState s = make_scene(c, 0);
    CHECK(s.objects[0].pos == GridPos{2, 3});
}

TEST_CASE("make_scene: deterministic given (config, seed)") {
    SceneConfig c = base_config();
    CHECK(make_scene(c, 7) == make_scene(c, 7));
    // different seeds eventually differ
    bool differ = false;
    for (std::uint64_t s = 0; s < 16 && !differ; ++s)
        differ = !(make_scene(c, s) == make_scene(c, s + 100));
    CHECK(differ);
}

TEST_CASE("make_scene: objects land on distinct, barrier-free cells") {
    SceneConfig c;
    c.width = 8;
    c.height = 8;
    c.num_object_kinds = 1;
    c.num_container_kinds = 1;
    c.objects = {{0, 0, {0, 0, 7, 7}}, {1, 0, {0, 0, 7, 7}}, {2, 0, {0, 0, 7, 7}}};
    c.barriers = {{4, 4}, {2, 5}};
    for (std::uint64_t seed : {42ULL, 43ULL, 99ULL}) {
        SceneState s = make_scene(c, seed);
        // brute-force occupied-cell enumeration
        std::set<GridPos> cells;
        for (const auto& o : s.objects) {
            CHECK(cells.insert(o.pos).second);
            for (const auto& b : c.barriers) CHECK(o.pos != b);
        }
        CHECK(s.gripper == c.home);
        CHECK_FALSE(s.holding);
    }
}

TEST_CASE("make_scene: unsatisfiable spawn region is ConfigInvalid") {
    SceneConfig c;
    c.width = 8;
    c.height = 8;
    c.num_object_kinds = 1;
    c.num_container_kinds = 1;
    c.objects = {{0, 0, {2, 2, 2, 2}}, {1, 0, {2, 2, 2, 2}}};
    CHECK_THROWS_AS(make_scene(c, 0), ConfigInvalid);
}

TEST_CASE("step: NoOp is identity") {
    SceneState s = make_scene(base_config(), 3);
    CHECK(step(s, Action::NoOp) == s);
}

TEST_CASE("step: grasp picks the object under the gripper") {
    SceneState s = make_scene(base_config(), 3);
    s.gripper = s.objects[0].pos;
    SceneState t = step(s, Action::Grasp);
    CHECK(t.holding == 0);
    CHECK(t.objects[0].pos == t.gripper);
}

TEST_CASE("step: release into a container under the gripper") {
    SceneState s = make_scene(base_config(), 3);
    s.gripper = s.objects[0].pos;
    s = step(s, Action::Grasp);
    REQUIRE(s.holding == 0);
    // hand simulation: walk to the container, release, expect containment
    s.gripper = s.containers[0].pos;
    s.objects[0].pos = s.gripper;
    SceneState t = step(s, Action::Release);
    CHECK_FALSE(t.holding);
    CHECK(t.objects[0].in_container == 0);
    CHECK(t.objects[0].pos == t.containers[0].pos);
}

TEST_CASE("step: moves blocked by border and barriers degrade to no-op") {
    SceneConfig c = base_config();
    c.barriers = {{1, 0}};
    SceneState s = make_scene(c, 0);
    REQUIRE(s.gripper == GridPos{0, 0});
    CHECK(step(s, Action::MoveNorth).gripper == GridPos{0, 0});
    CHECK(step(s, Action::MoveWest).gripper == GridPos{0, 0});
    CHECK(step(s, Action::MoveEast).gripper == GridPos{0, 0});  // barrier at (1,0)
    CHECK(step(s, Action::MoveSouth).gripper == GridPos{0, 1});
}

TEST_CASE("predicate_holds: direct cases") {
    SceneState s = make_scene(base_config(), 5);
    s.gripper = s.objects[0].pos;
    s = step(s, Action::Grasp);
    CHECK_FALSE(predicate_holds(s, Predicate::on_table(0)));  // held, not on table
    s.gripper = s.containers[1].pos;
    s.objects[0].pos = s.gripper;
    s = step(s, Action::Release);
    CHECK(predicate_holds(s, Predicate::in_container(0, 1)));
    CHECK_FALSE(predicate_holds(s, Predicate::in_container(0, 0)));
    CHECK(predicate_holds(s, Predicate::gripper_at(s.gripper)));
    CHECK_THROWS_AS(predicate_holds(s, Predicate::on_table(99)), UnknownId);
}

TEST_CASE("predicate_holds: agrees with brute-force re-evaluation on random states") {
    SceneConfig c = base_config();
    Rng rng(11);
    SceneState s = make_scene(c, 11);
    for (int i = 0; i < 2000; ++i) {
        s = step(s, test::random_action(rng));
        for (int o = 0; o < 2; ++o) {
            for (int k = 0; k < 2; ++k) {
                bool expect = s.objects[o].in_container.has_value() &&
                              *s.objects[o].in_container == k;
                CHECK(predicate_holds(s, Predicate::in_container(o, k)) == expect);
            }
            bool on_table = s.holding != o && !s.objects[o].in_container.has_value();
            CHECK(predicate_holds(s, Predicate::on_table(o)) == on_table);
            Region r{0, 0, 3, 3};
            bool in_region = s.objects[o].pos.x <= 3 && s.objects[o].pos.y <= 3;
            CHECK(predicate_holds(s, Predicate::in_region(o, r)) == in_region);
        }
    }
}

TEST_CASE("encode: identical state/goal stacks to two equal halves") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 9);
    auto v = encode(s, s, c);
    REQUIRE(static_cast<int>(v.size()) == encode_dim(c));
    std::size_t half = v.size() / 2;
    for (std::size_t i = 0; i < half; ++i) CHECK(v[i] == v[half + i]);
}

TEST_CASE("encode: plane-count arithmetic") {
    SceneConfig c;
    c.width = 8;
    c.height = 8;
    c.num_object_kinds = 2;
    c.num_container_kinds = 1;
    // 2 states x 64 cells x (gripper + holding + 2 object kinds + 1 container kind + barrier)
    CHECK(encode_dim(c) == 2 * 64 * (1 + 1 + 2 + 1 + 1));
}

TEST_CASE("encode: moving one object flips exactly two coordinates of its kind plane") {
    SceneConfig c = base_config();
    SceneState s = make_scene(c, 13);
    SceneState moved = s;
    moved.objects[0].pos = GridPos{s.objects[0].pos.x == 4 ? 5 : 4, s.objects[0].pos.y};
    auto a = encode_state(s, c);
    auto b = encode_state(moved, c);
    int diffs = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diffs += a[i] != b[i];
    CHECK(diffs == 2);
    // and both diffs live in the kind-0 object plane
    int cells = c.width * c.height;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) CHECK(i / cells == 2);  // planes: gripper, holding, kind 0
}

TEST_CASE("property: random 1000-step rollouts keep every invariant") {
    SceneConfig c = base_config();
    c.barriers = {{4, 4}, {4, 5}, {2, 1}};
    Rng rng(77);
    SceneState s = make_scene(c, 77);
    for (int i = 0; i < 1000; ++i) {
        s = step(s, test::random_action(rng));
        REQUIRE(state_valid(s));
    }
    // reset-free soundness: every object still grasp-reachable
    for (const auto& o : s.objects) CHECK(shortest_path_len(s, s.gripper, o.pos) >= 0);
}

TEST_CASE("property: identical (config, seed, action sequence) is bit-identical") {
    SceneConfig c = base_config();
    Rng actions(5);
    std::vector<Action> seq;
    for (int i = 0; i < 300; ++i) seq.push_back(test::random_action(actions));
    SceneState a = make_scene(c, 21);
    SceneState b = make_scene(c, 21);
    for (Action act : seq) {
        a = step(a, act);
        b = step(b, act);
    }
    CHECK(a == b);
}

TEST_CASE("property: encode is injective on sampled state pairs") {
    SceneConfig c = base_config();
    Rng rng(123);
    SceneState s = make_scene(c, 123);
    std::vector<SceneState> states;
    for (int i = 0; i < 200; ++i) {
        s = step(s, test::random_action(rng));
        states.push_back(s);
    }
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            auto positions = [](const SceneState& st) {
                std::vector<std::pair<int, GridPos>> v;
                for (const auto& o : st.objects) v.emplace_back(o.kind, o.pos);
                return v;
            };
            bool same_core = states[i].gripper == states[j].gripper &&
                             states[i].holding.has_value() == states[j].holding.has_value() &&
                             positions(states[i]) == positions(states[j]);
            if (!same_core)
                CHECK(encode_state(states[i], c) != encode_state(states[j], c));
        }
}
