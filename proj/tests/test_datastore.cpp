#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "soar/collect.hpp"
#include "soar/datastore.hpp"

using namespace soar;
using namespace soar::test;

namespace {

// small empty scene for cheap synthetic records
SceneConfig bare_config() {
    SceneConfig c;
    c.name = "bare";
    c.width = 4;
    c.height = 4;
    c.num_object_kinds = 1;
    c.num_container_kinds = 1;
    c.home = {0, 0};
    c.check();
    return c;
}

Trajectory synthetic_record(const SceneConfig& c, std::uint64_t seed, Rng& rng) {
    Trajectory traj;
    traj.scene_id = c.name;
    traj.task = TaskSpec{0, TaskTemplate::MoveToRegion, 0, -1,
                         Region{0, 0, c.width - 1, c.height - 1}, "wander"};
    traj.vqa.question = "Is the gripper anywhere?";
    traj.vqa.answer_implies_feasible = false;
    traj.vqa.predicate = Predicate::gripper_at({0, 0});
    SceneState s = make_scene(c, seed);
    traj.observations.push_back(s);
    const int horizon = 10;
    for (int t = 0; t < horizon; ++t) {
        if (t % 2 == 0) {
            traj.subgoals.push_back(s);
            traj.subgoal_steps.push_back(t);
        }
        Action a = random_action(rng);
        s = step(s, a);
        traj.actions.push_back(a);
        traj.observations.push_back(s);
    }
    traj.vlm_success = (seed % 3) == 0;
    traj.gt_success = (seed % 2) == 0;
    traj.used_fallback = (seed % 5) == 0;
    traj.policy_version = "expert";
    traj.seed = seed;
    traj.created_at = static_cast<std::int64_t>(seed);
    return traj;
}

std::string temp_path(const char* stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("append then records: round trip, indices increase") {
    SceneConfig c = bare_config();
    Rng rng(1);
    Datastore store;
    Trajectory a = synthetic_record(c, 10, rng);
    Trajectory b = synthetic_record(c, 11, rng);
    std::size_t ia = store.append(a);
    std::size_t ib = store.append(b);
    CHECK(ia == 0);
    CHECK(ib == 1);
    CHECK(store.size() == 2);
    CHECK(store.records()[0].seed == 10);
    CHECK(store.records()[1].seed == 11);
    CHECK(trajectory_to_json(store.records()[0]) == trajectory_to_json(a));
}

TEST_CASE("append rejects invalid records and leaves the store unchanged") {
    SceneConfig c = bare_config();
    Rng rng(2);
    Datastore store;
    store.append(synthetic_record(c, 20, rng));

    Trajectory bad = synthetic_record(c, 21, rng);
    bad.actions.pop_back();  // length mismatch
    CHECK_THROWS_AS(store.append(bad), SchemaViolation);
    CHECK(store.size() == 1);
}

TEST_CASE("validate: collector output is clean; known corruptions are named") {
    SceneConfig c = base_config();
    TruthfulOracle oracle(c);
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    ExpertActor expert(0.1);
    RolloutConfig rcfg;
    Rng rng(3);
    SceneState start = make_scene(c, 77);
    auto r = rollout(start, expert, c.tasks[0], gen, oracle, c, {}, rcfg, rng);
    CHECK(validate(r.trajectory).empty());

    SUBCASE("truncated action list") {
        Trajectory t = r.trajectory;
        t.actions.pop_back();
        auto v = validate(t);
        REQUIRE(!v.empty());
        CHECK(v[0] == "observation/action length mismatch");
    }
    SUBCASE("tampered intermediate observation pinpoints the timestep") {
        Trajectory t = r.trajectory;
        t.observations[42].gripper.x = (t.observations[42].gripper.x + 1) % c.width;
        auto v = validate(t);
        bool found = false;
        for (const auto& msg : v)
            if (msg == "transition inconsistency at t=41") found = true;
        CHECK(found);
    }
    SUBCASE("irregular subgoal cadence") {
        Trajectory t = r.trajectory;
        t.subgoal_steps[2] += 1;
        auto v = validate(t);
        REQUIRE(!v.empty());
        CHECK(std::count(v.begin(), v.end(), "irregular subgoal issue timesteps") == 1);
    }
}

TEST_CASE("filter: views preserve order, compose as intersections, never copy") {
    SceneConfig c = bare_config();
    Rng rng(4);
    Datastore store;
    for (std::uint64_t s = 0; s < 60; ++s) store.append(synthetic_record(c, s, rng));

    auto all = store.filter([](const Trajectory&) { return true; });
    CHECK(all.size() == store.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == &store.records()[i]);

    auto succ = store.filter([](const Trajectory& t) { return t.vlm_success; });
    auto fall = store.filter([](const Trajectory& t) { return t.used_fallback; });
    auto both = store.filter(
        [](const Trajectory& t) { return t.vlm_success && t.used_fallback; });
    // independent set-intersection oracle
    std::set<const Trajectory*> sa(succ.begin(), succ.end());
    std::size_t inter = 0;
    for (auto* p : fall) inter += sa.count(p);
    CHECK(both.size() == inter);
    // stability across repeated evaluation
    auto succ2 = store.filter([](const Trajectory& t) { return t.vlm_success; });
    CHECK(succ == succ2);
}

TEST_CASE("filter on labels [T,F,T,F] keeps 2 records") {
    SceneConfig c = bare_config();
    Rng rng(5);
    Datastore store;
    for (int i = 0; i < 4; ++i) {
        Trajectory t = synthetic_record(c, 100 + i, rng);
        t.vlm_success = (i % 2) == 0;
        store.append(std::move(t));
    }
    CHECK(store.filter([](const Trajectory& t) { return t.vlm_success; }).size() == 2);
}

TEST_CASE("stats: exact counts on empty and small stores") {
    Datastore empty;
    DatasetStats zero = empty.stats();
    CHECK(zero.total == 0);
    CHECK(zero.vlm_successes == 0);
    CHECK(zero.true_positives == 0);
    CHECK(zero.precision() == 0.0);

    SceneConfig c = bare_config();
    Rng rng(6);
    Datastore store;
    for (int i = 0; i < 10; ++i) {
        Trajectory t = synthetic_record(c, 200 + i, rng);
        t.vlm_success = i < 4;
        store.append(std::move(t));
    }
    DatasetStats s = store.stats();
    CHECK(s.total == 10);
    CHECK(s.vlm_successes == 4);
    CHECK(s.vlm_failures == 6);
    CHECK(s.vlm_successes + s.vlm_failures == s.total);
    CHECK(s.per_scene.at("bare") == 10);
    CHECK(s.per_task.at(0) == 10);
}

TEST_CASE("stats: confusion on a detector-labeled store recovers the operating point") {
    // forward-simulate the calibrated detector over 1e5 records: base success
    // rate 0.36, false-positive rate 0.33, false-negative rate 0 -> the
    // measured precision must land at 0.63 +/- 0.02 with recall exactly 1.0
    SceneConfig c = bare_config();
    Rng rng(7);
    Trajectory proto = synthetic_record(c, 300, rng);
    Datastore store;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double base = 0.36, fp = 0.33;
    for (int i = 0; i < 100000; ++i) {
        Trajectory t = proto;
        t.created_at = i;
        t.gt_success = coin(rng) < base;
        t.vlm_success = t.gt_success ? true : coin(rng) < fp;
        store.append(std::move(t));
    }
    DatasetStats s = store.stats();
    CHECK(s.true_positives + s.false_positives + s.false_negatives + s.true_negatives ==
          s.total);
    CHECK(s.false_negatives == 0);
    CHECK(s.recall() == 1.0);
    CHECK(s.precision() == doctest::Approx(0.63).epsilon(0.0317));  // +/- 0.02 absolute
    CHECK(s.accuracy() == doctest::Approx(0.7887).epsilon(0.01));
}

TEST_CASE("export/import: byte-identical round trip over 1e3 random records") {
    SceneConfig c = bare_config();
    Rng rng(8);
    Datastore store;
    for (std::uint64_t s = 0; s < 1000; ++s) store.append(synthetic_record(c, s, rng));

    std::string p1 = temp_path("soar_ds_rt1.jsonl");
    std::string p2 = temp_path("soar_ds_rt2.jsonl");
    store.export_jsonl(p1);

    // line count = record count
    std::ifstream in(p1);
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == store.size());

    Datastore back = Datastore::import_jsonl(p1);
    REQUIRE(back.size() == store.size());
    // multiset equality via canonical serialization
    std::multiset<std::string> a, b;
    for (const auto& t : store.records()) a.insert(trajectory_to_json(t));
    for (const auto& t : back.records()) b.insert(trajectory_to_json(t));
    CHECK(a == b);

    back.export_jsonl(p2);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("import: corruption is reported with its line number") {
    SceneConfig c = bare_config();
    Rng rng(9);
    Datastore store;
    for (std::uint64_t s = 0; s < 5; ++s) store.append(synthetic_record(c, s, rng));
    std::string p = temp_path("soar_ds_bad.jsonl");
    store.export_jsonl(p);

    SUBCASE("unparseable line") {
        std::ifstream in(p);
        std::vector<std::string> lines;
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        in.close();
        lines[2] = "{not json";
        std::ofstream out(p, std::ios::binary);
        for (const auto& l : lines) out << l << "\n";
        out.close();
        try {
            Datastore::import_jsonl(p);
            FAIL("expected SchemaViolation");
        } catch (const SchemaViolation& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("parseable but invalid record") {
        std::ifstream in(p);
        std::vector<std::string> lines;
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        in.close();
        Trajectory bad = trajectory_from_json(lines[4]);
        bad.observations[3].gripper.x = (bad.observations[3].gripper.x + 1) % c.width;
        lines[4] = trajectory_to_json(bad);
        std::ofstream out(p, std::ios::binary);
        for (const auto& l : lines) out << l << "\n";
        out.close();
        try {
            Datastore::import_jsonl(p);
            FAIL("expected SchemaViolation");
        } catch (const SchemaViolation& e) {
            CHECK(std::string(e.what()).find("line 5") != std::string::npos);
        }
    }
    std::remove(p.c_str());
}

TEST_CASE("trajectory JSON carries the schema version") {
    SceneConfig c = bare_config();
    Rng rng(10);
    std::string j = trajectory_to_json(synthetic_record(c, 400, rng));
    CHECK(j.find("\"schema_version\":1") != std::string::npos);
}
