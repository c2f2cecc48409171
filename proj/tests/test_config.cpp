#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "soar/config.hpp"

using namespace soar;

namespace {

const char* kSceneText = R"(# a small test scene
[scene]
name = demo
width = 8
height = 8
object_kinds = 3
container_kinds = 2
home = 0 0

[object_kind_names]
0 = green block
1 = orange crayon

[container_kind_names]
0 = brown bowl

[objects]
0 0 1 1 6 6
1 1 1 1 6 6

[containers]
0 0 6 6

[barriers]
3 0
3 1

[tasks]
put_in 0 0
take_out 0 0
move_to_region 1 0 0 3 3
)";

}  // namespace

TEST_CASE("parse_config_text: sections, key-values, rows, comments") {
    ConfigFile cfg = parse_config_text(kSceneText);
    CHECK(cfg.count("scene") == 1);
    CHECK(cfg.at("scene").values.at("name") == "demo");
    CHECK(cfg.at("scene").values.at("width") == "8");
    CHECK(cfg.at("objects").rows.size() == 2);
    CHECK(cfg.at("objects").rows[0] ==
          std::vector<std::string>{"0", "0", "1", "1", "6", "6"});
    CHECK(cfg.at("barriers").rows.size() == 2);
}

TEST_CASE("parse_config_text: unterminated section header is rejected with its line") {
    try {
        parse_config_text("[scene\nwidth = 8\n");
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("scene_from_config: full scene round trip") {
    SceneConfig sc = scene_from_config(parse_config_text(kSceneText));
    CHECK(sc.name == "demo");
    CHECK(sc.width == 8);
    CHECK(sc.num_object_kinds == 3);
    CHECK(sc.num_container_kinds == 2);
    CHECK(sc.objects.size() == 2);
    CHECK(sc.containers.size() == 1);
    CHECK(sc.barriers.size() == 2);
    REQUIRE(sc.tasks.size() == 3);
    CHECK(sc.tasks[0].tmpl == TaskTemplate::PutIn);
    CHECK(sc.tasks[0].language == "put the green block in the brown bowl");
    CHECK(sc.tasks[1].language == "take the green block out of the brown bowl");
    CHECK(sc.tasks[2].tmpl == TaskTemplate::MoveToRegion);
    CHECK(sc.tasks[2].region == Region{0, 0, 3, 3});
    CHECK(sc.tasks[2].language == "move the orange crayon to region (0,0)-(3,3)");
    // parsed scenes must satisfy the same contract as hand-built ones
    sc.check();
}

TEST_CASE("scene_from_config: malformed rows are rejected") {
    CHECK_THROWS_AS(
        scene_from_config(parse_config_text("[scene]\nwidth = 8\n[objects]\n0 0 1\n")),
        ConfigInvalid);
    CHECK_THROWS_AS(
        scene_from_config(parse_config_text("[scene]\n[tasks]\nfold 0 0\n")),
        UnsupportedTemplate);
    CHECK_THROWS_AS(scene_from_config(parse_config_text("[nothing]\n")), ConfigInvalid);
}

TEST_CASE("experiment_from_config: defaults and overrides") {
    const char* text = R"(
[experiment]
pretrain_scene = configs/pretrain.scene
shifted_scenes = a.scene, b.scene , c.scene
demo_count = 150
collect_budget = 120
seed = 9

[detector]
precision = 0.63
recall = 1.0
accuracy = 0.7887

[mixture]
per_scene_autonomous = 0.3
generalist_autonomous = 0.2

[pretrain]
gradient_steps = 9000
step_size = 0.02

[policy]
hidden = 96
)";
    ExperimentConfig e = experiment_from_config(parse_config_text(text));
    CHECK(e.pretrain_scene_path == "configs/pretrain.scene");
    CHECK(e.shifted_scene_paths ==
          std::vector<std::string>{"a.scene", "b.scene", "c.scene"});
    CHECK(e.demo_count == 150);
    CHECK(e.collect_budget == 120);
    CHECK(e.seed == 9);
    CHECK(e.detector_precision == 0.63);
    CHECK(e.pretrain_train.gradient_steps == 9000);
    CHECK(e.pretrain_train.step_size == 0.02);
    CHECK(e.improve_train.gradient_steps == 4000);  // untouched default
    CHECK(e.policy.hidden == 96);
    CHECK(e.relabel.pretrain_window == 24);
    CHECK(e.relabel.autonomous_window == 12);
    CHECK(e.per_scene_autonomous_ratio == 0.3);
    CHECK(e.generalist_autonomous_ratio == 0.2);
}

TEST_CASE("experiment_from_config: missing scene and bad numerics rejected") {
    CHECK_THROWS_AS(experiment_from_config(parse_config_text("[experiment]\n")),
                    ConfigInvalid);
    CHECK_THROWS_AS(experiment_from_config(parse_config_text(
                        "[experiment]\npretrain_scene = x\ndemo_count = many\n")),
                    ConfigInvalid);
    CHECK_THROWS_AS(experiment_from_config(parse_config_text(
                        "[experiment]\npretrain_scene = x\n[pretrain]\nstep_size = -1\n")),
                    ConfigInvalid);
}

TEST_CASE("load_scene_config: file round trip and missing file") {
    auto path = (std::filesystem::temp_directory_path() / "soar_scene_test.cfg").string();
    {
        std::ofstream out(path);
        out << kSceneText;
    }
    SceneConfig sc = load_scene_config(path);
    CHECK(sc.name == "demo");
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_scene_config(path), ConfigInvalid);
}
