#pragma once

#include <map>
#include <string>
#include <vector>

#include "soar/policy.hpp"
#include "soar/scene.hpp"
#include "soar/vqa.hpp"

namespace soar {

/// Minimal sectioned plain-text format: `[section]` headers, `key = value`
/// pairs, and bare whitespace-separated rows for table sections. `#`
/// comments. Schema documented in docs/config-format.md.
struct ConfigSection {
    std::map<std::string, std::string> values;
    std::vector<std::vector<std::string>> rows;
};

using ConfigFile = std::map<std::string, ConfigSection>;

ConfigFile parse_config_file(const std::string& path);
ConfigFile parse_config_text(const std::string& text);

SceneConfig scene_from_config(const ConfigFile& cfg);
SceneConfig load_scene_config(const std::string& path);

struct ExperimentConfig {
    std::string pretrain_scene_path;
    std::vector<std::string> shifted_scene_paths;
    int demo_count = 600;
    double expert_epsilon = 0.1;
    // detector quality triple, inverted into fp/fn rates at load time
    double detector_precision = 0.63;
    double detector_recall = 1.0;
    double detector_accuracy = 0.7887;
    RelabelConfig relabel;
    double per_scene_autonomous_ratio = 0.3;
    double generalist_autonomous_ratio = 0.2;
    TrainConfig pretrain_train;
    TrainConfig improve_train;
    PolicyConfig policy;
    SubgoalNoise subgoal_noise;
    int collect_budget = 300;
    int fleet_workers = 5;
    int eval_episodes_per_task = 50;
    int horizon = 100;
    int subgoal_period = 20;
    std::uint64_t seed = 0;
};

ExperimentConfig experiment_from_config(const ConfigFile& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

/// Default language command for a task, used when configs omit one.
std::string task_language(const TaskSpec& task, const SceneConfig& scene);

}  // namespace soar
