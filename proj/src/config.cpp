#include "soar/config.hpp"

#include <fstream>
#include <sstream>

namespace soar {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("bad integer for " + what + ": '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("bad number for " + what + ": '" + s + "'");
    }
}

const ConfigSection& require_section(const ConfigFile& cfg, const std::string& name) {
    auto it = cfg.find(name);
    if (it == cfg.end()) throw ConfigInvalid("missing [" + name + "] section");
    return it->second;
}

std::string get(const ConfigSection& s, const std::string& key, const std::string& dflt) {
    auto it = s.values.find(key);
    return it == s.values.end() ? dflt : it->second;
}

bool has(const ConfigSection& s, const std::string& key) {
    return s.values.count(key) > 0;
}

}  // namespace

ConfigFile parse_config_text(const std::string& text) {
    ConfigFile cfg;
    std::string section = "";
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigInvalid("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            cfg[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq != std::string::npos) {
            cfg[section].values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        } else {
            cfg[section].rows.push_back(split_ws(line));
        }
    }
    return cfg;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string task_language(const TaskSpec& task, const SceneConfig& scene) {
    auto obj_name = [&](int id) -> std::string {
        for (const auto& o : scene.objects)
            if (o.id == id) return scene.object_kind_name(o.kind);
        return "object";
    };
    auto cont_name = [&](int id) -> std::string {
        for (const auto& c : scene.containers)
            if (c.id == id) return scene.container_kind_name(c.kind);
        return "container";
    };
    switch (task.tmpl) {
        case TaskTemplate::PutIn:
            return "put the " + obj_name(task.object_id) + " in the " +
                   cont_name(task.container_id);
        case TaskTemplate::TakeOut:
            return "take the " + obj_name(task.object_id) + " out of the " +
                   cont_name(task.container_id);
        case TaskTemplate::MoveToRegion: {
            std::ostringstream os;
            os << "move the " << obj_name(task.object_id) << " to region ("
               << task.region.x0 << "," << task.region.y0 << ")-(" << task.region.x1 << ","
               << task.region.y1 << ")";
            return os.str();
        }
    }
    return "";
}

SceneConfig scene_from_config(const ConfigFile& cfg) {
    SceneConfig sc;
    const ConfigSection& s = require_section(cfg, "scene");
    sc.name = get(s, "name", "scene");
    sc.width = to_int(get(s, "width", "8"), "width");
    sc.height = to_int(get(s, "height", "8"), "height");
    sc.num_object_kinds = to_int(get(s, "object_kinds", "2"), "object_kinds");
    sc.num_container_kinds = to_int(get(s, "container_kinds", "1"), "container_kinds");
    sc.random_barriers = to_int(get(s, "random_barriers", "0"), "random_barriers");
    if (has(s, "home")) {
        auto toks = split_ws(get(s, "home", "0 0"));
        if (toks.size() != 2) throw ConfigInvalid("home needs two coordinates");
        sc.home = {to_int(toks[0], "home.x"), to_int(toks[1], "home.y")};
    }
    if (auto it = cfg.find("object_kind_names"); it != cfg.end())
        for (const auto& [k, v] : it->second.values)
            sc.object_kind_names[to_int(k, "object kind id")] = v;
    if (auto it = cfg.find("container_kind_names"); it != cfg.end())
        for (const auto& [k, v] : it->second.values)
            sc.container_kind_names[to_int(k, "container kind id")] = v;
    if (auto it = cfg.find("objects"); it != cfg.end())
        for (const auto& row : it->second.rows) {
            if (row.size() != 6)
                throw ConfigInvalid("[objects] rows are: id kind x0 y0 x1 y1");
            ObjectSpec o;
            o.id = to_int(row[0], "object id");
            o.kind = to_int(row[1], "object kind");
            o.spawn = {to_int(row[2], "x0"), to_int(row[3], "y0"), to_int(row[4], "x1"),
                       to_int(row[5], "y1")};
            sc.objects.push_back(o);
        }
    if (auto it = cfg.find("containers"); it != cfg.end())
        for (const auto& row : it->second.rows) {
            if (row.size() != 4 && row.size() != 6)
                throw ConfigInvalid("[containers] rows are: id kind x y [x1 y1]");
            ContainerSpec c;
            c.id = to_int(row[0], "container id");
            c.kind = to_int(row[1], "container kind");
            int x0 = to_int(row[2], "x"), y0 = to_int(row[3], "y");
            c.spawn = row.size() == 4
                          ? Region{x0, y0, x0, y0}
                          : Region{x0, y0, to_int(row[4], "x1"), to_int(row[5], "y1")};
            sc.containers.push_back(c);
        }
    if (auto it = cfg.find("barriers"); it != cfg.end())
        for (const auto& row : it->second.rows) {
            if (row.size() != 2) throw ConfigInvalid("[barriers] rows are: x y");
            sc.barriers.push_back({to_int(row[0], "x"), to_int(row[1], "y")});
        }
    if (auto it = cfg.find("tasks"); it != cfg.end()) {
        int next_id = 0;
        for (const auto& row : it->second.rows) {
            if (row.empty()) continue;
            TaskSpec t;
            t.id = next_id++;
            t.tmpl = template_from_name(row[0]);
            if (t.tmpl == TaskTemplate::MoveToRegion) {
                if (row.size() != 6)
                    throw ConfigInvalid("[tasks] move_to_region rows are: tmpl obj x0 y0 x1 y1");
                t.object_id = to_int(row[1], "task object");
                t.region = {to_int(row[2], "x0"), to_int(row[3], "y0"), to_int(row[4], "x1"),
                            to_int(row[5], "y1")};
            } else {
                if (row.size() != 3)
                    throw ConfigInvalid("[tasks] rows are: tmpl obj container");
                t.object_id = to_int(row[1], "task object");
                t.container_id = to_int(row[2], "task container");
            }
            t.language = task_language(t, sc);
            sc.tasks.push_back(t);
        }
    }
    sc.check();
    return sc;
}

SceneConfig load_scene_config(const std::string& path) {
    return scene_from_config(parse_config_file(path));
}

ExperimentConfig experiment_from_config(const ConfigFile& cfg) {
    ExperimentConfig e;
    const ConfigSection& s = require_section(cfg, "experiment");
    e.pretrain_scene_path = get(s, "pretrain_scene", "");
    if (e.pretrain_scene_path.empty()) throw ConfigInvalid("pretrain_scene is required");
    {
        std::string joined = get(s, "shifted_scenes", "");
        std::istringstream is(joined);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) e.shifted_scene_paths.push_back(tok);
        }
    }
    e.demo_count = to_int(get(s, "demo_count", "600"), "demo_count");
    e.expert_epsilon = to_double(get(s, "expert_epsilon", "0.1"), "expert_epsilon");
    e.collect_budget = to_int(get(s, "collect_budget", "300"), "collect_budget");
    e.fleet_workers = to_int(get(s, "fleet_workers", "5"), "fleet_workers");
    e.eval_episodes_per_task =
        to_int(get(s, "eval_episodes_per_task", "50"), "eval_episodes_per_task");
    e.horizon = to_int(get(s, "horizon", "100"), "horizon");
    e.subgoal_period = to_int(get(s, "subgoal_period", "20"), "subgoal_period");
    e.seed = static_cast<std::uint64_t>(
        std::stoull(get(s, "seed", "0")));

    if (auto it = cfg.find("detector"); it != cfg.end()) {
        e.detector_precision = to_double(get(it->second, "precision", "0.63"), "precision");
        e.detector_recall = to_double(get(it->second, "recall", "1.0"), "recall");
        e.detector_accuracy = to_double(get(it->second, "accuracy", "0.7887"), "accuracy");
    }
    if (auto it = cfg.find("relabel"); it != cfg.end()) {
        e.relabel.pretrain_window =
            to_int(get(it->second, "pretrain_window", "24"), "pretrain_window");
        e.relabel.autonomous_window =
            to_int(get(it->second, "autonomous_window", "12"), "autonomous_window");
        e.relabel.hindsight_fraction =
            to_double(get(it->second, "hindsight_fraction", "1.0"), "hindsight_fraction");
    }
    if (auto it = cfg.find("mixture"); it != cfg.end()) {
        e.per_scene_autonomous_ratio =
            to_double(get(it->second, "per_scene_autonomous", "0.3"), "per_scene_autonomous");
        e.generalist_autonomous_ratio =
            to_double(get(it->second, "generalist_autonomous", "0.2"), "generalist_autonomous");
    }
    auto parse_train = [&](const std::string& name, TrainConfig& t) {
        if (auto it = cfg.find(name); it != cfg.end()) {
            t.step_size = to_double(get(it->second, "step_size", "0.01"), "step_size");
            t.batch_size = to_int(get(it->second, "batch_size", "64"), "batch_size");
            t.gradient_steps =
                to_int(get(it->second, "gradient_steps", "4000"), "gradient_steps");
        }
        if (t.step_size <= 0.0 || t.batch_size <= 0)
            throw ConfigInvalid("train step_size and batch_size must be positive");
    };
    parse_train("pretrain", e.pretrain_train);
    parse_train("improve", e.improve_train);
    if (auto it = cfg.find("policy"); it != cfg.end()) {
        e.policy.hidden = to_int(get(it->second, "hidden", "64"), "hidden");
        e.policy.embed_dim = to_int(get(it->second, "embed_dim", "8"), "embed_dim");
    }
    if (auto it = cfg.find("subgoal_noise"); it != cfg.end()) {
        e.subgoal_noise.perturb_prob =
            to_double(get(it->second, "perturb_prob", "0.2"), "perturb_prob");
        e.subgoal_noise.max_offset = to_int(get(it->second, "max_offset", "1"), "max_offset");
    }
    return e;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_from_config(parse_config_file(path));
}

}  // namespace soar
