#include "soar/datastore.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace soar {

namespace {

using nlohmann::json;

json pos_json(GridPos p) { return json::array({p.x, p.y}); }

GridPos pos_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json region_json(const Region& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

Region region_from(const json& j) {
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

json state_json(const SceneState& s) {
    json objects = json::array();
    for (const auto& o : s.objects) {
        json jo;
        jo["kind"] = o.kind;
        jo["pos"] = pos_json(o.pos);
        if (o.in_container) jo["in"] = *o.in_container;
        else jo["in"] = nullptr;
        objects.push_back(jo);
    }
    json containers = json::array();
    for (const auto& c : s.containers) {
        json jc;
        jc["kind"] = c.kind;
        jc["pos"] = pos_json(c.pos);
        containers.push_back(jc);
    }
    json barriers = json::array();
    for (const auto& b : s.barriers) barriers.push_back(pos_json(b));
    json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["gripper"] = pos_json(s.gripper);
    j["home"] = pos_json(s.home);
    if (s.holding) j["holding"] = *s.holding;
    else j["holding"] = nullptr;
    j["objects"] = objects;
    j["containers"] = containers;
    j["barriers"] = barriers;
    return j;
}

SceneState state_from(const json& j) {
    SceneState s;
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.gripper = pos_from(j.at("gripper"));
    s.home = pos_from(j.at("home"));
    if (!j.at("holding").is_null()) s.holding = j.at("holding").get<int>();
    for (const auto& jo : j.at("objects")) {
        ObjectState o;
        o.kind = jo.at("kind").get<int>();
        o.pos = pos_from(jo.at("pos"));
        if (!jo.at("in").is_null()) o.in_container = jo.at("in").get<int>();
        s.objects.push_back(o);
    }
    for (const auto& jc : j.at("containers"))
        s.containers.push_back({jc.at("kind").get<int>(), pos_from(jc.at("pos"))});
    for (const auto& jb : j.at("barriers")) s.barriers.push_back(pos_from(jb));
    return s;
}

json task_json(const TaskSpec& t) {
    json j;
    j["id"] = t.id;
    j["template"] = template_name(t.tmpl);
    j["object"] = t.object_id;
    j["container"] = t.container_id;
    j["region"] = region_json(t.region);
    j["language"] = t.language;
    return j;
}

TaskSpec task_from(const json& j) {
    TaskSpec t;
    t.id = j.at("id").get<int>();
    t.tmpl = template_from_name(j.at("template").get<std::string>());
    t.object_id = j.at("object").get<int>();
    t.container_id = j.at("container").get<int>();
    t.region = region_from(j.at("region"));
    t.language = j.at("language").get<std::string>();
    return t;
}

json predicate_json(const Predicate& p) {
    json j;
    switch (p.kind) {
        case PredicateKind::InContainer: j["kind"] = "in_container"; break;
        case PredicateKind::OnTable: j["kind"] = "on_table"; break;
        case PredicateKind::GripperAt: j["kind"] = "gripper_at"; break;
        case PredicateKind::InRegion: j["kind"] = "in_region"; break;
    }
    j["object"] = p.object_id;
    j["container"] = p.container_id;
    j["pos"] = pos_json(p.pos);
    j["region"] = region_json(p.region);
    return j;
}

Predicate predicate_from(const json& j) {
    Predicate p;
    std::string k = j.at("kind").get<std::string>();
    if (k == "in_container") p.kind = PredicateKind::InContainer;
    else if (k == "on_table") p.kind = PredicateKind::OnTable;
    else if (k == "gripper_at") p.kind = PredicateKind::GripperAt;
    else if (k == "in_region") p.kind = PredicateKind::InRegion;
    else throw SchemaViolation("unknown predicate kind: " + k);
    p.object_id = j.at("object").get<int>();
    p.container_id = j.at("container").get<int>();
    p.pos = pos_from(j.at("pos"));
    p.region = region_from(j.at("region"));
    return p;
}

}  // namespace

std::vector<std::string> validate(const Trajectory& traj) {
    std::vector<std::string> violations;
    if (traj.observations.size() != traj.actions.size() + 1)
        violations.push_back("observation/action length mismatch");
    if (traj.subgoals.size() != traj.subgoal_steps.size())
        violations.push_back("subgoal/timestep length mismatch");
    if (!traj.subgoal_steps.empty() && !traj.actions.empty()) {
        std::size_t k = traj.actions.size() / traj.subgoal_steps.size();
        if (k == 0 || traj.actions.size() % traj.subgoal_steps.size() != 0) {
            violations.push_back("horizon not divisible by subgoal count");
        } else {
            for (std::size_t i = 0; i < traj.subgoal_steps.size(); ++i)
                if (traj.subgoal_steps[i] != static_cast<int>(i * k)) {
                    violations.push_back("irregular subgoal issue timesteps");
                    break;
                }
        }
    }
    for (const auto& obs : traj.observations)
        if (!state_valid(obs)) {
            violations.push_back("invalid scene state among observations");
            break;
        }
    if (traj.observations.size() == traj.actions.size() + 1) {
        for (std::size_t t = 0; t < traj.actions.size(); ++t) {
            if (!(step(traj.observations[t], traj.actions[t]) == traj.observations[t + 1])) {
                violations.push_back("transition inconsistency at t=" + std::to_string(t));
                break;
            }
        }
    }
    return violations;
}

std::size_t Datastore::append(Trajectory traj) {
    auto violations = validate(traj);
    if (!violations.empty()) {
        std::string msg = "trajectory validation failed:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw SchemaViolation(msg);
    }
    records_.push_back(std::move(traj));
    return records_.size() - 1;
}

std::vector<const Trajectory*> Datastore::filter(
    const std::function<bool(const Trajectory&)>& pred) const {
    std::vector<const Trajectory*> out;
    for (const auto& r : records_)
        if (pred(r)) out.push_back(&r);
    return out;
}

DatasetStats Datastore::stats() const {
    DatasetStats s;
    s.total = records_.size();
    for (const auto& r : records_) {
        if (r.vlm_success) ++s.vlm_successes;
        else ++s.vlm_failures;
        if (r.used_fallback) ++s.fallbacks;
        if (r.vlm_success && r.gt_success) ++s.true_positives;
        if (r.vlm_success && !r.gt_success) ++s.false_positives;
        if (!r.vlm_success && r.gt_success) ++s.false_negatives;
        if (!r.vlm_success && !r.gt_success) ++s.true_negatives;
        ++s.per_scene[r.scene_id];
        ++s.per_task[r.task.id];
    }
    return s;
}

std::string trajectory_to_json(const Trajectory& traj) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scene_id"] = traj.scene_id;
    j["task"] = task_json(traj.task);
    json vqa;
    vqa["question"] = traj.vqa.question;
    vqa["answer_implies_feasible"] = traj.vqa.answer_implies_feasible;
    vqa["predicate"] = predicate_json(traj.vqa.predicate);
    j["vqa"] = vqa;
    json obs = json::array();
    for (const auto& o : traj.observations) obs.push_back(state_json(o));
    j["observations"] = obs;
    json acts = json::array();
    for (Action a : traj.actions) acts.push_back(action_name(a));
    j["actions"] = acts;
    json subgoals = json::array();
    for (std::size_t i = 0; i < traj.subgoals.size(); ++i) {
        json sg;
        sg["step"] = traj.subgoal_steps[i];
        sg["state"] = state_json(traj.subgoals[i]);
        subgoals.push_back(sg);
    }
    j["subgoals"] = subgoals;
    j["vlm_success"] = traj.vlm_success;
    j["gt_success"] = traj.gt_success;
    j["used_fallback"] = traj.used_fallback;
    j["policy_version"] = traj.policy_version;
    j["seed"] = traj.seed;
    j["created_at"] = traj.created_at;
    return j.dump();
}

Trajectory trajectory_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw SchemaViolation(std::string("malformed JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw SchemaViolation("unsupported schema version");
        Trajectory t;
        t.scene_id = j.at("scene_id").get<std::string>();
        t.task = task_from(j.at("task"));
        t.vqa.question = j.at("vqa").at("question").get<std::string>();
        t.vqa.answer_implies_feasible = j.at("vqa").at("answer_implies_feasible").get<bool>();
        t.vqa.predicate = predicate_from(j.at("vqa").at("predicate"));
        for (const auto& o : j.at("observations")) t.observations.push_back(state_from(o));
        for (const auto& a : j.at("actions"))
            t.actions.push_back(action_from_name(a.get<std::string>()));
        for (const auto& sg : j.at("subgoals")) {
            t.subgoal_steps.push_back(sg.at("step").get<int>());
            t.subgoals.push_back(state_from(sg.at("state")));
        }
        t.vlm_success = j.at("vlm_success").get<bool>();
        t.gt_success = j.at("gt_success").get<bool>();
        t.used_fallback = j.at("used_fallback").get<bool>();
        t.policy_version = j.at("policy_version").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.created_at = j.at("created_at").get<std::int64_t>();
        return t;
    } catch (const json::exception& e) {
        throw SchemaViolation(std::string("schema error: ") + e.what());
    }
}

void Datastore::export_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SoarError("cannot open for write: " + path);
    for (const auto& r : records_) out << trajectory_to_json(r) << "\n";
}

Datastore Datastore::import_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SoarError("cannot open for read: " + path);
    Datastore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            store.append(trajectory_from_json(line));
        } catch (const SchemaViolation& e) {
            throw SchemaViolation("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return store;
}

}  // namespace soar
