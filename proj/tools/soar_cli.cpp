// Experiment driver: demo generation, pretraining, autonomous collection,
// improvement, evaluation, and report tables, all off one config file.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soar/collect.hpp"
#include "soar/config.hpp"

using namespace soar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SoarError("cannot hash missing file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

// Wilson 95% score interval for a binomial proportion.
std::pair<double, double> wilson95(int successes, int n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void write_manifest(const std::string& out_path, const json& body) {
    std::ofstream out(out_path + ".manifest.json", std::ios::binary);
    out << body.dump(2) << "\n";
}

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ExperimentConfig load_experiment(const CommonArgs& args) {
    ExperimentConfig e = load_experiment_config(args.config_path);
    if (args.seed_set) e.seed = args.seed;
    return e;
}

fs::path config_dir(const CommonArgs& args) {
    return fs::path(args.config_path).parent_path();
}

SceneConfig load_scene_relative(const CommonArgs& args, const std::string& rel) {
    fs::path p(rel);
    if (!p.is_absolute() && !fs::exists(p)) {
        fs::path alt = config_dir(args) / p;
        if (fs::exists(alt)) p = alt;
    }
    return load_scene_config(p.string());
}

DetectorConfig detector_from(const ExperimentConfig& e) {
    CalibratedDetector c =
        calibrate_detector(e.detector_precision, e.detector_recall, e.detector_accuracy);
    return DetectorConfig{c.fp_rate, c.fn_rate};
}

Datastore load_store(const std::string& path) { return Datastore::import_jsonl(path); }

// A feasible fresh start for `task`, found by scanning make_scene seeds.
SceneState feasible_start(const SceneConfig& scene, const TaskSpec& task,
                          const OracleClient& oracle, std::uint64_t base_seed,
                          int max_tries = 5000) {
    for (int t = 0; t < max_tries; ++t) {
        SceneState s = make_scene(scene, base_seed + static_cast<std::uint64_t>(t));
        if (oracle.judge_feasible(s, task)) return s;
    }
    throw NoFeasibleStart("no feasible start for task " + std::to_string(task.id));
}

// ---------------------------------------------------------------------------
// gen-demos
// ---------------------------------------------------------------------------

int cmd_gen_demos(const CommonArgs& args, const std::string& out_path) {
    ExperimentConfig e = load_experiment(args);
    SceneConfig scene = load_scene_relative(args, e.pretrain_scene_path);
    TruthfulOracle oracle(scene);
    OracleSubgoalGenerator gen(e.subgoal_noise);
    ExpertActor expert(e.expert_epsilon);
    RolloutConfig rcfg;
    rcfg.horizon = e.horizon;
    rcfg.subgoal_period = e.subgoal_period;
    rcfg.check();

    Datastore store;
    Rng rng(e.seed);
    int skipped = 0;
    for (int i = 0; i < e.demo_count; ++i) {
        const TaskSpec& task = scene.tasks[static_cast<std::size_t>(i) % scene.tasks.size()];
        std::uint64_t base = e.seed * 1000003ULL + static_cast<std::uint64_t>(i) * 8191ULL;
        Trajectory traj;
        try {
            SceneState start = feasible_start(scene, task, oracle, base);
            auto r = rollout(start, expert, task, gen, oracle, scene, {}, rcfg, rng);
            traj = std::move(r.trajectory);
        } catch (const Unreachable&) {
            ++skipped;
            continue;
        } catch (const NoFeasibleStart&) {
            ++skipped;
            continue;
        }
        if (!traj.gt_success) {
            ++skipped;
            continue;
        }
        traj.seed = base;
        traj.created_at = static_cast<std::int64_t>(store.size());
        store.append(std::move(traj));
    }
    store.export_jsonl(out_path);
    std::cout << "requested " << e.demo_count << " demos, stored " << store.size()
              << ", skipped " << skipped << "\n";
    write_manifest(out_path, json{{"command", "gen-demos"},
                                  {"config", args.config_path},
                                  {"seed", e.seed},
                                  {"scene", scene.name},
                                  {"requested", e.demo_count},
                                  {"stored", store.size()},
                                  {"skipped", skipped},
                                  {"dataset_hash", hex64(fnv1a64_file(out_path))},
                                  {"schema_version", kSchemaVersion}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pretrain
// ---------------------------------------------------------------------------

int cmd_pretrain(const CommonArgs& args, const std::string& demos_path,
                 const std::string& out_gc, const std::string& out_lc, int steps_override) {
    ExperimentConfig e = load_experiment(args);
    SceneConfig scene = load_scene_relative(args, e.pretrain_scene_path);
    Datastore demos = load_store(demos_path);
    TrainConfig tc = e.pretrain_train;
    tc.seed = e.seed;
    if (steps_override >= 0) tc.gradient_steps = steps_override;

    TrainDataset ds{filter_success(demos.records()), e.relabel.pretrain_window,
                    e.relabel.hindsight_fraction};
    if (ds.trajectories.empty()) throw EmptyAfterFilter("no successful demos to train on");
    MixtureConfig mix;
    mix.ratios = {1.0};

    auto run_variant = [&](PolicyVariant v, const std::string& out) {
        if (out.empty()) return;
        PolicyParams p = tc.gradient_steps == 0
                             ? init_policy(v, scene, e.policy, tc.seed)
                             : train(v, {ds}, mix, tc, scene, e.policy);
        save_policy(p, out);
        std::cout << "wrote " << variant_name(v) << " policy: " << out << "\n";
        write_manifest(out, json{{"command", "pretrain"},
                                 {"config", args.config_path},
                                 {"variant", variant_name(v)},
                                 {"seed", tc.seed},
                                 {"gradient_steps", tc.gradient_steps},
                                 {"demos", demos_path},
                                 {"demos_hash", hex64(fnv1a64_file(demos_path))},
                                 {"policy_hash", hex64(fnv1a64_file(out))}});
    };
    run_variant(PolicyVariant::GC, out_gc);
    run_variant(PolicyVariant::LC, out_lc);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// collect
// ---------------------------------------------------------------------------

int cmd_collect(const CommonArgs& args, const std::string& policy_path,
                const std::string& scene_path, const std::string& variant_name_str,
                const std::string& out_path, int budget_override, int workers_override) {
    ExperimentConfig e = load_experiment(args);
    SceneConfig scene = load_scene_relative(args, scene_path);
    PolicyParams params = load_policy(policy_path);
    PolicyVariant variant = variant_from_name(variant_name_str);
    TruthfulOracle oracle(scene);
    OracleSubgoalGenerator gen(e.subgoal_noise);
    DetectorConfig detector = detector_from(e);
    RolloutConfig rcfg;
    rcfg.horizon = e.horizon;
    rcfg.subgoal_period = e.subgoal_period;
    rcfg.check();

    int budget = budget_override > 0 ? budget_override : e.collect_budget;
    int workers = workers_override > 0 ? workers_override : e.fleet_workers;
    if (workers < 1) throw ConfigInvalid("fleet_workers must be >= 1");
    int per_worker = budget / workers;
    int remainder = budget % workers;

    std::vector<GcPolicyActor> gc_actors;
    std::vector<LcPolicyActor> lc_actors;
    gc_actors.reserve(static_cast<std::size_t>(workers));
    lc_actors.reserve(static_cast<std::size_t>(workers));
    std::vector<BanditState> bandits(static_cast<std::size_t>(workers));
    std::vector<WorkerSpec> specs;
    for (int w = 0; w < workers; ++w) {
        CollectorContext ctx;
        ctx.scene = &scene;
        if (variant == PolicyVariant::GC) {
            gc_actors.emplace_back(params, scene);
            ctx.policy = &gc_actors.back();
        } else {
            lc_actors.emplace_back(params, scene);
            ctx.policy = &lc_actors.back();
        }
        ctx.generator = &gen;
        ctx.oracle = &oracle;
        ctx.detector = detector;
        ctx.rollout_cfg = rcfg;
        WorkerSpec spec;
        spec.ctx = ctx;
        spec.bandit = &bandits[static_cast<std::size_t>(w)];
        spec.n_trajectories = per_worker + (w < remainder ? 1 : 0);
        spec.seed = e.seed * 7919ULL + static_cast<std::uint64_t>(w) * 15485863ULL;
        if (spec.n_trajectories > 0) specs.push_back(spec);
    }
    Datastore store;
    std::vector<CollectionStats> stats = run_fleet(specs, store);
    store.export_jsonl(out_path);

    CollectionStats total;
    json per_task = json::object();
    for (const auto& s : stats) {
        total.episodes += s.episodes;
        total.valid += s.valid;
        total.faulted += s.faulted;
        total.fallbacks += s.fallbacks;
        total.vlm_successes += s.vlm_successes;
        total.gt_successes += s.gt_successes;
        total.scene_inits += s.scene_inits;
        for (const auto& [id, n] : s.attempts_per_task)
            per_task[std::to_string(id)] = per_task.value(std::to_string(id), 0) +
                                           static_cast<int>(n);
    }
    double rate = total.vlm_success_rate();
    std::cout << "collected " << total.valid << " trajectories (" << total.episodes
              << " episodes, " << total.faulted << " faulted, " << total.fallbacks
              << " fallbacks)\n"
              << "oracle-success rate " << rate << " (ground truth "
              << (total.valid ? static_cast<double>(total.gt_successes) / total.valid : 0.0)
              << ")\n";
    write_manifest(out_path, json{{"command", "collect"},
                                  {"config", args.config_path},
                                  {"scene", scene.name},
                                  {"variant", variant_name_str},
                                  {"seed", e.seed},
                                  {"workers", workers},
                                  {"budget", budget},
                                  {"episodes", total.episodes},
                                  {"valid", total.valid},
                                  {"faulted", total.faulted},
                                  {"fallbacks", total.fallbacks},
                                  {"vlm_successes", total.vlm_successes},
                                  {"gt_successes", total.gt_successes},
                                  {"scene_inits", total.scene_inits},
                                  {"attempts_per_task", per_task},
                                  {"policy_hash", hex64(fnv1a64_file(policy_path))},
                                  {"dataset_hash", hex64(fnv1a64_file(out_path))}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// improve
// ---------------------------------------------------------------------------

int cmd_improve(const CommonArgs& args, const std::string& policy_path,
                const std::string& demos_path, const std::vector<std::string>& auto_paths,
                const std::string& mode, const std::string& out_path,
                bool train_on_failures) {
    ExperimentConfig e = load_experiment(args);
    SceneConfig scene = load_scene_relative(args, e.pretrain_scene_path);
    PolicyParams base = load_policy(policy_path);
    Datastore demos = load_store(demos_path);
    std::vector<Datastore> autos;
    for (const auto& p : auto_paths) autos.push_back(load_store(p));

    double auto_ratio;
    if (mode == "per-scene") auto_ratio = e.per_scene_autonomous_ratio;
    else if (mode == "generalist") auto_ratio = e.generalist_autonomous_ratio;
    else throw ConfigInvalid("mode must be per-scene or generalist");

    std::vector<TrainDataset> datasets;
    datasets.push_back(TrainDataset{filter_success(demos.records()),
                                    e.relabel.pretrain_window, e.relabel.hindsight_fraction});
    std::size_t kept = 0;
    for (const auto& store : autos) {
        TrainDataset ds;
        ds.trajectories = train_on_failures
                              ? [&] {
                                    std::vector<const Trajectory*> all;
                                    for (const auto& t : store.records()) all.push_back(&t);
                                    return all;
                                }()
                              : filter_success(store.records());
        ds.goal_window = e.relabel.autonomous_window;
        ds.hindsight_fraction = e.relabel.hindsight_fraction;
        kept += ds.trajectories.size();
        datasets.push_back(std::move(ds));
    }
    if (kept == 0) throw EmptyAfterFilter("success filtering left no autonomous records");

    MixtureConfig mix;
    mix.ratios.push_back(1.0 - auto_ratio);
    for (std::size_t i = 0; i < autos.size(); ++i)
        mix.ratios.push_back(auto_ratio / static_cast<double>(autos.size()));

    TrainConfig tc = e.improve_train;
    tc.seed = e.seed;
    PolicyParams improved =
        train(base.variant, datasets, mix, tc, scene, e.policy, &base);
    save_policy(improved, out_path);
    std::cout << "wrote improved " << variant_name(base.variant) << " policy: " << out_path
              << " (" << kept << " autonomous records after filtering)\n";
    json auto_hashes = json::array();
    for (const auto& p : auto_paths) auto_hashes.push_back(hex64(fnv1a64_file(p)));
    write_manifest(out_path, json{{"command", "improve"},
                                  {"config", args.config_path},
                                  {"mode", mode},
                                  {"variant", variant_name(base.variant)},
                                  {"seed", tc.seed},
                                  {"autonomous_ratio", auto_ratio},
                                  {"autonomous_kept", kept},
                                  {"base_policy_hash", hex64(fnv1a64_file(policy_path))},
                                  {"demos_hash", hex64(fnv1a64_file(demos_path))},
                                  {"autonomous_hashes", auto_hashes},
                                  {"policy_hash", hex64(fnv1a64_file(out_path))}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

json eval_to_json(const SceneConfig& scene, const EvalResult& r, int episodes) {
    json tasks = json::array();
    for (std::size_t i = 0; i < r.task_ids.size(); ++i) {
        int succ = static_cast<int>(std::lround(r.success_rates[i] * episodes));
        auto [lo, hi] = wilson95(succ, episodes);
        tasks.push_back(json{{"task", r.task_ids[i]},
                             {"language", scene.tasks[i].language},
                             {"rate", r.success_rates[i]},
                             {"wilson95_low", lo},
                             {"wilson95_high", hi}});
    }
    return json{{"scene", scene.name}, {"average", r.average}, {"episodes_per_task", episodes},
                {"tasks", tasks}};
}

int cmd_eval(const CommonArgs& args, const std::string& policy_path,
             const std::string& scene_path, int episodes_override,
             const std::string& json_out, double check_min) {
    ExperimentConfig e = load_experiment(args);
    SceneConfig scene = load_scene_relative(args, scene_path);
    PolicyParams params = load_policy(policy_path);
    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    EvalConfig ec;
    ec.episodes_per_task =
        episodes_override > 0 ? episodes_override : e.eval_episodes_per_task;
    ec.horizon = e.horizon;
    ec.subgoal_period = e.subgoal_period;
    ec.seed = e.seed;
    EvalResult r = evaluate(params, params.variant, scene, scene.tasks, ec, &gen);
    json body = eval_to_json(scene, r, ec.episodes_per_task);
    for (const auto& t : body["tasks"])
        std::cout << "task " << t["task"].get<int>() << "  rate " << t["rate"].get<double>()
                  << "  [" << t["wilson95_low"].get<double>() << ", "
                  << t["wilson95_high"].get<double>() << "]  " << t["language"].get<std::string>()
                  << "\n";
    std::cout << "average " << r.average << "\n";
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        out << body.dump(2) << "\n";
    }
    if (check_min >= 0.0 && r.average < check_min) {
        std::cout << "check failed: average " << r.average << " < " << check_min << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportCell {
    double average = -1.0;  // -1 = artifact missing
};

int cmd_report(const CommonArgs& args, const std::string& run_dir,
               const std::string& csv_out) {
    ExperimentConfig e = load_experiment(args);
    fs::path dir(run_dir);
    std::vector<SceneConfig> scenes;
    for (const auto& p : e.shifted_scene_paths)
        scenes.push_back(load_scene_relative(args, p));

    struct Column {
        std::string label;
        std::function<std::string(const SceneConfig&)> artifact;
    };
    auto fixed = [&](std::string name) {
        return [name, &dir](const SceneConfig&) { return (dir / name).string(); };
    };
    std::vector<Column> columns = {
        {"GC pretrained", fixed("gc_pretrained.pol")},
        {"GC +scene",
         [&](const SceneConfig& s) { return (dir / ("gc_scene_" + s.name + ".pol")).string(); }},
        {"GC +all", fixed("gc_all.pol")},
        {"LC pretrained", fixed("lc_pretrained.pol")},
        {"LC +scene",
         [&](const SceneConfig& s) { return (dir / ("lc_scene_" + s.name + ".pol")).string(); }},
        {"LC +all", fixed("lc_all.pol")},
    };

    OracleSubgoalGenerator gen(SubgoalNoise{0.0, 1});
    EvalConfig ec;
    ec.episodes_per_task = e.eval_episodes_per_task;
    ec.horizon = e.horizon;
    ec.subgoal_period = e.subgoal_period;
    ec.seed = e.seed;

    std::vector<std::vector<ReportCell>> table(scenes.size(),
                                               std::vector<ReportCell>(columns.size()));
    for (std::size_t si = 0; si < scenes.size(); ++si)
        for (std::size_t ci = 0; ci < columns.size(); ++ci) {
            std::string path = columns[ci].artifact(scenes[si]);
            if (!fs::exists(path)) continue;
            PolicyParams p = load_policy(path);
            EvalResult r =
                evaluate(p, p.variant, scenes[si], scenes[si].tasks, ec, &gen);
            table[si][ci].average = r.average;
        }

    std::ostringstream text, csv;
    text << "success rates, " << ec.episodes_per_task << " episodes/task (seed " << e.seed
         << ")\n\n";
    text << "scene";
    csv << "scene";
    for (const auto& c : columns) {
        text << "\t" << c.label;
        csv << "," << c.label;
    }
    text << "\n";
    csv << "\n";
    auto cell = [](const ReportCell& c) {
        if (c.average < 0.0) return std::string("-");
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(3);
        os << c.average;
        return os.str();
    };
    for (std::size_t si = 0; si < scenes.size(); ++si) {
        text << scenes[si].name;
        csv << scenes[si].name;
        for (const auto& c : table[si]) {
            text << "\t" << cell(c);
            csv << "," << cell(c);
        }
        text << "\n";
        csv << "\n";
    }

    // detector confusion over whatever autonomous data the run directory holds
    DatasetStats confusion;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("auto_", 0) != 0 || entry.path().extension() != ".jsonl") continue;
        Datastore store = load_store(entry.path().string());
        DatasetStats s = store.stats();
        confusion.total += s.total;
        confusion.true_positives += s.true_positives;
        confusion.false_positives += s.false_positives;
        confusion.false_negatives += s.false_negatives;
        confusion.true_negatives += s.true_negatives;
    }
    if (confusion.total > 0) {
        text << "\ndetector confusion over " << confusion.total
             << " autonomous trajectories:\n"
             << "  TP " << confusion.true_positives << "  FP " << confusion.false_positives
             << "  FN " << confusion.false_negatives << "  TN " << confusion.true_negatives
             << "\n  precision " << confusion.precision() << "  recall "
             << confusion.recall() << "  accuracy " << confusion.accuracy() << "\n";
    }

    std::cout << text.str();
    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary);
        out << csv.str();
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// dataset subcommands
// ---------------------------------------------------------------------------

int cmd_dataset_stats(const std::string& in_path) {
    Datastore store = load_store(in_path);
    DatasetStats s = store.stats();
    std::cout << "records " << s.total << "\n"
              << "vlm successes " << s.vlm_successes << ", failures " << s.vlm_failures
              << "\n"
              << "fallback episodes " << s.fallbacks << "\n"
              << "confusion: TP " << s.true_positives << " FP " << s.false_positives
              << " FN " << s.false_negatives << " TN " << s.true_negatives << "\n"
              << "precision " << s.precision() << " recall " << s.recall() << " accuracy "
              << s.accuracy() << "\n";
    for (const auto& [scene, n] : s.per_scene)
        std::cout << "scene " << scene << ": " << n << "\n";
    for (const auto& [task, n] : s.per_task) std::cout << "task " << task << ": " << n << "\n";
    return kExitOk;
}

int cmd_dataset_validate(const std::string& in_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw SoarError("cannot open dataset: " + in_path);
    std::string line;
    int lineno = 0;
    int bad = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            Trajectory t = trajectory_from_json(line);
            auto violations = validate(t);
            for (const auto& v : violations) {
                std::cout << "line " << lineno << ": " << v << "\n";
                ++bad;
            }
        } catch (const SoarError& err) {
            std::cout << "line " << lineno << ": " << err.what() << "\n";
            ++bad;
        }
    }
    if (bad == 0) {
        std::cout << "ok: " << lineno << " records\n";
        return kExitOk;
    }
    std::cout << bad << " violation(s)\n";
    return kExitError;
}

int cmd_dataset_filter(const std::string& in_path, const std::string& out_path,
                       const std::string& where) {
    Datastore store = load_store(in_path);
    auto eq = where.find('=');
    if (eq == std::string::npos)
        throw ConfigInvalid("--where expects key=value, e.g. vlm_success=true");
    std::string key = where.substr(0, eq);
    std::string value = where.substr(eq + 1);
    std::function<bool(const Trajectory&)> pred;
    auto boolean = [&](const std::string& v) {
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigInvalid("boolean filter value must be true or false");
    };
    if (key == "vlm_success") {
        bool want = boolean(value);
        pred = [want](const Trajectory& t) { return t.vlm_success == want; };
    } else if (key == "gt_success") {
        bool want = boolean(value);
        pred = [want](const Trajectory& t) { return t.gt_success == want; };
    } else if (key == "scene") {
        pred = [value](const Trajectory& t) { return t.scene_id == value; };
    } else if (key == "task") {
        int id = std::stoi(value);
        pred = [id](const Trajectory& t) { return t.task.id == id; };
    } else {
        throw ConfigInvalid("unknown filter key: " + key);
    }
    Datastore out;
    for (const Trajectory* t : store.filter(pred)) out.append(*t);
    out.export_jsonl(out_path);
    std::cout << "kept " << out.size() << " of " << store.size() << " records\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"autonomous self-improvement experiment driver"};
    app.require_subcommand(1);

    CommonArgs common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "experiment config file")->required();
        sub->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& v) {
                common.seed = v;
                common.seed_set = true;
            },
            "seed override");
    };

    // gen-demos
    auto* gen_demos = app.add_subcommand("gen-demos", "scripted-expert pretraining demos");
    std::string gd_out = "demos.jsonl";
    add_common(gen_demos);
    gen_demos->add_option("--out", gd_out, "output dataset path");

    // pretrain
    auto* pretrain = app.add_subcommand("pretrain", "train policies on the demo dataset");
    std::string pt_demos = "demos.jsonl", pt_gc = "gc_pretrained.pol", pt_lc;
    int pt_steps = -1;
    add_common(pretrain);
    pretrain->add_option("--demos", pt_demos, "demo dataset");
    pretrain->add_option("--out-gc", pt_gc, "goal-conditioned policy artifact");
    pretrain->add_option("--out-lc", pt_lc, "language-conditioned policy artifact");
    pretrain->add_option("--steps", pt_steps, "gradient step override (0 = init only)");

    // collect
    auto* collect = app.add_subcommand("collect", "autonomous fleet collection");
    std::string cl_policy, cl_scene, cl_variant = "gc", cl_out = "auto.jsonl";
    int cl_budget = 0, cl_workers = 0;
    add_common(collect);
    collect->add_option("--policy", cl_policy, "policy artifact")->required();
    collect->add_option("--scene", cl_scene, "collection scene config")->required();
    collect->add_option("--variant", cl_variant, "gc | lc");
    collect->add_option("--out", cl_out, "output dataset path");
    collect->add_option("--budget", cl_budget, "valid-trajectory budget override");
    collect->add_option("--workers", cl_workers, "fleet worker override");

    // improve
    auto* improve = app.add_subcommand("improve", "co-train on demos + autonomous data");
    std::string im_policy, im_demos = "demos.jsonl", im_mode = "per-scene",
                im_out = "improved.pol";
    std::vector<std::string> im_auto;
    bool im_failures = false;
    add_common(improve);
    improve->add_option("--policy", im_policy, "base policy artifact")->required();
    improve->add_option("--demos", im_demos, "pretraining demo dataset");
    improve->add_option("--auto", im_auto, "autonomous dataset(s)")->required();
    improve->add_option("--mode", im_mode, "per-scene | generalist");
    improve->add_option("--out", im_out, "output policy artifact");
    improve->add_flag("--train-on-failures", im_failures,
                      "skip success filtering (ablation, no fidelity claim)");

    // eval
    auto* eval = app.add_subcommand("eval", "seeded policy evaluation");
    std::string ev_policy, ev_scene, ev_json;
    int ev_episodes = 0;
    double ev_check = -1.0;
    add_common(eval);
    eval->add_option("--policy", ev_policy, "policy artifact")->required();
    eval->add_option("--scene", ev_scene, "evaluation scene config")->required();
    eval->add_option("--episodes", ev_episodes, "episodes per task override");
    eval->add_option("--json", ev_json, "machine-readable result path");
    eval->add_option("--check-min", ev_check,
                     "exit 3 when the average success rate is below this");

    // report
    auto* report = app.add_subcommand("report", "tabulate success rates across artifacts");
    std::string rp_dir = "run", rp_csv;
    add_common(report);
    report->add_option("--run-dir", rp_dir, "artifact directory");
    report->add_option("--csv", rp_csv, "CSV output path");

    // dataset
    auto* dataset = app.add_subcommand("dataset", "dataset utilities");
    dataset->require_subcommand(1);
    auto* ds_stats = dataset->add_subcommand("stats", "summary statistics");
    auto* ds_validate = dataset->add_subcommand("validate", "schema + replay validation");
    auto* ds_filter = dataset->add_subcommand("filter", "metadata filter");
    std::string ds_in, ds_out = "filtered.jsonl", ds_where = "vlm_success=true";
    ds_stats->add_option("--in", ds_in, "dataset path")->required();
    ds_validate->add_option("--in", ds_in, "dataset path")->required();
    ds_filter->add_option("--in", ds_in, "dataset path")->required();
    ds_filter->add_option("--out", ds_out, "output path");
    ds_filter->add_option("--where", ds_where, "key=value predicate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen_demos->parsed()) return cmd_gen_demos(common, gd_out);
        if (pretrain->parsed()) return cmd_pretrain(common, pt_demos, pt_gc, pt_lc, pt_steps);
        if (collect->parsed())
            return cmd_collect(common, cl_policy, cl_scene, cl_variant, cl_out, cl_budget,
                               cl_workers);
        if (improve->parsed())
            return cmd_improve(common, im_policy, im_demos, im_auto, im_mode, im_out,
                               im_failures);
        if (eval->parsed())
            return cmd_eval(common, ev_policy, ev_scene, ev_episodes, ev_json, ev_check);
        if (report->parsed()) return cmd_report(common, rp_dir, rp_csv);
        if (ds_stats->parsed()) return cmd_dataset_stats(ds_in);
        if (ds_validate->parsed()) return cmd_dataset_validate(ds_in);
        if (ds_filter->parsed()) return cmd_dataset_filter(ds_in, ds_out, ds_where);
    } catch (const ConfigInvalid& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const SoarError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
