#include "soar/vqa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace soar {

namespace {

std::string object_name(const SceneConfig& config, int object_id) {
    for (const auto& o : config.objects)
        if (o.id == object_id) return config.object_kind_name(o.kind);
    throw UnknownId("unknown object id " + std::to_string(object_id));
}

std::string container_name(const SceneConfig& config, int container_id) {
    for (const auto& c : config.containers)
        if (c.id == container_id) return config.container_kind_name(c.kind);
    throw UnknownId("unknown container id " + std::to_string(container_id));
}

std::string region_name(const Region& r) {
    std::ostringstream os;
    os << "region (" << r.x0 << "," << r.y0 << ")-(" << r.x1 << "," << r.y1 << ")";
    return os.str();
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

VqaPair translate_task(const TaskSpec& task, const SceneConfig& config) {
    VqaPair pair;
    switch (task.tmpl) {
        case TaskTemplate::PutIn: {
            pair.question = "Is the " + object_name(config, task.object_id) + " in the " +
                            container_name(config, task.container_id) + "?";
            pair.answer_implies_feasible = false;
            pair.predicate = Predicate::in_container(task.object_id, task.container_id);
            break;
        }
        case TaskTemplate::TakeOut: {
            pair.question = "Is the " + object_name(config, task.object_id) + " in the " +
                            container_name(config, task.container_id) + "?";
            pair.answer_implies_feasible = true;
            pair.predicate = Predicate::in_container(task.object_id, task.container_id);
            break;
        }
        case TaskTemplate::MoveToRegion: {
            pair.question = "Is the " + object_name(config, task.object_id) + " in the " +
                            region_name(task.region) + "?";
            pair.answer_implies_feasible = false;
            pair.predicate = Predicate::in_region(task.object_id, task.region);
            break;
        }
        default:
            throw UnsupportedTemplate("unsupported task template");
    }
    return pair;
}

std::string answer_question(const SceneState& state, const VqaPair& pair,
                            const SceneConfig& config) {
    bool holds = predicate_holds(state, pair.predicate);
    std::string subject;
    std::string place;
    switch (pair.predicate.kind) {
        case PredicateKind::InContainer:
            subject = object_name(config, pair.predicate.object_id);
            place = "the " + container_name(config, pair.predicate.container_id);
            break;
        case PredicateKind::InRegion:
            subject = object_name(config, pair.predicate.object_id);
            place = region_name(pair.predicate.region);
            break;
        default:
            subject = "object";
            place = "the target";
            break;
    }
    if (holds) return "Yes, the " + subject + " is in " + place + ".";
    return "No, the " + subject + " is not in " + place + "; it is placed outside.";
}

bool decode_answer(const std::string& text) {
    std::string low = lowercase(text);
    // leading cue token
    std::size_t i = low.find_first_not_of(" \t");
    if (i != std::string::npos) {
        auto word_is = [&](const char* w) {
            std::size_t n = std::string(w).size();
            if (low.compare(i, n, w) != 0) return false;
            char next = i + n < low.size() ? low[i + n] : ' ';
            return !std::isalnum(static_cast<unsigned char>(next));
        };
        if (word_is("yes")) return true;
        if (word_is("no")) return false;
    }
    if (low.find("is not") != std::string::npos || low.find("isn't") != std::string::npos)
        return false;
    throw Unparseable("no affirmation or negation cue in: " + text);
}

bool TruthfulOracle::judge_feasible(const SceneState& state, const TaskSpec& task) const {
    VqaPair pair = translate_task(task, config_);
    bool answer = decode_answer(answer_question(state, pair, config_));
    return answer == pair.answer_implies_feasible;
}

bool TruthfulOracle::ground_truth_success(const SceneState& final_state,
                                          const TaskSpec& task) const {
    VqaPair pair = translate_task(task, config_);
    bool answer = decode_answer(answer_question(final_state, pair, config_));
    // the success-implying answer is the opposite of the feasibility one
    return answer == !pair.answer_implies_feasible;
}

bool TruthfulOracle::judge_success(const SceneState& final_state, const TaskSpec& task,
                                   const DetectorConfig& cfg, Rng& rng) const {
    bool truth = ground_truth_success(final_state, task);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (truth) return coin(rng) >= cfg.fn_rate;
    return coin(rng) < cfg.fp_rate;
}

CalibratedDetector calibrate_detector(double precision, double recall, double accuracy) {
    if (precision <= 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0 ||
        accuracy < 0.0 || accuracy > 1.0)
        throw Inconsistent("triple outside [0,1]");
    // acc  = s*recall + (1-s)*(1-fp)
    // prec = s*recall / (s*recall + (1-s)*fp)
    // =>  s = (1-acc) / (1 - recall*(2 - 1/prec)),  when recall*(2-1/prec) != 1
    const double k = recall * (2.0 - 1.0 / precision);
    const double denom = 1.0 - k;
    const double eps = 1e-12;
    double s;
    if (std::abs(denom) < eps) {
        if (std::abs(1.0 - accuracy) > eps)
            throw Inconsistent("no base rate satisfies the triple");
        s = 0.5;  // degenerate: any s works; pick one
    } else {
        s = (1.0 - accuracy) / denom;
    }
    if (s < 0.0 || s > 1.0) throw Inconsistent("implied base rate outside [0,1]");
    double fp;
    if (s >= 1.0 - eps) {
        fp = 0.0;
    } else {
        fp = s * recall * (1.0 / precision - 1.0) / (1.0 - s);
    }
    if (fp < -eps || fp > 1.0 + eps) throw Inconsistent("implied fp rate outside [0,1]");
    fp = std::clamp(fp, 0.0, 1.0);
    CalibratedDetector out;
    out.fp_rate = fp;
    out.fn_rate = 1.0 - recall;
    out.implied_base_success_rate = s;
    return out;
}

}  // namespace soar
