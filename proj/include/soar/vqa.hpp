#pragma once

#include <string>

#include "soar/scene.hpp"

namespace soar {

struct VqaPair {
    std::string question;
    bool answer_implies_feasible = false;
    Predicate predicate;
};

struct DetectorConfig {
    double fp_rate = 0.0;  // ground-truth failure labeled success
    double fn_rate = 0.0;  // ground-truth success labeled failure
};

struct CalibratedDetector {
    double fp_rate = 0.0;
    double fn_rate = 0.0;
    double implied_base_success_rate = 0.0;
};

/// Seam for a real VLM adapter. The in-repo TruthfulOracle never touches the
/// network; an external implementation would ship the rendered state and
/// question text and parse the free-text reply.
class OracleClient {
public:
    virtual ~OracleClient() = default;
    virtual bool judge_feasible(const SceneState& state, const TaskSpec& task) const = 0;
    virtual bool judge_success(const SceneState& final_state, const TaskSpec& task,
                               const DetectorConfig& cfg, Rng& rng) const = 0;
};

VqaPair translate_task(const TaskSpec& task, const SceneConfig& config);

/// Templated free-text reply; the leading cue ("Yes,"/"No,") truthfully
/// reflects predicate_holds(state, pair.predicate).
std::string answer_question(const SceneState& state, const VqaPair& pair,
                            const SceneConfig& config);

/// Cue grammar: a leading yes/no token decides; otherwise an "is not"/"isn't"
/// negation reads as false. Throws Unparseable when no cue is present.
bool decode_answer(const std::string& text);

class TruthfulOracle : public OracleClient {
public:
    explicit TruthfulOracle(const SceneConfig& config) : config_(config) {}

    bool judge_feasible(const SceneState& state, const TaskSpec& task) const override;
    bool judge_success(const SceneState& final_state, const TaskSpec& task,
                       const DetectorConfig& cfg, Rng& rng) const override;

    /// Ground-truth success, no label noise.
    bool ground_truth_success(const SceneState& final_state, const TaskSpec& task) const;

private:
    SceneConfig config_;
};

/// Invert the confusion-matrix relations to recover (fp, fn, base success
/// rate) from a reported (precision, recall, accuracy) triple. Throws
/// Inconsistent when no solution lies in [0,1]^3.
CalibratedDetector calibrate_detector(double precision, double recall, double accuracy);

}  // namespace soar
