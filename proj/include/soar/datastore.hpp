#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "soar/vqa.hpp"

namespace soar {

inline constexpr int kSchemaVersion = 1;

struct Trajectory {
    std::string scene_id;
    TaskSpec task;
    VqaPair vqa;
    std::vector<SceneState> observations;  // horizon + 1
    std::vector<Action> actions;           // horizon
    std::vector<SceneState> subgoals;      // horizon / K
    std::vector<int> subgoal_steps;        // issue timesteps, {0, K, 2K, ...}
    bool vlm_success = false;
    bool gt_success = false;
    bool used_fallback = false;
    std::string policy_version;
    std::uint64_t seed = 0;
    std::int64_t created_at = 0;  // logical timestamp, keeps exports reproducible

    int horizon() const { return static_cast<int>(actions.size()); }
};

/// Every Trajectory invariant, including the full transition-consistency
/// replay. Empty result means the record is valid.
std::vector<std::string> validate(const Trajectory& traj);

struct DatasetStats {
    std::size_t total = 0;
    std::size_t vlm_successes = 0;
    std::size_t vlm_failures = 0;
    std::size_t fallbacks = 0;
    // detector confusion: vlm label vs ground truth
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t true_negatives = 0;
    std::map<std::string, std::size_t> per_scene;
    std::map<int, std::size_t> per_task;

    double precision() const {
        auto d = true_positives + false_positives;
        return d == 0 ? 0.0 : static_cast<double>(true_positives) / d;
    }
    double recall() const {
        auto d = true_positives + false_negatives;
        return d == 0 ? 0.0 : static_cast<double>(true_positives) / d;
    }
    double accuracy() const {
        return total == 0 ? 0.0
                          : static_cast<double>(true_positives + true_negatives) / total;
    }
};

/// Append-only in-memory trajectory log with JSONL persistence.
class Datastore {
public:
    /// Validates, then appends. Returns the record index. Throws
    /// SchemaViolation and leaves the store unchanged on invalid input.
    std::size_t append(Trajectory traj);

    const std::vector<Trajectory>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::vector<const Trajectory*> filter(
        const std::function<bool(const Trajectory&)>& pred) const;

    DatasetStats stats() const;

    /// Canonical newline-delimited export: one JSON object per record,
    /// alphabetical keys, no whitespace. Equal stores produce identical bytes.
    void export_jsonl(const std::string& path) const;
    static Datastore import_jsonl(const std::string& path);

private:
    std::vector<Trajectory> records_;
};

// Record-level JSON codecs, shared by export/import and the validator CLI.
std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& line);

}  // namespace soar
