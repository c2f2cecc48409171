#pragma once

#include <array>

#include "soar/scene.hpp"

namespace soar {

struct SubgoalNoise {
    double perturb_prob = 0.2;
    int max_offset = 1;  // Chebyshev cells
};

enum class Waypoint : std::uint8_t {
    ReachObject,
    GraspObject,
    TransportToTarget,
    PlaceAtTarget,
    ReturnHome,
};

inline constexpr int kWaypointCount = 5;

struct WaypointPlan {
    std::array<Waypoint, kWaypointCount> stages{
        Waypoint::ReachObject, Waypoint::GraspObject, Waypoint::TransportToTarget,
        Waypoint::PlaceAtTarget, Waypoint::ReturnHome};
};

/// Seam a learned image-editing generator would occupy: state + language task
/// + stage in, full goal state out.
class SubgoalGenerator {
public:
    virtual ~SubgoalGenerator() = default;
    virtual SceneState next_subgoal(const SceneState& state, const TaskSpec& task,
                                    int stage_index, Rng& rng) const = 0;
};

WaypointPlan waypoint_plan(const TaskSpec& task);

/// Nearest free table cell to a container's cell (BFS order, deterministic).
GridPos nearest_free_table_cell(const SceneState& state, GridPos from);

/// Oracle waypoint planner. Builds each stage's goal from the CURRENT state,
/// so off-task environment changes between queries are absorbed. Intermediate
/// gripper targets may be perturbed by the noise model; the final placement
/// predicate never is.
class OracleSubgoalGenerator : public SubgoalGenerator {
public:
    OracleSubgoalGenerator() = default;
    explicit OracleSubgoalGenerator(SubgoalNoise noise) : noise_(noise) {}

    /// With hallucination enabled, a query occasionally plans for a wrong
    /// object; the next query recovers since goals rebuild from live state.
    void set_hallucination(double prob) { hallucination_prob_ = prob; }

    SceneState next_subgoal(const SceneState& state, const TaskSpec& task,
                            int stage_index, Rng& rng) const override;

private:
    SubgoalNoise noise_;
    double hallucination_prob_ = 0.0;
};

}  // namespace soar
