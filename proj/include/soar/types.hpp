#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soar {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SoarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigInvalid : SoarError { using SoarError::SoarError; };
struct UnknownId : SoarError { using SoarError::SoarError; };
struct DimMismatch : SoarError { using SoarError::SoarError; };
struct Unreachable : SoarError { using SoarError::SoarError; };
struct UnsupportedTemplate : SoarError { using SoarError::SoarError; };
struct Unparseable : SoarError { using SoarError::SoarError; };
struct EmptyFeasibleSet : SoarError { using SoarError::SoarError; };
struct EmptyTrajectory : SoarError { using SoarError::SoarError; };
struct RaggedInput : SoarError { using SoarError::SoarError; };
struct EmptyDataset : SoarError { using SoarError::SoarError; };
struct Inconsistent : SoarError { using SoarError::SoarError; };
struct NoFeasibleStart : SoarError { using SoarError::SoarError; };
struct SchemaViolation : SoarError { using SoarError::SoarError; };
struct EmptyAfterFilter : SoarError { using SoarError::SoarError; };

// ---------------------------------------------------------------------------
// Grid primitives
// ---------------------------------------------------------------------------

struct GridPos {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridPos&, const GridPos&) = default;
    friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

/// Axis-aligned inclusive cell rectangle.
struct Region {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(GridPos p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    friend bool operator==(const Region&, const Region&) = default;
};

enum class Action : std::uint8_t {
    MoveNorth = 0,
    MoveSouth = 1,
    MoveEast = 2,
    MoveWest = 3,
    Grasp = 4,
    Release = 5,
    NoOp = 6,
};

inline constexpr int kActionCount = 7;

const char* action_name(Action a);
Action action_from_name(const std::string& name);

/// Per-step delta form of an action, used only by the action-chaining
/// transform. (dx, dy, grasp, release).
std::vector<double> action_delta(Action a);

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

enum class PredicateKind : std::uint8_t {
    InContainer,
    OnTable,
    GripperAt,
    InRegion,
};

struct Predicate {
    PredicateKind kind = PredicateKind::OnTable;
    int object_id = -1;      // InContainer, OnTable, InRegion
    int container_id = -1;   // InContainer
    GridPos pos;             // GripperAt
    Region region;           // InRegion

    static Predicate in_container(int object_id, int container_id) {
        return {PredicateKind::InContainer, object_id, container_id, {}, {}};
    }
    static Predicate on_table(int object_id) {
        return {PredicateKind::OnTable, object_id, -1, {}, {}};
    }
    static Predicate gripper_at(GridPos p) {
        return {PredicateKind::GripperAt, -1, -1, p, {}};
    }
    static Predicate in_region(int object_id, Region r) {
        return {PredicateKind::InRegion, object_id, -1, {}, r};
    }
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

enum class TaskTemplate : std::uint8_t {
    PutIn,
    TakeOut,
    MoveToRegion,
};

const char* template_name(TaskTemplate t);
TaskTemplate template_from_name(const std::string& name);

struct TaskSpec {
    int id = -1;
    TaskTemplate tmpl = TaskTemplate::PutIn;
    int object_id = -1;
    int container_id = -1;   // PutIn / TakeOut
    Region region;           // MoveToRegion
    std::string language;    // full language command

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

}  // namespace soar
