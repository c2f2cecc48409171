#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "soar/types.hpp"

namespace soar {

using Rng = std::mt19937_64;

struct ObjectSpec {
    int id = -1;
    int kind = 0;
    Region spawn;
};

struct ContainerSpec {
    int id = -1;
    int kind = 0;
    Region spawn;

    ContainerSpec() = default;
    ContainerSpec(int id_, int kind_, GridPos p)
        : id(id_), kind(kind_), spawn{p.x, p.y, p.x, p.y} {}

    bool fixed() const { return spawn.x0 == spawn.x1 && spawn.y0 == spawn.y1; }
};

/// Static description of a tabletop scene. The kind universe
/// (num_object_kinds / num_container_kinds) is shared across all scenes in an
/// experiment so encodings and policies stay dimension-compatible even when a
/// scene uses kinds never seen in pretraining.
struct SceneConfig {
    std::string name = "scene";
    int width = 8;
    int height = 8;
    int num_object_kinds = 2;
    int num_container_kinds = 1;
    GridPos home{0, 0};
    std::vector<ObjectSpec> objects;
    std::vector<ContainerSpec> containers;
    std::vector<GridPos> barriers;
    int random_barriers = 0;  // extra barrier cells drawn per reset
    std::vector<TaskSpec> tasks;
    std::map<int, std::string> object_kind_names;
    std::map<int, std::string> container_kind_names;

    bool in_bounds(GridPos p) const {
        return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
    }
    std::string object_kind_name(int kind) const;
    std::string container_kind_name(int kind) const;
    /// Throws ConfigInvalid on any violated invariant.
    void check() const;
};

struct ObjectState {
    int kind = 0;
    GridPos pos;
    std::optional<int> in_container;  // containing container id

    friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct ContainerState {
    int kind = 0;
    GridPos pos;

    friend bool operator==(const ContainerState&, const ContainerState&) = default;
};

struct SceneState {
    int width = 8;
    int height = 8;
    GridPos gripper;
    GridPos home;
    std::optional<int> holding;
    std::vector<ObjectState> objects;       // indexed by object id
    std::vector<ContainerState> containers; // indexed by container id
    std::vector<GridPos> barriers;          // sorted, unique

    bool in_bounds(GridPos p) const {
        return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
    }
    bool is_barrier(GridPos p) const;
    std::optional<int> container_at(GridPos p) const;
    /// On-table object at p (excludes held and contained objects).
    std::optional<int> table_object_at(GridPos p) const;

    friend bool operator==(const SceneState&, const SceneState&) = default;
};

/// Instantiate a scene: seeded uniform placement of objects inside their
/// spawn regions on distinct free cells, gripper at home, nothing held.
SceneState make_scene(const SceneConfig& config, std::uint64_t seed);

/// Pure transition function. Every illegal action degrades to a no-op.
SceneState step(const SceneState& state, Action action);

bool predicate_holds(const SceneState& state, const Predicate& p);

/// Number of feature planes for one state under this config.
int encode_planes(const SceneConfig& config);
/// Flattened length of encode() output.
int encode_dim(const SceneConfig& config);
/// Occupancy planes for one state: gripper, holding flag, one plane per
/// object kind, one per container kind, barriers. Row-major cells per plane.
std::vector<double> encode_state(const SceneState& state, const SceneConfig& config);
/// Current and goal state planes concatenated.
std::vector<double> encode(const SceneState& state, const SceneState& goal,
                           const SceneConfig& config);

/// True when every SceneState invariant holds.
bool state_valid(const SceneState& state);

}  // namespace soar
