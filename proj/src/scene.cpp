#include "soar/scene.hpp"

#include <algorithm>

namespace soar {

const char* action_name(Action a) {
    switch (a) {
        case Action::MoveNorth: return "move_north";
        case Action::MoveSouth: return "move_south";
        case Action::MoveEast: return "move_east";
        case Action::MoveWest: return "move_west";
        case Action::Grasp: return "grasp";
        case Action::Release: return "release";
        case Action::NoOp: return "noop";
    }
    return "noop";
}

Action action_from_name(const std::string& name) {
    for (int i = 0; i < kActionCount; ++i) {
        auto a = static_cast<Action>(i);
        if (name == action_name(a)) return a;
    }
    throw UnknownId("unknown action name: " + name);
}

std::vector<double> action_delta(Action a) {
    switch (a) {
        case Action::MoveNorth: return {0.0, -1.0, 0.0, 0.0};
        case Action::MoveSouth: return {0.0, 1.0, 0.0, 0.0};
        case Action::MoveEast: return {1.0, 0.0, 0.0, 0.0};
        case Action::MoveWest: return {-1.0, 0.0, 0.0, 0.0};
        case Action::Grasp: return {0.0, 0.0, 1.0, 0.0};
        case Action::Release: return {0.0, 0.0, 0.0, 1.0};
        case Action::NoOp: return {0.0, 0.0, 0.0, 0.0};
    }
    return {0.0, 0.0, 0.0, 0.0};
}

const char* template_name(TaskTemplate t) {
    switch (t) {
        case TaskTemplate::PutIn: return "put_in";
        case TaskTemplate::TakeOut: return "take_out";
        case TaskTemplate::MoveToRegion: return "move_to_region";
    }
    return "put_in";
}

TaskTemplate template_from_name(const std::string& name) {
    if (name == "put_in") return TaskTemplate::PutIn;
    if (name == "take_out") return TaskTemplate::TakeOut;
    if (name == "move_to_region") return TaskTemplate::MoveToRegion;
    throw UnsupportedTemplate("unknown task template: " + name);
}

std::string SceneConfig::object_kind_name(int kind) const {
    auto it = object_kind_names.find(kind);
    if (it != object_kind_names.end()) return it->second;
    return "object-" + std::to_string(kind);
}

std::string SceneConfig::container_kind_name(int kind) const {
    auto it = container_kind_names.find(kind);
    if (it != container_kind_names.end()) return it->second;
    return "container-" + std::to_string(kind);
}

void SceneConfig::check() const {
    if (width <= 0 || height <= 0) throw ConfigInvalid("non-positive grid dims");
    if (num_object_kinds <= 0 || num_container_kinds <= 0)
        throw ConfigInvalid("kind universe must be non-empty");
    if (!in_bounds(home)) throw ConfigInvalid("home cell out of bounds");
    std::set<GridPos> barrier_set(barriers.begin(), barriers.end());
    if (barrier_set.count(home)) throw ConfigInvalid("home cell on a barrier");
    for (const auto& b : barriers)
        if (!in_bounds(b)) throw ConfigInvalid("barrier out of bounds");
    std::set<GridPos> container_cells;  // cells pinned by fixed containers
    for (const auto& c : containers) {
        if (c.kind < 0 || c.kind >= num_container_kinds)
            throw ConfigInvalid("container kind outside universe");
        if (c.spawn.x0 > c.spawn.x1 || c.spawn.y0 > c.spawn.y1)
            throw ConfigInvalid("empty container region");
        if (!in_bounds({c.spawn.x0, c.spawn.y0}) || !in_bounds({c.spawn.x1, c.spawn.y1}))
            throw ConfigInvalid("container out of bounds");
        int free_cells = 0;
        for (int y = c.spawn.y0; y <= c.spawn.y1; ++y)
            for (int x = c.spawn.x0; x <= c.spawn.x1; ++x)
                if (!barrier_set.count({x, y})) ++free_cells;
        if (free_cells == 0) throw ConfigInvalid("container on a barrier");
        if (c.fixed() && !container_cells.insert({c.spawn.x0, c.spawn.y0}).second)
            throw ConfigInvalid("overlapping containers");
    }
    for (const auto& o : objects) {
        if (o.kind < 0 || o.kind >= num_object_kinds)
            throw ConfigInvalid("object kind outside universe");
        if (o.spawn.x0 > o.spawn.x1 || o.spawn.y0 > o.spawn.y1)
            throw ConfigInvalid("empty spawn region");
        if (!in_bounds({o.spawn.x0, o.spawn.y0}) || !in_bounds({o.spawn.x1, o.spawn.y1}))
            throw ConfigInvalid("spawn region out of bounds");
        int free_cells = 0;
        for (int y = o.spawn.y0; y <= o.spawn.y1; ++y)
            for (int x = o.spawn.x0; x <= o.spawn.x1; ++x)
                if (!barrier_set.count({x, y})) ++free_cells;
        if (free_cells == 0) throw ConfigInvalid("spawn region fully barred");
    }
    // at least one free drop cell
    bool any_free = false;
    for (int y = 0; y < height && !any_free; ++y)
        for (int x = 0; x < width && !any_free; ++x) {
            GridPos p{x, y};
            if (!barrier_set.count(p) && !container_cells.count(p)) any_free = true;
        }
    if (!any_free) throw ConfigInvalid("no free drop cell exists");
}

bool SceneState::is_barrier(GridPos p) const {
    return std::binary_search(barriers.begin(), barriers.end(), p);
}

std::optional<int> SceneState::container_at(GridPos p) const {
    for (std::size_t i = 0; i < containers.size(); ++i)
        if (containers[i].pos == p) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> SceneState::table_object_at(GridPos p) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
        int id = static_cast<int>(i);
        if (holding == id) continue;
        if (objects[i].in_container) continue;
        if (objects[i].pos == p) return id;
    }
    return std::nullopt;
}

namespace {

// every non-barrier cell reachable from home by 4-neighbor moves
bool free_cells_connected(const SceneState& s) {
    std::vector<char> seen(static_cast<std::size_t>(s.width) * s.height, 0);
    auto idx = [&](GridPos p) { return static_cast<std::size_t>(p.y) * s.width + p.x; };
    std::vector<GridPos> stack{s.home};
    seen[idx(s.home)] = 1;
    std::size_t visited = 0;
    while (!stack.empty()) {
        GridPos p = stack.back();
        stack.pop_back();
        ++visited;
        const GridPos deltas[4] = {{0, -1}, {0, 1}, {1, 0}, {-1, 0}};
        for (const auto& d : deltas) {
            GridPos n{p.x + d.x, p.y + d.y};
            if (!s.in_bounds(n) || s.is_barrier(n) || seen[idx(n)]) continue;
            seen[idx(n)] = 1;
            stack.push_back(n);
        }
    }
    std::size_t free_total = static_cast<std::size_t>(s.width) * s.height - s.barriers.size();
    return visited == free_total;
}

}  // namespace

SceneState make_scene(const SceneConfig& config, std::uint64_t seed) {
    config.check();
    SceneState s;
    s.width = config.width;
    s.height = config.height;
    s.gripper = config.home;
    s.home = config.home;
    s.holding = std::nullopt;
    s.barriers = config.barriers;
    std::sort(s.barriers.begin(), s.barriers.end());
    s.barriers.erase(std::unique(s.barriers.begin(), s.barriers.end()), s.barriers.end());
    s.containers.resize(config.containers.size());
    Rng rng(seed);
    if (config.random_barriers > 0) {
        const std::vector<GridPos> fixed = s.barriers;
        std::vector<GridPos> candidates;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) {
                GridPos p{x, y};
                if (p != config.home && !s.is_barrier(p)) candidates.push_back(p);
            }
        if (static_cast<int>(candidates.size()) <= config.random_barriers)
            throw ConfigInvalid("random_barriers leaves no free cells");
        // redraw the whole set until every free cell stays reachable from home
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100)
                throw Unreachable("random barriers cannot keep the grid connected");
            std::vector<GridPos> pool = candidates;
            std::vector<GridPos> drawn;
            for (int k = 0; k < config.random_barriers; ++k) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                std::size_t j = pick(rng);
                drawn.push_back(pool[j]);
                pool[j] = pool.back();
                pool.pop_back();
            }
            s.barriers = fixed;
            s.barriers.insert(s.barriers.end(), drawn.begin(), drawn.end());
            std::sort(s.barriers.begin(), s.barriers.end());
            if (free_cells_connected(s)) break;
        }
    }
    std::set<GridPos> container_cells;
    for (const auto& c : config.containers) {
        if (c.id < 0 || c.id >= static_cast<int>(config.containers.size()))
            throw ConfigInvalid("container ids must be dense 0..n-1");
        std::vector<GridPos> cells;
        for (int y = c.spawn.y0; y <= c.spawn.y1; ++y)
            for (int x = c.spawn.x0; x <= c.spawn.x1; ++x) {
                GridPos p{x, y};
                if (!s.is_barrier(p) && !container_cells.count(p)) cells.push_back(p);
            }
        if (cells.empty())
            throw ConfigInvalid("container region cannot host all containers");
        // fixed containers take no draw so their rng stream matches the
        // region-free behavior exactly
        GridPos p = cells.front();
        if (cells.size() > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
            p = cells[pick(rng)];
        }
        container_cells.insert(p);
        s.containers[c.id] = {c.kind, p};
    }
    s.objects.resize(config.objects.size());
    std::set<GridPos> occupied;
    for (const auto& o : config.objects) {
        if (o.id < 0 || o.id >= static_cast<int>(config.objects.size()))
            throw ConfigInvalid("object ids must be dense 0..n-1");
        std::vector<GridPos> cells;
        for (int y = o.spawn.y0; y <= o.spawn.y1; ++y)
            for (int x = o.spawn.x0; x <= o.spawn.x1; ++x) {
                GridPos p{x, y};
                if (!s.is_barrier(p) && !occupied.count(p)) cells.push_back(p);
            }
        if (cells.empty())
            throw ConfigInvalid("spawn region cannot host all objects");
        std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
        GridPos p = cells[pick(rng)];
        occupied.insert(p);
        // a spawn cell holding a container spawns the object inside it,
        // which is what makes take-out tasks feasible from fresh scenes
        s.objects[o.id] = {o.kind, p, s.container_at(p)};
    }
    return s;
}

SceneState step(const SceneState& state, Action action) {
    SceneState s = state;
    auto try_move = [&](int dx, int dy) {
        GridPos p{s.gripper.x + dx, s.gripper.y + dy};
        if (!s.in_bounds(p) || s.is_barrier(p)) return;
        s.gripper = p;
        if (s.holding) s.objects[*s.holding].pos = p;
    };
    switch (action) {
        case Action::MoveNorth: try_move(0, -1); break;
        case Action::MoveSouth: try_move(0, 1); break;
        case Action::MoveEast: try_move(1, 0); break;
        case Action::MoveWest: try_move(-1, 0); break;
        case Action::Grasp: {
            if (s.holding) break;
            // on-table object first, then an object inside a container here
            std::optional<int> target = s.table_object_at(s.gripper);
            if (!target) {
                for (std::size_t i = 0; i < s.objects.size(); ++i)
                    if (s.objects[i].in_container && s.objects[i].pos == s.gripper) {
                        target = static_cast<int>(i);
                        break;
                    }
            }
            if (!target) break;
            s.holding = target;
            s.objects[*target].in_container = std::nullopt;
            s.objects[*target].pos = s.gripper;
            break;
        }
        case Action::Release: {
            if (!s.holding) break;
            int held = *s.holding;
            if (auto c = s.container_at(s.gripper)) {
                s.objects[held].in_container = *c;
                s.objects[held].pos = s.containers[*c].pos;
                s.holding = std::nullopt;
            } else if (!s.table_object_at(s.gripper)) {
                s.objects[held].in_container = std::nullopt;
                s.objects[held].pos = s.gripper;
                s.holding = std::nullopt;
            }
            break;
        }
        case Action::NoOp: break;
    }
    return s;
}

bool predicate_holds(const SceneState& state, const Predicate& p) {
    auto check_object = [&](int id) {
        if (id < 0 || id >= static_cast<int>(state.objects.size()))
            throw UnknownId("unknown object id " + std::to_string(id));
    };
    switch (p.kind) {
        case PredicateKind::InContainer: {
            check_object(p.object_id);
            if (p.container_id < 0 || p.container_id >= static_cast<int>(state.containers.size()))
                throw UnknownId("unknown container id " + std::to_string(p.container_id));
            return state.objects[p.object_id].in_container == p.container_id;
        }
        case PredicateKind::OnTable: {
            check_object(p.object_id);
            return state.holding != p.object_id && !state.objects[p.object_id].in_container;
        }
        case PredicateKind::GripperAt:
            return state.gripper == p.pos;
        case PredicateKind::InRegion: {
            check_object(p.object_id);
            return p.region.contains(state.objects[p.object_id].pos);
        }
    }
    return false;
}

int encode_planes(const SceneConfig& config) {
    return 3 + config.num_object_kinds + config.num_container_kinds;
}

int encode_dim(const SceneConfig& config) {
    return 2 * config.width * config.height * encode_planes(config);
}

std::vector<double> encode_state(const SceneState& state, const SceneConfig& config) {
    if (state.width != config.width || state.height != config.height)
        throw DimMismatch("state grid does not match config");
    const int cells = config.width * config.height;
    std::vector<double> v(static_cast<std::size_t>(cells) * encode_planes(config), 0.0);
    auto cell = [&](GridPos p) { return p.y * config.width + p.x; };
    // plane 0: gripper
    v[cell(state.gripper)] = 1.0;
    // plane 1: holding flag (broadcast)
    if (state.holding)
        std::fill(v.begin() + cells, v.begin() + 2 * cells, 1.0);
    // object kind planes
    for (const auto& o : state.objects) {
        if (o.kind < 0 || o.kind >= config.num_object_kinds)
            throw DimMismatch("object kind outside config universe");
        v[(2 + o.kind) * cells + cell(o.pos)] = 1.0;
    }
    // container kind planes
    int cbase = 2 + config.num_object_kinds;
    for (const auto& c : state.containers) {
        if (c.kind < 0 || c.kind >= config.num_container_kinds)
            throw DimMismatch("container kind outside config universe");
        v[(cbase + c.kind) * cells + cell(c.pos)] = 1.0;
    }
    // barrier plane
    int bbase = cbase + config.num_container_kinds;
    for (const auto& b : state.barriers) v[bbase * cells + cell(b)] = 1.0;
    return v;
}

std::vector<double> encode(const SceneState& state, const SceneState& goal,
                           const SceneConfig& config) {
    if (state.width != goal.width || state.height != goal.height)
        throw DimMismatch("state/goal grid mismatch");
    std::vector<double> v = encode_state(state, config);
    std::vector<double> g = encode_state(goal, config);
    v.insert(v.end(), g.begin(), g.end());
    return v;
}

bool state_valid(const SceneState& state) {
    if (!state.in_bounds(state.gripper) || state.is_barrier(state.gripper)) return false;
    if (state.holding &&
        (*state.holding < 0 || *state.holding >= static_cast<int>(state.objects.size())))
        return false;
    std::set<GridPos> table_cells;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        const auto& o = state.objects[i];
        if (!state.in_bounds(o.pos) || state.is_barrier(o.pos)) return false;
        if (state.holding == static_cast<int>(i)) {
            if (o.pos != state.gripper) return false;
            if (o.in_container) return false;
        } else if (o.in_container) {
            if (*o.in_container < 0 ||
                *o.in_container >= static_cast<int>(state.containers.size()))
                return false;
            if (o.pos != state.containers[*o.in_container].pos) return false;
        } else {
            if (!table_cells.insert(o.pos).second) return false;  // stacked on table
        }
    }
    for (const auto& c : state.containers)
        if (!state.in_bounds(c.pos) || state.is_barrier(c.pos)) return false;
    return true;
}

}  // namespace soar
