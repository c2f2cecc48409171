#pragma once

#include <random>

#include "soar/config.hpp"
#include "soar/scene.hpp"

namespace soar::test {

// 8x8 scene: two objects (kinds 0,1), two containers (kinds 0,1), four tasks.
inline SceneConfig base_config() {
    SceneConfig c;
    c.name = "base";
    c.width = 8;
    c.height = 8;
    c.num_object_kinds = 3;
    c.num_container_kinds = 2;
    c.home = {0, 0};
    c.objects = {{0, 0, {1, 1, 6, 6}}, {1, 1, {1, 1, 6, 6}}};
    c.containers = {{0, 0, {6, 6}}, {1, 1, {1, 6}}};
    c.object_kind_names = {{0, "green block"}, {1, "orange crayon"}, {2, "purple cup"}};
    c.container_kind_names = {{0, "brown bowl"}, {1, "blue plate"}};
    for (int o = 0; o < 2; ++o)
        for (int cid = 0; cid < 2; ++cid) {
            TaskSpec put{static_cast<int>(c.tasks.size()), TaskTemplate::PutIn, o, cid, {}, ""};
            put.language = task_language(put, c);
            c.tasks.push_back(put);
            TaskSpec take{static_cast<int>(c.tasks.size()), TaskTemplate::TakeOut, o, cid, {}, ""};
            take.language = task_language(take, c);
            c.tasks.push_back(take);
        }
    return c;
}

// Scene with a barrier ring segment and an unseen object kind.
inline SceneConfig shifted_config() {
    SceneConfig c = base_config();
    c.name = "shifted";
    c.objects = {{0, 2, {2, 2, 5, 5}}, {1, 1, {2, 2, 5, 5}}};
    c.barriers = {{3, 0}, {3, 1}, {0, 3}, {1, 3}};
    c.tasks.clear();
    for (int o = 0; o < 2; ++o) {
        TaskSpec put{static_cast<int>(c.tasks.size()), TaskTemplate::PutIn, o, 0, {}, ""};
        put.language = task_language(put, c);
        c.tasks.push_back(put);
        TaskSpec take{static_cast<int>(c.tasks.size()), TaskTemplate::TakeOut, o, 0, {}, ""};
        take.language = task_language(take, c);
        c.tasks.push_back(take);
    }
    return c;
}

inline Action random_action(Rng& rng) {
    std::uniform_int_distribution<int> d(0, kActionCount - 1);
    return static_cast<Action>(d(rng));
}

}  // namespace soar::test
