#pragma once

#include "microrl/scenario.hpp"
#include "microrl/unit_class.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

using namespace microrl;

/// Hand-placed scenario without spawn jitter.
inline ScenarioSpec placed(std::vector<UnitPlacement> own, std::vector<UnitPlacement> enemy,
                           ScriptedPolicy controller = ScriptedPolicy::AttackClosest) {
    ScenarioSpec s;
    s.id = "placed";
    s.own_units = std::move(own);
    s.enemy_units = std::move(enemy);
    s.enemy_controller = controller;
    s.spawn_jitter = 0.0;
    return s;
}

inline UnitPlacement at(const UnitClass& c, double x, double y) { return {c, {x, y}}; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("microrl_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random scene: 1-5 units a side of random bundled classes, spread over the map.
inline ScenarioSpec random_scene(std::mt19937_64& rng) {
    const auto names = unit_classes::names();
    std::uniform_int_distribution<int> count(1, 5), cls(0, static_cast<int>(names.size()) - 1);
    std::uniform_real_distribution<double> coord(1.0, 63.0);
    ScenarioSpec s;
    s.id = "random";
    s.spawn_jitter = 0.0;
    s.enemy_controller = rng() % 2 ? ScriptedPolicy::AttackClosest : ScriptedPolicy::AttackWeakest;
    const int own = count(rng), enemy = count(rng);
    for (int i = 0; i < own; ++i) s.own_units.push_back({unit_classes::by_name(names[cls(rng)]), {coord(rng), coord(rng)}});
    for (int i = 0; i < enemy; ++i)
        s.enemy_units.push_back({unit_classes::by_name(names[cls(rng)]), {coord(rng), coord(rng)}});
    return s;
}

}  // namespace testing_support
