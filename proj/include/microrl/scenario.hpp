#pragma once

#include "microrl/geometry.hpp"
#include "microrl/unit_class.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace microrl {

enum class Side { Own, Enemy };

/// Winner::None marks a running episode.
enum class Winner { None, Own, Enemy, Timeout };

/// Rule-based controllers used for the opposing side and as own-side baselines.
enum class ScriptedPolicy { AttackWeakest, AttackClosest };

std::string_view to_string(Side s);
std::string_view to_string(Winner w);
std::string_view to_string(ScriptedPolicy p);
ScriptedPolicy parse_scripted_policy(std::string_view s);  // "weakest" | "closest"

struct TerrainObstacle {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
};

struct UnitPlacement {
    UnitClass unit_class;
    Vec2 position{0.0, 0.0};
};

/// Declarative description of one combat.
struct ScenarioSpec {
    std::string id = "custom";
    double map_width = 64.0;
    double map_height = 64.0;
    std::vector<UnitPlacement> own_units;
    std::vector<UnitPlacement> enemy_units;
    std::vector<TerrainObstacle> obstacles;
    ScriptedPolicy enemy_controller = ScriptedPolicy::AttackClosest;
    int max_episode_steps = 1000;
    int frame_skip = 10;
    /// Half-width of the uniform per-axis offset applied to every spawn at reset.
    double spawn_jitter = 1.0;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const ScenarioSpec& spec);

bool inside_obstacle(const ScenarioSpec& spec, const Vec2& p);

namespace scenarios {

/// Two opposing blocks: own units centred at x = 20, enemies at x = 44, both at mid height.
ScenarioSpec block_formation(std::string id, const UnitClass& own, int own_count, const UnitClass& enemy,
                             int enemy_count);

ScenarioSpec goliaths_vs_zealots(int goliaths = 3, int zealots = 6);
ScenarioSpec goliaths_vs_zerglings(int goliaths = 3, int zerglings = 20);
ScenarioSpec marines_vs_zerglings(int marines, int zerglings);

/// Bundled scenarios by name: "g<k>_vs_z<n>", "g<k>_vs_zl<n>" and "m<k>_vs_zl<n>" for any counts.
ScenarioSpec bundled(std::string_view name);
std::vector<std::string> bundled_names();

}  // namespace scenarios
}  // namespace microrl
