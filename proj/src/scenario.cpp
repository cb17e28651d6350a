#include "microrl/scenario.hpp"

#include "microrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace microrl {

std::string_view to_string(Side s) { return s == Side::Own ? "own" : "enemy"; }

std::string_view to_string(Winner w) {
    switch (w) {
        case Winner::None: return "none";
        case Winner::Own: return "own";
        case Winner::Enemy: return "enemy";
        case Winner::Timeout: return "timeout";
    }
    return "none";
}

std::string_view to_string(ScriptedPolicy p) {
    return p == ScriptedPolicy::AttackWeakest ? "weakest" : "closest";
}

ScriptedPolicy parse_scripted_policy(std::string_view s) {
    if (s == "weakest") return ScriptedPolicy::AttackWeakest;
    if (s == "closest") return ScriptedPolicy::AttackClosest;
    throw ConfigError("unknown scripted policy '" + std::string(s) + "' (expected weakest|closest)");
}

namespace {

bool in_bounds(const ScenarioSpec& spec, const Vec2& p) {
    return p.x() >= 0.0 && p.x() <= spec.map_width && p.y() >= 0.0 && p.y() <= spec.map_height;
}

}  // namespace

bool inside_obstacle(const ScenarioSpec& spec, const Vec2& p) {
    for (const auto& o : spec.obstacles)
        if ((p - o.center).norm() < o.radius) return true;
    return false;
}

void validate(const ScenarioSpec& spec) {
    auto fail = [&](const std::string& what) { throw ConfigError("scenario '" + spec.id + "': " + what); };
    if (!(spec.map_width > 0.0) || !(spec.map_height > 0.0)) fail("map dimensions must be > 0");
    if (spec.own_units.empty()) fail("at least one own unit is required");
    if (spec.enemy_units.empty()) fail("at least one enemy unit is required");
    if (spec.frame_skip < 1) fail("frame_skip must be >= 1");
    if (spec.max_episode_steps < 1) fail("max_episode_steps must be >= 1");
    if (!(spec.spawn_jitter >= 0.0)) fail("spawn_jitter must be >= 0");

    for (const auto& o : spec.obstacles) {
        if (!(o.radius > 0.0)) fail("obstacle radius must be > 0");
        if (o.center.x() - o.radius < 0.0 || o.center.x() + o.radius > spec.map_width ||
            o.center.y() - o.radius < 0.0 || o.center.y() + o.radius > spec.map_height)
            fail("obstacle must lie fully inside the map");
    }

    std::vector<const UnitPlacement*> all;
    for (const auto& u : spec.own_units) all.push_back(&u);
    for (const auto& u : spec.enemy_units) all.push_back(&u);
    for (std::size_t i = 0; i < all.size(); ++i) {
        validate(all[i]->unit_class);
        if (!in_bounds(spec, all[i]->position)) fail("spawn position " + std::to_string(i) + " out of bounds");
        if (inside_obstacle(spec, all[i]->position)) fail("spawn position " + std::to_string(i) + " inside obstacle");
        for (std::size_t j = 0; j < i; ++j)
            if (all[i]->position == all[j]->position)
                fail("spawn positions " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
}

namespace scenarios {

namespace {

constexpr double kSpacing = 1.5;
constexpr int kRowsPerColumn = 5;

// Columns of up to five units stacked around `anchor`; additional columns extend
// away from the opponent (direction `away` is -1 or +1 along x).
std::vector<UnitPlacement> block(const UnitClass& c, int count, Vec2 anchor, double away) {
    std::vector<UnitPlacement> out;
    const int columns = (count + kRowsPerColumn - 1) / kRowsPerColumn;
    for (int col = 0; col < columns; ++col) {
        const int in_col = std::min(kRowsPerColumn, count - col * kRowsPerColumn);
        for (int row = 0; row < in_col; ++row) {
            const double y = anchor.y() + (row - (in_col - 1) / 2.0) * kSpacing;
            const double x = anchor.x() + away * col * kSpacing;
            out.push_back({c, Vec2{x, y}});
        }
    }
    return out;
}

}  // namespace

ScenarioSpec block_formation(std::string id, const UnitClass& own, int own_count, const UnitClass& enemy,
                             int enemy_count) {
    ScenarioSpec spec;
    spec.id = std::move(id);
    spec.own_units = block(own, own_count, {20.0, 32.0}, -1.0);
    spec.enemy_units = block(enemy, enemy_count, {44.0, 32.0}, +1.0);
    return spec;
}

ScenarioSpec goliaths_vs_zealots(int goliaths, int zealots) {
    return block_formation("g" + std::to_string(goliaths) + "_vs_z" + std::to_string(zealots),
                           unit_classes::goliath(), goliaths, unit_classes::zealot(), zealots);
}

ScenarioSpec goliaths_vs_zerglings(int goliaths, int zerglings) {
    return block_formation("g" + std::to_string(goliaths) + "_vs_zl" + std::to_string(zerglings),
                           unit_classes::goliath(), goliaths, unit_classes::zergling(), zerglings);
}

ScenarioSpec marines_vs_zerglings(int marines, int zerglings) {
    return block_formation("m" + std::to_string(marines) + "_vs_zl" + std::to_string(zerglings),
                           unit_classes::marine(), marines, unit_classes::zergling(), zerglings);
}

ScenarioSpec bundled(std::string_view name) {
    static const std::regex pattern(R"(^(g|m)(\d+)_vs_(z|zl)(\d+)$)");
    std::cmatch m;
    const std::string s(name);
    if (!std::regex_match(s.c_str(), m, pattern)) throw ConfigError("unknown bundled scenario '" + s + "'");
    const int own = std::stoi(m[2].str());
    const int enemy = std::stoi(m[4].str());
    if (own < 1 || enemy < 1 || own > 200 || enemy > 200) throw ConfigError("unit counts out of range in '" + s + "'");
    const UnitClass& own_class = m[1] == "g" ? unit_classes::goliath() : unit_classes::marine();
    const UnitClass& enemy_class = m[3] == "z" ? unit_classes::zealot() : unit_classes::zergling();
    return block_formation(s, own_class, own, enemy_class, enemy);
}

std::vector<std::string> bundled_names() {
    return {"g3_vs_z6", "g3_vs_zl12", "g3_vs_zl20", "m5_vs_zl6", "m8_vs_zl10", "m8_vs_zl12", "m10_vs_zl13",
            "m10_vs_zl12", "m15_vs_zl20", "m20_vs_zl25", "m20_vs_zl30"};
}

}  // namespace scenarios
}  // namespace microrl
