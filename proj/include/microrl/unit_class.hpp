#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace microrl {

/// Static combat attributes shared by every unit of a type.
struct UnitClass {
    std::string name;
    int max_hitpoint = 1;
    int cooldown_frames = 1;  // frames between attack launches
    int damage_factor = 0;    // HP per hit before defence
    int defence_factor = 0;   // HP absorbed per received hit
    double fire_range = 1.0;
    double sight_range = 1.0;
    double move_speed = 0.0;  // map units per frame

    friend bool operator==(const UnitClass&, const UnitClass&) = default;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const UnitClass& c);

/// HP removed by one hit before capping at the target's remaining hitpoints.
constexpr int hit_damage(const UnitClass& attacker, const UnitClass& defender) {
    const int raw = attacker.damage_factor - defender.defence_factor;
    return raw < 1 ? 1 : raw;
}

namespace unit_classes {

const UnitClass& goliath();
const UnitClass& zealot();
const UnitClass& zergling();
const UnitClass& marine();

/// Case-insensitive lookup of a bundled class; throws ConfigError if unknown.
const UnitClass& by_name(std::string_view name);

std::vector<std::string> names();

}  // namespace unit_classes
}  // namespace microrl
