#include "microrl/unit_class.hpp"

#include "microrl/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace microrl {

void validate(const UnitClass& c) {
    auto fail = [&](const std::string& what) {
        throw ConfigError("unit class '" + c.name + "': " + what);
    };
    if (c.name.empty()) fail("name must not be empty");
    if (c.max_hitpoint <= 0) fail("max_hitpoint must be > 0");
    if (c.cooldown_frames <= 0) fail("cooldown_frames must be > 0");
    if (c.damage_factor < 0) fail("damage_factor must be >= 0");
    if (c.defence_factor < 0) fail("defence_factor must be >= 0");
    if (!(c.fire_range > 0.0)) fail("fire_range must be > 0");
    if (!(c.sight_range >= c.fire_range)) fail("sight_range must be >= fire_range");
    if (!(c.move_speed >= 0.0) || !std::isfinite(c.move_speed)) fail("move_speed must be finite and >= 0");
}

namespace unit_classes {

// hitpoint / cooldown / damage / defence / fire range / sight range / speed
const UnitClass& goliath() {
    static const UnitClass c{"goliath", 125, 22, 12, 1, 5.0, 8.0, 0.45};
    return c;
}

const UnitClass& zealot() {
    static const UnitClass c{"zealot", 160, 22, 16, 1, 1.0, 7.0, 0.40};
    return c;
}

const UnitClass& zergling() {
    static const UnitClass c{"zergling", 35, 8, 5, 0, 1.0, 5.0, 0.55};
    return c;
}

const UnitClass& marine() {
    static const UnitClass c{"marine", 40, 15, 6, 0, 4.0, 7.0, 0.40};
    return c;
}

const UnitClass& by_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (const UnitClass* c : {&goliath(), &zealot(), &zergling(), &marine()})
        if (c->name == lower) return *c;
    throw ConfigError("unknown unit class '" + std::string(name) + "'");
}

std::vector<std::string> names() { return {"goliath", "zealot", "zergling", "marine"}; }

}  // namespace unit_classes
}  // namespace microrl
