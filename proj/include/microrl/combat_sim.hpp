#pragma once

#include "microrl/action.hpp"
#include "microrl/scenario.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace microrl {

struct Unit {
    int id = 0;
    Side side = Side::Own;
    UnitClass unit_class;
    Vec2 position{0.0, 0.0};
    int hitpoint = 0;
    int cooldown_remaining = 0;
    bool alive = true;
};

/// Full simulator state. Own units take ids [0, own_count), enemies follow.
struct SimState {
    std::shared_ptr<const ScenarioSpec> spec;
    std::vector<Unit> units;
    int tick = 0;
    bool terminal = false;
    Winner winner = Winner::None;

    const Unit& unit(int id) const { return units.at(static_cast<std::size_t>(id)); }
    std::vector<int> living(Side side) const;
    int hitpoint_sum(Side side) const;
};

using ActionMap = std::map<int, CombatAction>;

struct UnitOutcome {
    int unit_id = 0;
    CombatAction action = CombatAction::AttackWeakest;
    int damage_amount = 0;  // HP actually removed from enemies this tick
    int hitpoint_lost = 0;
    bool died_this_tick = false;
    bool moved_toward_nobody = false;
    int attacks = 0;  // attack launches this tick (0 or 1)
};

/// Per-unit results for every unit alive when the tick started, in id order.
struct StepOutcome {
    std::vector<UnitOutcome> units;
    bool terminal = false;
    Winner winner = Winner::None;

    const UnitOutcome* find(int unit_id) const;
};

/// Initial state: units at their (jittered) spawns, full hitpoints, zero cooldown.
/// The seed drives the spawn jitter only; equal (spec, seed) give identical states.
SimState reset(const ScenarioSpec& spec, std::uint64_t seed);

/// Advances one decision tick (spec.frame_skip frames). `own_actions` must hold exactly
/// one action per living own unit; enemies follow spec.enemy_controller.
///
/// Learned own orders are literal: moves travel the full tick, AttackWeakest holds
/// position. Scripted orders (all enemies, and own units when `own_script` is set)
/// use that script's target rule and treat moves as attack-moves that stop to engage
/// as soon as a target is within fire range.
StepOutcome step(SimState& state, const ActionMap& own_actions,
                 std::optional<ScriptedPolicy> own_script = std::nullopt);

struct ObservedUnit {
    int id = 0;
    Side side = Side::Own;
    Vec2 position{0.0, 0.0};
    double distance = 0.0;
    bool in_sight = false;
};

/// What one living unit perceives. Allies exclude the unit itself; both lists hold
/// every other living unit with an in-sight flag (distance <= sight range).
struct RawObservation {
    int unit_id = 0;
    Side side = Side::Own;
    UnitClass unit_class;
    Vec2 position{0.0, 0.0};
    int hitpoint = 0;
    int cooldown_remaining = 0;
    double map_width = 0.0;
    double map_height = 0.0;
    std::vector<ObservedUnit> allies;
    std::vector<ObservedUnit> enemies;
    /// Obstacles whose surface comes within sight range.
    std::vector<TerrainObstacle> obstacles;

    int allies_in_sight() const;
    int enemies_in_sight() const;
};

RawObservation observe_raw(const SimState& state, int unit_id);

/// Scripted decisions for every living unit of `side`.
/// Weakest: attack if any enemy is in fire range (target chosen per frame by lowest hitpoint).
/// Closest: same trigger, target chosen by distance with ties to the lower id.
/// Otherwise both move toward the sector of the nearest enemy.
ActionMap scripted_actions(const SimState& state, Side side, ScriptedPolicy policy);

inline ActionMap scripted_enemy_actions(const SimState& state, ScriptedPolicy policy) {
    return scripted_actions(state, Side::Enemy, policy);
}

/// Target the attacker would hit right now, or -1 when nothing is in fire range.
int select_target(const SimState& state, const Unit& attacker, ScriptedPolicy rule);

}  // namespace microrl
