#include "microrl/combat_sim.hpp"

#include "microrl/errors.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace microrl {

std::vector<int> SimState::living(Side side) const {
    std::vector<int> ids;
    for (const auto& u : units)
        if (u.alive && u.side == side) ids.push_back(u.id);
    return ids;
}

int SimState::hitpoint_sum(Side side) const {
    int sum = 0;
    for (const auto& u : units)
        if (u.side == side) sum += u.hitpoint;
    return sum;
}

const UnitOutcome* StepOutcome::find(int unit_id) const {
    for (const auto& u : units)
        if (u.unit_id == unit_id) return &u;
    return nullptr;
}

int RawObservation::allies_in_sight() const {
    return static_cast<int>(std::count_if(allies.begin(), allies.end(), [](const auto& u) { return u.in_sight; }));
}

int RawObservation::enemies_in_sight() const {
    return static_cast<int>(std::count_if(enemies.begin(), enemies.end(), [](const auto& u) { return u.in_sight; }));
}

SimState reset(const ScenarioSpec& spec, std::uint64_t seed) {
    validate(spec);
    SimState state;
    state.spec = std::make_shared<const ScenarioSpec>(spec);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-spec.spawn_jitter, spec.spawn_jitter);

    auto add = [&](const UnitPlacement& p, Side side) {
        Unit u;
        u.id = static_cast<int>(state.units.size());
        u.side = side;
        u.unit_class = p.unit_class;
        u.hitpoint = p.unit_class.max_hitpoint;
        u.cooldown_remaining = 0;
        u.alive = true;
        u.position = p.position;
        if (spec.spawn_jitter > 0.0) {
            // Both draws are taken unconditionally so the stream stays aligned.
            const double dx = jitter(rng);
            const double dy = jitter(rng);
            Vec2 q{std::clamp(p.position.x() + dx, 0.0, spec.map_width),
                   std::clamp(p.position.y() + dy, 0.0, spec.map_height)};
            const bool clash = std::any_of(state.units.begin(), state.units.end(),
                                           [&](const Unit& o) { return o.position == q; });
            if (!inside_obstacle(spec, q) && !clash) u.position = q;
        }
        state.units.push_back(std::move(u));
    };
    for (const auto& p : spec.own_units) add(p, Side::Own);
    for (const auto& p : spec.enemy_units) add(p, Side::Enemy);
    return state;
}

int select_target(const SimState& state, const Unit& attacker, ScriptedPolicy rule) {
    int best = -1;
    double best_key = std::numeric_limits<double>::infinity();
    for (const auto& u : state.units) {
        if (!u.alive || u.side == attacker.side) continue;
        const double d = (u.position - attacker.position).norm();
        if (d > attacker.unit_class.fire_range) continue;
        const double key = rule == ScriptedPolicy::AttackWeakest ? static_cast<double>(u.hitpoint) : d;
        // Strict comparison keeps the lowest id among ties.
        if (key < best_key) {
            best_key = key;
            best = u.id;
        }
    }
    return best;
}

namespace {

int nearest_enemy(const SimState& state, const Unit& from) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& u : state.units) {
        if (!u.alive || u.side == from.side) continue;
        const double d = (u.position - from.position).norm();
        if (d < best_d) {
            best_d = d;
            best = u.id;
        }
    }
    return best;
}

bool sector_has_unit(const SimState& state, const Unit& center, int sector) {
    for (const auto& u : state.units) {
        if (!u.alive || u.id == center.id) continue;
        const Vec2 offset = u.position - center.position;
        if (offset.norm() > center.unit_class.sight_range) continue;
        if (sector_of(offset) == sector) return true;
    }
    return false;
}

void move_unit(const ScenarioSpec& spec, Unit& u, const Vec2& delta) {
    const Vec2 next = u.position + delta;
    const Vec2 clamped{std::clamp(next.x(), 0.0, spec.map_width), std::clamp(next.y(), 0.0, spec.map_height)};
    if (!inside_obstacle(spec, clamped)) u.position = clamped;
}

bool side_eliminated(const SimState& state, Side side) {
    return std::none_of(state.units.begin(), state.units.end(),
                        [&](const Unit& u) { return u.alive && u.side == side; });
}

}  // namespace

ActionMap scripted_actions(const SimState& state, Side side, ScriptedPolicy policy) {
    ActionMap actions;
    for (const auto& u : state.units) {
        if (!u.alive || u.side != side) continue;
        if (select_target(state, u, policy) >= 0) {
            actions[u.id] = CombatAction::AttackWeakest;
            continue;
        }
        const int target = nearest_enemy(state, u);
        if (target < 0) {
            actions[u.id] = CombatAction::AttackWeakest;
            continue;
        }
        actions[u.id] = move_for_sector(sector_of(state.unit(target).position - u.position));
    }
    return actions;
}

StepOutcome step(SimState& state, const ActionMap& own_actions, std::optional<ScriptedPolicy> own_script) {
    if (state.terminal) throw ProtocolError("step called on a terminal state");
    const ScenarioSpec& spec = *state.spec;

    for (const auto& [id, action] : own_actions) {
        if (id < 0 || id >= static_cast<int>(state.units.size()))
            throw ProtocolError("action for unknown unit " + std::to_string(id));
        const Unit& u = state.unit(id);
        if (u.side != Side::Own) throw ProtocolError("action for non-own unit " + std::to_string(id));
        if (!u.alive) throw ProtocolError("action for dead unit " + std::to_string(id));
    }
    for (const auto& u : state.units)
        if (u.alive && u.side == Side::Own && !own_actions.contains(u.id))
            throw ProtocolError("missing action for own unit " + std::to_string(u.id));

    const ActionMap enemy_actions = scripted_actions(state, Side::Enemy, spec.enemy_controller);

    const std::size_t n = state.units.size();
    std::vector<CombatAction> orders(n, CombatAction::AttackWeakest);
    std::vector<ScriptedPolicy> fire_rule(n, own_script.value_or(ScriptedPolicy::AttackWeakest));
    // Scripted move orders are attack-moves: they stop once a target is in range and may
    // strike on the frame they close in.
    std::vector<bool> attack_move(n, false);
    std::vector<bool> acting(n, false);
    std::vector<bool> fired(n, false);
    std::vector<int> outcome_slot(n, -1);

    StepOutcome outcome;
    for (const auto& u : state.units) {
        if (!u.alive) continue;
        const auto& source = u.side == Side::Own ? own_actions : enemy_actions;
        const auto i = static_cast<std::size_t>(u.id);
        orders[i] = source.at(u.id);
        if (u.side == Side::Enemy) fire_rule[i] = spec.enemy_controller;
        attack_move[i] = is_move(orders[i]) && (u.side == Side::Enemy || own_script.has_value());
        acting[i] = true;
        UnitOutcome o;
        o.unit_id = u.id;
        o.action = orders[i];
        o.moved_toward_nobody = is_move(orders[i]) && !sector_has_unit(state, u, move_sector(orders[i]));
        outcome_slot[i] = static_cast<int>(outcome.units.size());
        outcome.units.push_back(o);
    }

    struct Shot {
        int attacker;
        int target;
    };
    std::vector<Shot> shots;
    std::vector<bool> engaged(n, false);

    for (int frame = 0; frame < spec.frame_skip; ++frame) {
        for (auto& u : state.units)
            if (u.alive && u.cooldown_remaining > 0) --u.cooldown_remaining;

        for (const auto& u : state.units) {
            const auto i = static_cast<std::size_t>(u.id);
            engaged[i] = u.alive && acting[i] && attack_move[i] && select_target(state, u, fire_rule[i]) >= 0;
        }
        for (auto& u : state.units) {
            const auto i = static_cast<std::size_t>(u.id);
            if (!u.alive || !acting[i] || !is_move(orders[i]) || engaged[i]) continue;
            move_unit(spec, u, move_direction(orders[i]) * u.unit_class.move_speed);
        }

        // Targets are picked against the frame's pre-damage state, then hits land in id order.
        shots.clear();
        for (const auto& u : state.units) {
            const auto i = static_cast<std::size_t>(u.id);
            const bool attacking = !is_move(orders[i]) || attack_move[i];
            if (!u.alive || !acting[i] || !attacking || fired[i] || u.cooldown_remaining > 0) continue;
            const int target = select_target(state, u, fire_rule[i]);
            if (target >= 0) shots.push_back({u.id, target});
        }
        for (const Shot& s : shots) {
            Unit& attacker = state.units[static_cast<std::size_t>(s.attacker)];
            Unit& target = state.units[static_cast<std::size_t>(s.target)];
            const int dealt = std::min(hit_damage(attacker.unit_class, target.unit_class), target.hitpoint);
            target.hitpoint -= dealt;
            attacker.cooldown_remaining = attacker.unit_class.cooldown_frames;
            fired[static_cast<std::size_t>(s.attacker)] = true;

            auto& ao = outcome.units[static_cast<std::size_t>(outcome_slot[static_cast<std::size_t>(s.attacker)])];
            ao.damage_amount += dealt;
            ao.attacks += 1;
            auto& to = outcome.units[static_cast<std::size_t>(outcome_slot[static_cast<std::size_t>(s.target)])];
            to.hitpoint_lost += dealt;
            if (target.alive && target.hitpoint == 0) {
                target.alive = false;
                to.died_this_tick = true;
            }
        }

        if (side_eliminated(state, Side::Own) || side_eliminated(state, Side::Enemy)) break;
    }

    ++state.tick;
    const bool own_gone = side_eliminated(state, Side::Own);
    const bool enemy_gone = side_eliminated(state, Side::Enemy);
    if (own_gone) {
        // Mutual annihilation is not a win.
        state.winner = Winner::Enemy;
    } else if (enemy_gone) {
        state.winner = Winner::Own;
    } else if (state.tick >= spec.max_episode_steps) {
        state.winner = Winner::Timeout;
    }
    state.terminal = state.winner != Winner::None;
    outcome.terminal = state.terminal;
    outcome.winner = state.winner;
    return outcome;
}

RawObservation observe_raw(const SimState& state, int unit_id) {
    if (unit_id < 0 || unit_id >= static_cast<int>(state.units.size()))
        throw ProtocolError("observe_raw: unknown unit " + std::to_string(unit_id));
    const Unit& self = state.unit(unit_id);
    if (!self.alive) throw ProtocolError("observe_raw: unit " + std::to_string(unit_id) + " is dead");

    const ScenarioSpec& spec = *state.spec;
    const double sight = self.unit_class.sight_range;

    RawObservation raw;
    raw.unit_id = self.id;
    raw.side = self.side;
    raw.unit_class = self.unit_class;
    raw.position = self.position;
    raw.hitpoint = self.hitpoint;
    raw.cooldown_remaining = self.cooldown_remaining;
    raw.map_width = spec.map_width;
    raw.map_height = spec.map_height;
    for (const auto& u : state.units) {
        if (!u.alive || u.id == self.id) continue;
        ObservedUnit o;
        o.id = u.id;
        o.side = u.side;
        o.position = u.position;
        o.distance = (u.position - self.position).norm();
        o.in_sight = o.distance <= sight;
        (u.side == self.side ? raw.allies : raw.enemies).push_back(o);
    }
    for (const auto& o : spec.obstacles)
        if ((o.center - self.position).norm() - o.radius <= sight) raw.obstacles.push_back(o);
    return raw;
}

}  // namespace microrl
