#include "microrl/replay.hpp"

namespace microrl {

nlohmann::json replay_record(const SimState& after, const StepOutcome& outcome) {
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : after.units) {
        nlohmann::json ju{
            {"id", u.id},
            {"side", to_string(u.side)},
            {"class", u.unit_class.name},
            {"x", u.position.x()},
            {"y", u.position.y()},
            {"hitpoint", u.hitpoint},
            {"cooldown", u.cooldown_remaining},
            {"alive", u.alive},
        };
        if (const UnitOutcome* o = outcome.find(u.id)) ju["action"] = action_name(o->action);
        units.push_back(std::move(ju));
    }
    nlohmann::json results = nlohmann::json::array();
    for (const auto& o : outcome.units) {
        results.push_back({
            {"id", o.unit_id},
            {"damage_amount", o.damage_amount},
            {"hitpoint_lost", o.hitpoint_lost},
            {"died_this_tick", o.died_this_tick},
            {"moved_toward_nobody", o.moved_toward_nobody},
        });
    }
    return {
        {"tick", after.tick - 1},
        {"units", std::move(units)},
        {"outcome", {{"terminal", outcome.terminal}, {"winner", to_string(outcome.winner)}, {"units", std::move(results)}}},
    };
}

void ReplayWriter::record(const SimState& after, const StepOutcome& outcome) {
    out_ << replay_record(after, outcome).dump() << '\n';
    ++lines_;
}

}  // namespace microrl
