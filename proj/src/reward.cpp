#include "microrl/reward.hpp"

#include "microrl/errors.hpp"

#include <cmath>

namespace microrl {

std::string_view to_string(RewardVariant v) { return v == RewardVariant::Folded ? "folded" : "literal"; }

RewardVariant parse_reward_variant(std::string_view s) {
    if (s == "folded") return RewardVariant::Folded;
    if (s == "literal") return RewardVariant::Literal;
    throw ConfigError("unknown reward variant '" + std::string(s) + "' (expected folded|literal)");
}

void RewardConfig::validate() const {
    if (!(divisor > 0.0) || !std::isfinite(divisor)) throw ConfigError("reward divisor must be > 0");
    if (!std::isfinite(death_penalty) || !std::isfinite(idle_move_penalty))
        throw ConfigError("reward penalties must be finite");
}

double hitpoint_ratio_rho(const SimState& state) {
    const int own = state.hitpoint_sum(Side::Own);
    if (own <= 0) throw DomainError("hitpoint_ratio_rho: own hitpoint sum is zero");
    return static_cast<double>(state.hitpoint_sum(Side::Enemy)) / own;
}

double shaped_reward(const UnitOutcome& outcome, const Unit& unit, double rho, const RewardConfig& cfg) {
    if (!(rho > 0.0)) throw DomainError("shaped_reward: rho must be > 0");
    double dealt = outcome.damage_amount;
    if (cfg.variant == RewardVariant::Literal) dealt *= unit.unit_class.damage_factor;
    double r = (dealt - rho * outcome.hitpoint_lost) / cfg.divisor;
    if (outcome.died_this_tick) r += cfg.death_penalty;
    if (outcome.moved_toward_nobody) r += cfg.idle_move_penalty;
    return r;
}

}  // namespace microrl
