#pragma once

#include "microrl/combat_sim.hpp"

#include <string_view>

namespace microrl {

/// How the damage term of the shaped reward is weighted.
/// Folded: HP actually removed from enemies, counted once.
/// Literal: HP removed multiplied by the attacker's damage_factor.
enum class RewardVariant { Folded, Literal };

std::string_view to_string(RewardVariant v);
RewardVariant parse_reward_variant(std::string_view s);  // "folded" | "literal"

struct RewardConfig {
    double divisor = 10.0;
    double death_penalty = -10.0;
    double idle_move_penalty = -0.5;
    RewardVariant variant = RewardVariant::Folded;

    void validate() const;
};

/// Enemy hitpoint total over own hitpoint total; evaluated on the episode's
/// initial state and held fixed for the episode.
double hitpoint_ratio_rho(const SimState& state);

/// Per-unit reward for one tick:
///   (damage - rho * hitpoint_lost) / divisor
///   + death_penalty if the unit died + idle_move_penalty if it moved toward nobody.
double shaped_reward(const UnitOutcome& outcome, const Unit& unit, double rho, const RewardConfig& cfg);

}  // namespace microrl
