#pragma once

#include "microrl/combat_sim.hpp"
#include "microrl/psmagds.hpp"
#include "microrl/replay.hpp"
#include "microrl/reward.hpp"
#include "microrl/state_encoder.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace microrl {

/// Combat simulator seen as a multi-agent environment: agents are the living own
/// units, observations are their 93-entry encodings, rewards are shaped per unit.
class CombatEnvironment {
  public:
    CombatEnvironment(ScenarioSpec spec, RewardConfig reward = {});

    void reset(std::uint64_t seed);
    std::vector<int> agents() const { return state_.living(Side::Own); }
    const Eigen::VectorXd& observation(int agent) const;
    EnvStep step(const std::vector<AgentAction>& actions);

    /// Step with explicit unit orders; pass `own_script` when they come from a scripted controller.
    EnvStep step(const ActionMap& own_actions, std::optional<ScriptedPolicy> own_script = std::nullopt);

    const SimState& state() const { return state_; }
    const ScenarioSpec& spec() const { return spec_; }
    double rho() const { return rho_; }
    const StepOutcome& last_outcome() const { return last_outcome_; }

    /// Every subsequent tick is appended to `sink` until set to nullptr.
    void set_replay(ReplayWriter* sink) { replay_ = sink; }

  private:
    ScenarioSpec spec_;
    RewardConfig reward_;
    SimState state_;
    double rho_ = 1.0;
    std::vector<Eigen::VectorXd> observations_;
    std::vector<Observation> encoded_;
    StepOutcome last_outcome_;
    ReplayWriter* replay_ = nullptr;
};

static_assert(MultiAgentEnvironment<CombatEnvironment>);

}  // namespace microrl
