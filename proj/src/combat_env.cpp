#include "microrl/combat_env.hpp"

#include "microrl/errors.hpp"

namespace microrl {

CombatEnvironment::CombatEnvironment(ScenarioSpec spec, RewardConfig reward)
    : spec_(std::move(spec)), reward_(reward) {
    validate(spec_);
    reward_.validate();
}

void CombatEnvironment::reset(std::uint64_t seed) {
    state_ = microrl::reset(spec_, seed);
    rho_ = hitpoint_ratio_rho(state_);
    const std::size_t n = state_.units.size();
    encoded_.assign(n, Observation::Zero());
    observations_.assign(n, Eigen::VectorXd());
    last_outcome_ = {};
    for (int id : state_.living(Side::Own)) {
        const auto i = static_cast<std::size_t>(id);
        encoded_[i] = encode(observe_raw(state_, id), nullptr, std::nullopt);
        observations_[i] = encoded_[i];
    }
}

const Eigen::VectorXd& CombatEnvironment::observation(int agent) const {
    if (agent < 0 || agent >= static_cast<int>(observations_.size()) || !state_.unit(agent).alive ||
        state_.unit(agent).side != Side::Own)
        throw ProtocolError("no observation for unit " + std::to_string(agent));
    return observations_[static_cast<std::size_t>(agent)];
}

EnvStep CombatEnvironment::step(const std::vector<AgentAction>& actions) {
    ActionMap orders;
    for (const auto& a : actions) {
        if (a.action < 0 || a.action >= kNumActions) throw ProtocolError("action index out of range");
        orders[a.agent] = action_from_index(a.action);
    }
    return step(orders);
}

EnvStep CombatEnvironment::step(const ActionMap& own_actions, std::optional<ScriptedPolicy> own_script) {
    last_outcome_ = microrl::step(state_, own_actions, own_script);
    if (replay_) replay_->record(state_, last_outcome_);

    EnvStep result;
    result.terminal = last_outcome_.terminal;
    result.winner = last_outcome_.winner;
    for (const auto& o : last_outcome_.units) {
        const Unit& u = state_.unit(o.unit_id);
        if (u.side != Side::Own) continue;
        const bool done = !u.alive || result.terminal;
        result.agents.push_back({o.unit_id, shaped_reward(o, u, rho_, reward_), done});
        if (!done) {
            const auto i = static_cast<std::size_t>(o.unit_id);
            const Observation prev = encoded_[i];
            encoded_[i] = encode(observe_raw(state_, o.unit_id), &prev, o.action);
            observations_[i] = encoded_[i];
        }
    }
    return result;
}

}  // namespace microrl
