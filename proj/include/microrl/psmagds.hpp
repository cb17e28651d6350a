#pragma once

// Parameter-sharing multi-agent gradient-descent Sarsa(lambda).
//
// One parameter vector and one eligibility trace are shared by every agent. Each tick
// all living agents act on the same parameters, the environment advances once, every
// surviving agent picks its next action epsilon-greedily, and then agents are updated
// one after another in id order:
//
//   e     <- gamma * lambda * e + grad Q(s, a)
//   delta <- r + gamma * Q(s', a') - Q(s, a)      (no bootstrap when the agent is done)
//   theta <- theta + alpha * delta * e

#include "microrl/errors.hpp"
#include "microrl/q_network.hpp"
#include "microrl/random.hpp"
#include "microrl/reward.hpp"
#include "microrl/scenario.hpp"

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <functional>
#include <vector>

namespace microrl {

struct TrainerConfig {
    double gamma = 0.9;
    double alpha = 0.001;
    double lambda = 0.8;
    double epsilon0 = 0.5;
    int episodes = 4000;
    /// Index of the first episode to run; later than 0 when resuming from a checkpoint.
    int first_episode = 0;
    int max_episode_steps = 1000;
    RewardConfig reward;
    std::uint64_t seed = 1;

    void validate() const;
};

/// epsilon0 / sqrt(1 + episode)
double epsilon_at(int episode, double epsilon0 = 0.5);

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
int greedy_action(const Eigen::MatrixBase<Derived>& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

/// Uniform random action with probability epsilon, otherwise the greedy one.
/// Consumes one uniform draw per call, plus one integer draw when exploring.
template <ActionValueFunction Q, typename Derived, typename URBG>
int select_action(const Q& q, const Eigen::MatrixBase<Derived>& x, double epsilon, URBG& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, q.num_actions() - 1);
        return pick(rng);
    }
    return greedy_action(q.forward(x));
}

struct AgentAction {
    int agent;
    int action;
};

struct AgentFeedback {
    int agent;
    double reward;
    bool done;  // agent died or the episode ended
};

struct EnvStep {
    std::vector<AgentFeedback> agents;  // every agent that acted, in id order
    bool terminal = false;
    Winner winner = Winner::None;
};

/// Episodic multi-agent environment driven by the trainer.
template <class E>
concept MultiAgentEnvironment = requires(E& env, const E& cenv, std::uint64_t seed, const std::vector<AgentAction>& acts) {
    env.reset(seed);
    { cenv.agents() } -> std::convertible_to<std::vector<int>>;
    { cenv.observation(0) } -> std::convertible_to<const Eigen::VectorXd&>;
    { env.step(acts) } -> std::same_as<EnvStep>;
};

struct EpisodeStats {
    int episode = 0;
    int steps = 0;
    std::vector<double> agent_rewards;  // per agent, in initial id order
    double total_reward = 0.0;
    Winner winner = Winner::None;
    double epsilon = 0.0;

    double avg_reward_per_step() const { return steps > 0 ? total_reward / steps : 0.0; }
};

template <class Q>
struct UpdateInfo {
    int episode;
    int tick;
    int agent;
    double delta;
    const VectorX<typename Q::Scalar>& trace;
    const Q& q;
};

template <class Q>
struct TrainHooks {
    std::function<void(int episode, const VectorX<typename Q::Scalar>& trace)> on_episode_start;
    std::function<void(const UpdateInfo<Q>&)> on_update;
    std::function<void(const EpisodeStats&, const Q&)> on_episode_end;
};

template <class Q>
struct TrainResult {
    Q q;
    std::vector<EpisodeStats> stats;
};

template <MultiAgentEnvironment Env, ActionValueFunction Q>
TrainResult<Q> train(Env& env, const TrainerConfig& cfg, Q q, const TrainHooks<Q>& hooks = {}) {
    using Scalar = typename Q::Scalar;
    cfg.validate();

    TrainResult<Q> result{std::move(q), {}};
    Q& net = result.q;
    result.stats.reserve(static_cast<std::size_t>(cfg.episodes - cfg.first_episode));

    VectorX<Scalar> trace = VectorX<Scalar>::Zero(net.params().size());
    const Scalar trace_decay = static_cast<Scalar>(cfg.gamma * cfg.lambda);

    std::vector<Eigen::VectorXd> obs;
    std::vector<Eigen::VectorXd> next_obs;
    std::vector<int> act;
    std::vector<int> next_act;

    for (int episode = cfg.first_episode; episode < cfg.episodes; ++episode) {
        const double epsilon = epsilon_at(episode, cfg.epsilon0);
        // Per-episode streams make a resumed run identical to an uninterrupted one.
        Rng explore(derive_seed(cfg.seed, "explore", static_cast<std::uint64_t>(episode)));
        env.reset(derive_seed(cfg.seed, "sim", static_cast<std::uint64_t>(episode)));
        trace.setZero();
        if (hooks.on_episode_start) hooks.on_episode_start(episode, trace);

        std::vector<int> agents = env.agents();
        int max_agent = 0;
        for (int a : agents) max_agent = std::max(max_agent, a);
        obs.assign(static_cast<std::size_t>(max_agent) + 1, {});
        next_obs.assign(obs.size(), {});
        act.assign(obs.size(), 0);
        next_act.assign(obs.size(), 0);
        for (int a : agents) {
            const auto i = static_cast<std::size_t>(a);
            obs[i] = env.observation(a);
            act[i] = select_action(net, obs[i], epsilon, explore);
        }

        EpisodeStats stats;
        stats.episode = episode;
        stats.epsilon = epsilon;
        stats.agent_rewards.assign(obs.size(), 0.0);

        std::vector<AgentAction> actions;
        for (int tick = 0;; ++tick) {
            actions.clear();
            for (int a : agents) actions.push_back({a, act[static_cast<std::size_t>(a)]});
            const EnvStep outcome = env.step(actions);
            ++stats.steps;
            const bool terminal = outcome.terminal || stats.steps >= cfg.max_episode_steps;

            // Next actions come from the parameters as they were before this tick's updates.
            for (const auto& fb : outcome.agents) {
                if (fb.done || terminal) continue;
                const auto i = static_cast<std::size_t>(fb.agent);
                next_obs[i] = env.observation(fb.agent);
                next_act[i] = select_action(net, next_obs[i], epsilon, explore);
            }

            for (const auto& fb : outcome.agents) {
                const auto i = static_cast<std::size_t>(fb.agent);
                const bool bootstrap = !(fb.done || terminal);
                const Scalar q_sa = net.accumulate_gradient(obs[i], act[i], trace_decay, trace);
                const Scalar q_next = bootstrap ? net.value(next_obs[i], next_act[i]) : Scalar(0);
                const Scalar delta = static_cast<Scalar>(fb.reward) + static_cast<Scalar>(cfg.gamma) * q_next - q_sa;
                if (!std::isfinite(static_cast<double>(delta)))
                    throw NumericDivergence(episode, tick, "non-finite TD error");
                net.add_scaled(static_cast<Scalar>(cfg.alpha) * delta, trace);
                if (hooks.on_update) hooks.on_update(UpdateInfo<Q>{episode, tick, fb.agent, static_cast<double>(delta), trace, net});

                stats.agent_rewards[i] += fb.reward;
                stats.total_reward += fb.reward;
            }
            if (!net.params().allFinite()) throw NumericDivergence(episode, tick, "non-finite parameters");

            if (terminal) {
                stats.winner = outcome.terminal ? outcome.winner : Winner::Timeout;
                break;
            }
            agents.clear();
            for (const auto& fb : outcome.agents) {
                if (fb.done) continue;
                agents.push_back(fb.agent);
                const auto i = static_cast<std::size_t>(fb.agent);
                std::swap(obs[i], next_obs[i]);
                act[i] = next_act[i];
            }
        }

        if (hooks.on_episode_end) hooks.on_episode_end(stats, net);
        result.stats.push_back(std::move(stats));
    }
    return result;
}

}  // namespace microrl
