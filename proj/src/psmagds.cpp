#include "microrl/psmagds.hpp"

namespace microrl {

void TrainerConfig::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(gamma)) throw ConfigError("gamma must lie in [0, 1]");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
    if (!in_unit(lambda)) throw ConfigError("lambda must lie in [0, 1]");
    if (!in_unit(epsilon0)) throw ConfigError("epsilon0 must lie in [0, 1]");
    if (episodes < 0) throw ConfigError("episodes must be >= 0");
    if (first_episode < 0 || first_episode > episodes) throw ConfigError("first_episode must lie in [0, episodes]");
    if (max_episode_steps < 1) throw ConfigError("max_episode_steps must be >= 1");
    reward.validate();
}

double epsilon_at(int episode, double epsilon0) {
    if (episode < 0) throw DomainError("epsilon_at: episode must be >= 0");
    return epsilon0 / std::sqrt(1.0 + episode);
}

}  // namespace microrl
