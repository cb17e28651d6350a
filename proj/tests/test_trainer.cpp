#include "chain_oracle.hpp"
#include "support.hpp"

#include "microrl/checkpoint.hpp"
#include "microrl/combat_env.hpp"
#include "microrl/curriculum.hpp"
#include "microrl/linear_q.hpp"
#include "microrl/psmagds.hpp"
#include "microrl/reward.hpp"
#include "microrl/training_run.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace microrl;
using testing_support::at;
using testing_support::placed;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("epsilon schedule") {
    CHECK(epsilon_at(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(epsilon_at(3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(epsilon_at(99) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(epsilon_at(8, 0.9) == doctest::Approx(0.3));
    CHECK_THROWS_AS(epsilon_at(-1), DomainError);
}

TEST_CASE("greedy selection and ties") {
    LinearQ<double> q(3, 9);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
    Rng rng(1);
    CHECK(select_action(q, x, 0.0, rng) == 0);
    q.weights()(6, 0) = 2.0;
    q.weights()(2, 1) = 1.5;
    for (int i = 0; i < 20; ++i) CHECK(select_action(q, x, 0.0, rng) == 6);
}

TEST_CASE("epsilon one draws actions uniformly") {
    LinearQ<double> q(1, 9);
    q.weights()(4, 0) = 10.0;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    Rng rng(42);
    std::array<int, 9> counts{};
    const int n = 90000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(select_action(q, x, 1.0, rng))];
    const double p = 1.0 / 9.0, sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - n * p) < 3 * sigma);
}

TEST_CASE("hitpoint ratio") {
    CHECK(hitpoint_ratio_rho(reset(scenarios::goliaths_vs_zealots(), 1)) == doctest::Approx(2.56).epsilon(1e-15));
    CHECK(hitpoint_ratio_rho(reset(scenarios::goliaths_vs_zerglings(), 1)) ==
          doctest::Approx(700.0 / 375.0).epsilon(1e-15));
    const auto mirror = placed({at(unit_classes::marine(), 10, 10)}, {at(unit_classes::marine(), 50, 50)});
    CHECK(hitpoint_ratio_rho(reset(mirror, 1)) == 1.0);
    auto s = reset(mirror, 1);
    s.units[0].hitpoint = 0;
    CHECK_THROWS_AS(hitpoint_ratio_rho(s), DomainError);
}

TEST_CASE("shaped reward arithmetic") {
    const RewardConfig cfg;
    Unit g;
    g.unit_class = unit_classes::goliath();
    UnitOutcome o;
    CHECK(shaped_reward(o, g, 2.56, cfg) == 0.0);

    o.died_this_tick = true;
    CHECK(shaped_reward(o, g, 2.56, cfg) == -10.0);

    // 11 dealt, 16 lost, rho 2.56: (11 - 40.96) / 10 = -2.996
    o = {};
    o.damage_amount = 11;
    o.hitpoint_lost = 16;
    CHECK(shaped_reward(o, g, 2.56, cfg) == doctest::Approx(-2.996).epsilon(1e-14));
    RewardConfig literal = cfg;
    literal.variant = RewardVariant::Literal;
    // (11 * 12 - 40.96) / 10 = 9.104
    CHECK(shaped_reward(o, g, 2.56, literal) == doctest::Approx(9.104).epsilon(1e-14));

    o = {};
    o.moved_toward_nobody = true;
    CHECK(shaped_reward(o, g, 1.0, cfg) == -0.5);
    CHECK_THROWS_AS(shaped_reward(o, g, 0.0, cfg), DomainError);
    RewardConfig bad;
    bad.divisor = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("penalties land once per event in a constructed episode") {
    // A lone Marine steps toward a Goliath, once away from everything, then holds until it dies.
    const auto spec = placed({at(unit_classes::marine(), 30, 32)}, {at(unit_classes::goliath(), 34, 32)});
    CombatEnvironment env(spec);
    env.reset(1);
    const RewardConfig cfg;
    int idle = 0, deaths = 0, ticks = 0;
    auto act = [&](CombatAction a) {
        const auto s = env.step(std::vector<AgentAction>{{0, action_index(a)}});
        const auto& o = *env.last_outcome().find(0);
        idle += o.moved_toward_nobody;
        deaths += o.died_this_tick;
        ++ticks;
        // The reward carries each penalty exactly when its event fired.
        const double base = (o.damage_amount - env.rho() * o.hitpoint_lost) / cfg.divisor;
        CHECK(s.agents[0].reward == doctest::Approx(base + (o.died_this_tick ? -10.0 : 0.0) +
                                                    (o.moved_toward_nobody ? -0.5 : 0.0)));
        return s;
    };
    act(CombatAction::Right);
    CHECK(idle == 0);
    auto s = act(CombatAction::Up);
    CHECK(idle == 1);
    while (!s.terminal) s = act(CombatAction::AttackWeakest);
    CHECK(idle == 1);
    CHECK(deaths == 1);
    CHECK(s.winner == Winner::Enemy);
}

TEST_CASE("trainer matches tabular Sarsa(lambda) on a chain") {
    TrainerConfig cfg;
    cfg.alpha = 0.1;
    cfg.gamma = 0.9;
    cfg.lambda = 0.8;
    cfg.epsilon0 = 0.5;
    cfg.episodes = 100;
    cfg.seed = 3;
    const auto oracle = chain::tabular_sarsa(cfg);

    chain::ChainEnv env;
    std::size_t k = 0;
    double worst = 0.0;
    TrainHooks<LinearQ<double>> hooks;
    hooks.on_update = [&](const UpdateInfo<LinearQ<double>>& u) {
        REQUIRE(k < oracle.size());
        for (Eigen::Index i = 0; i < u.q.params().size(); ++i)
            worst = std::max(worst, std::abs(u.q.params()[i] - oracle[k][static_cast<std::size_t>(i)]));
        ++k;
    };
    train(env, cfg, LinearQ<double>(chain::kStates, chain::kActions), hooks);
    CHECK(k == oracle.size());
    CHECK(worst <= 1e-10);
}

TEST_CASE("zero episodes leave the network alone") {
    TrainerConfig cfg;
    cfg.episodes = 0;
    CombatEnvironment env(scenarios::goliaths_vs_zealots());
    const auto init = init_q_network<double>(1);
    const auto r = train(env, cfg, init);
    CHECK(r.q == init);
    CHECK(r.stats.empty());
}

namespace {

// One feature, one step, reward 1, then terminal.
struct OneShotEnv {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    bool done = false;
    void reset(std::uint64_t) { done = false; }
    std::vector<int> agents() const { return done ? std::vector<int>{} : std::vector<int>{0}; }
    const Eigen::VectorXd& observation(int) const { return x; }
    EnvStep step(const std::vector<AgentAction>&) {
        done = true;
        EnvStep s;
        s.agents.push_back({0, 1.0, true});
        s.terminal = true;
        s.winner = Winner::Own;
        return s;
    }
};

}  // namespace

TEST_CASE("traces start at zero and terminal steps do not bootstrap") {
    TrainerConfig cfg;
    cfg.episodes = 4;
    cfg.alpha = 0.1;
    cfg.epsilon0 = 0.0;
    OneShotEnv env;
    LinearQ<double> q(1, 2);
    q.params() << 0.7, 0.2;
    int starts = 0, updates = 0;
    double expected_q = 0.7;
    TrainHooks<LinearQ<double>> hooks;
    hooks.on_episode_start = [&](int, const Eigen::VectorXd& trace) {
        CHECK(trace.isZero());
        ++starts;
    };
    hooks.on_update = [&](const UpdateInfo<LinearQ<double>>& u) {
        CHECK(u.delta == doctest::Approx(1.0 - expected_q).epsilon(1e-15));
        expected_q += 0.1 * (1.0 - expected_q);
        CHECK(u.q.params()[0] == doctest::Approx(expected_q).epsilon(1e-15));
        ++updates;
    };
    train(env, cfg, q, hooks);
    CHECK(starts == 4);
    CHECK(updates == 4);
}

TEST_CASE("trace decays by gamma lambda under zero gradients") {
    LinearQ<double> q(4, 3);
    Eigen::VectorXd trace = Eigen::VectorXd::LinSpaced(12, -1.0, 2.0);
    const double before = trace.norm();
    q.accumulate_gradient(Eigen::VectorXd::Zero(4), 1, 0.72, trace);
    CHECK(trace.norm() == doctest::Approx(0.72 * before).epsilon(1e-14));
}

TEST_CASE("non-finite updates abort with episode and tick") {
    TrainerConfig cfg;
    cfg.episodes = 1;
    cfg.alpha = 1e308;
    chain::ChainEnv env;
    LinearQ<double> q(chain::kStates, chain::kActions);
    q.params().setConstant(1e308);
    CHECK_THROWS_AS(train(env, cfg, q), NumericDivergence);
}

TEST_CASE("trainer config validation") {
    TrainerConfig cfg;
    cfg.gamma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.episodes = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    CHECK(cfg.gamma == 0.9);
    CHECK(cfg.alpha == 0.001);
    CHECK(cfg.lambda == 0.8);
    CHECK(cfg.epsilon0 == 0.5);
    CHECK(cfg.max_episode_steps == 1000);
}

TEST_CASE("same seed gives byte-identical metrics") {
    TrainerConfig cfg;
    cfg.episodes = 6;
    cfg.seed = 9;
    const auto spec = scenarios::goliaths_vs_zealots();
    RunOptions a, b;
    a.out_dir = testing_support::scratch_dir("det_a");
    b.out_dir = testing_support::scratch_dir("det_b");
    const auto ra = run_training(spec, cfg, initial_network(cfg.seed), a);
    const auto rb = run_training(spec, cfg, initial_network(cfg.seed), b);
    CHECK(slurp(a.out_dir / "metrics.csv") == slurp(b.out_dir / "metrics.csv"));
    const auto text = slurp(a.out_dir / "metrics.csv");
    CHECK(text.find("episode,steps,summed_reward,avg_reward_per_step,winner,epsilon\n") == 0);
    CHECK(ra.net == rb.net);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("resuming reproduces the uninterrupted run") {
    TrainerConfig cfg;
    cfg.episodes = 8;
    cfg.seed = 4;
    const auto spec = scenarios::goliaths_vs_zealots();
    RunOptions full;
    full.out_dir = testing_support::scratch_dir("resume_full");
    full.checkpoint_every = 3;
    const auto whole = run_training(spec, cfg, initial_network(cfg.seed), full);

    // Interrupted after 5 episodes: the newest checkpoint is episode 3, and metrics hold 5 rows.
    RunOptions part = full;
    part.out_dir = testing_support::scratch_dir("resume_part");
    TrainerConfig short_cfg = cfg;
    short_cfg.episodes = 5;
    run_training(spec, short_cfg, initial_network(cfg.seed), part);
    std::filesystem::remove(part.out_dir / checkpoint_filename(5));

    CHECK_THROWS_AS(run_training(spec, cfg, initial_network(cfg.seed), part), ConfigError);
    part.resume = true;
    const auto resumed = run_training(spec, cfg, initial_network(cfg.seed), part);
    CHECK(resumed.first_episode == 3);
    CHECK(resumed.net == whole.net);
    CHECK(slurp(part.out_dir / "metrics.csv") == slurp(full.out_dir / "metrics.csv"));
}

TEST_CASE("trainer config json round trip") {
    TrainerConfig cfg;
    cfg.alpha = 0.003;
    cfg.seed = 77;
    cfg.reward.variant = RewardVariant::Literal;
    const auto back = trainer_config_from_json(to_json(cfg));
    CHECK(back.alpha == 0.003);
    CHECK(back.seed == 77);
    CHECK(back.reward.variant == RewardVariant::Literal);
    CHECK_THROWS_AS(trainer_config_from_json(nlohmann::json{{"alpah", 1}}), ConfigError);
    CHECK_THROWS_AS(trainer_config_from_json(nlohmann::json{{"alpha", "x"}}), ConfigError);
}
