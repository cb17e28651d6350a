#pragma once

#include "microrl/q_network.hpp"
#include "microrl/replay.hpp"
#include "microrl/reward.hpp"
#include "microrl/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace microrl {

/// Own-side controller under evaluation: a frozen network played greedily, or a script.
using EvalPolicy = std::variant<QNetworkd, ScriptedPolicy>;

struct EvalReport {
    std::string scenario;
    int episodes = 0;
    int wins = 0;
    double win_rate = 0.0;  // wins / episodes; timeouts count as losses
    double mean_steps = 0.0;
    double std_steps = 0.0;
    double mean_avg_reward = 0.0;  // mean over episodes of summed shaped reward / steps
    std::uint64_t seed = 0;        // episode i runs on derive_seed(seed, "eval", i)
};

/// Throws ShapeError unless the network maps 93 inputs to 9 action values.
void check_combat_interface(const QNetworkd& net);

/// Greedy action of every living own unit given their current encodings.
int greedy_combat_action(const QNetworkd& net, const Eigen::VectorXd& observation);

EvalReport evaluate(const EvalPolicy& policy, const ScenarioSpec& spec, int episodes, std::uint64_t seed,
                    const RewardConfig& reward = {}, ReplayWriter* first_episode_replay = nullptr);

/// `repeats` independent evaluations on derived seed sets.
std::vector<EvalReport> evaluate_repeated(const EvalPolicy& policy, const ScenarioSpec& spec, int episodes,
                                          int repeats, std::uint64_t seed, const RewardConfig& reward = {});

/// Greedy per-tick own actions of one evaluation episode (for determinism checks).
std::vector<std::vector<int>> greedy_action_trace(const QNetworkd& net, const ScenarioSpec& spec, std::uint64_t seed);

std::string checkpoint_filename(int episode);
std::optional<int> checkpoint_episode(const std::filesystem::path& file);

struct CurveRow {
    int episode = 0;
    bool present = false;  // false: checkpoint missing, row is a gap
    EvalReport report;
};

/// Evaluates the periodic checkpoints found in `dir` on the `every` grid between the first
/// and last checkpoint found; grid points without a checkpoint become gap rows.
std::vector<CurveRow> training_curve(const std::filesystem::path& dir, const ScenarioSpec& spec, int every,
                                     int episodes_per_point, std::uint64_t seed, const RewardConfig& reward = {});

std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& r);
std::string curve_csv(const std::vector<CurveRow>& rows);

}  // namespace microrl
