#pragma once

#include "microrl/psmagds.hpp"
#include "microrl/q_network.hpp"
#include "microrl/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace microrl {

/// Where and how a training run persists its progress. An empty out_dir keeps
/// everything in memory.
struct RunOptions {
    std::filesystem::path out_dir;
    int checkpoint_every = 200;
    /// Continue from the newest checkpoint in out_dir, if any.
    bool resume = false;
    std::function<void(const EpisodeStats&, const QNetworkd&)> on_episode_end;
};

struct RunResult {
    QNetworkd net;
    std::vector<EpisodeStats> stats;  // episodes run in this call only
    int first_episode = 0;            // > 0 when resumed
    std::vector<std::filesystem::path> checkpoints;
};

/// metrics.csv: episode,steps,summed_reward,avg_reward_per_step,winner,epsilon
std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeStats& s);

nlohmann::json to_json(const TrainerConfig& cfg);
/// Fields missing from `j` keep their values in `base`; unknown keys are a ConfigError.
TrainerConfig trainer_config_from_json(const nlohmann::json& j, TrainerConfig base = {},
                                       const std::string& source = "<json>");

/// Trains `init` on `spec`, writing config.json, metrics.csv and ckpt_eNNNNNN.txt files
/// (episodes completed) into out_dir. A resumed run reproduces the uninterrupted run
/// exactly, metrics included.
RunResult run_training(const ScenarioSpec& spec, const TrainerConfig& cfg, QNetworkd init, const RunOptions& opts = {});

/// Newest checkpoint in `dir` not beyond `max_episode`, if any.
std::optional<std::pair<int, std::filesystem::path>> latest_checkpoint(const std::filesystem::path& dir,
                                                                       int max_episode);

}  // namespace microrl
