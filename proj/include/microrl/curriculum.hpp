#pragma once

#include "microrl/evaluation.hpp"
#include "microrl/psmagds.hpp"
#include "microrl/q_network.hpp"
#include "microrl/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace microrl {

struct CurriculumStage {
    ScenarioSpec scenario;
    int episodes = 0;
};

/// Ordered training stages whose final network is judged on `target`.
struct CurriculumPlan {
    std::string id;
    std::vector<CurriculumStage> stages;
    ScenarioSpec target;

    void validate() const;
};

/// `total` split into `parts` near-equal budgets; earlier parts take the remainder.
std::vector<int> split_budget(int total, int parts);

// Plan files are JSON:
//
//   {"id": "m10_vs_zl13", "target": "m10_vs_zl13", "episodes": 3000,
//    "stages": [{"scenario": "m5_vs_zl6"}, {"scenario": "m8_vs_zl10", "episodes": 500}, ...]}
//
// Scenario references are bundled names or scenario files relative to the plan file.
// A stage without "episodes" takes an equal share of the plan total. `total_override`
// replaces the total and splits it equally across all stages.
CurriculumPlan plan_from_json(const nlohmann::json& j, const std::string& source,
                              const std::filesystem::path& base_dir = {},
                              std::optional<int> total_override = std::nullopt);
nlohmann::json to_json(const CurriculumPlan& plan);
CurriculumPlan load_plan(const std::filesystem::path& path, std::optional<int> total_override = std::nullopt);

/// Bundled plans: "m10_vs_zl13" and "m20_vs_zl30".
CurriculumPlan bundled_plan(const std::string& name, std::optional<int> total_override = std::nullopt);
std::vector<std::string> bundled_plan_names();

/// A bundled plan name or a plan file path.
CurriculumPlan resolve_plan(const std::string& ref, std::optional<int> total_override = std::nullopt);

struct StageRecord {
    int index = 0;
    std::string scenario;
    int episodes = 0;
    std::uint64_t seed = 0;
    std::string start_checkpoint;  // empty for a fresh initialisation
    std::string end_checkpoint;
    std::string metrics_csv;
    double wall_seconds = 0.0;
    std::uint64_t start_hash = 0;  // parameter_hash of the initial network
    std::uint64_t end_hash = 0;
    bool complete = false;
};

struct RunManifest {
    std::string plan_id;
    std::uint64_t seed = 0;
    std::vector<StageRecord> stages;
    std::string target;
    std::optional<EvalReport> target_eval;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j, const std::string& source = "<json>");
};

struct CurriculumOptions {
    std::filesystem::path out_dir;
    int checkpoint_every = 200;
    int eval_episodes = 100;
    std::uint64_t eval_seed = 7;
    /// Skip completed stages and continue a partial one from its checkpoints.
    bool resume = false;
};

/// Trains the stages in order, each starting from the previous stage's final checkpoint
/// file, then evaluates the last network greedily on the target. Writes manifest.json
/// and one sub-directory per stage under opts.out_dir. Epsilon restarts at every stage.
RunManifest run_curriculum(const CurriculumPlan& plan, const TrainerConfig& cfg, const CurriculumOptions& opts);

struct ArmResult {
    std::optional<int> episodes_to_threshold;  // first evaluation at or above threshold
    double final_win_rate = 0.0;
    std::vector<std::pair<int, double>> curve;  // (episodes trained, win rate)
};

struct ComparisonRow {
    std::uint64_t seed = 0;
    ArmResult scratch;
    ArmResult transfer;
};

struct ComparisonReport {
    std::string scenario;
    double threshold = 0.8;
    int episodes = 0;
    std::vector<ComparisonRow> rows;

    /// Median episodes-to-threshold; runs that never get there count as infinitely late
    /// and a median landing on them is nullopt.
    std::optional<double> median_scratch() const;
    std::optional<double> median_transfer() const;
    /// True when the transfer median is strictly earlier than the scratch median.
    bool transfer_faster() const;
};

struct CompareOptions {
    int eval_every = 200;
    int eval_episodes = 100;
    std::uint64_t eval_seed = 7;
    double threshold = 0.8;
};

/// For every seed, trains a fresh network and a copy of `source` on `spec` with the same
/// budget and seed, evaluating both every opts.eval_every episodes.
ComparisonReport compare_scratch_vs_transfer(const ScenarioSpec& spec, const QNetworkd& source,
                                             const TrainerConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                             const CompareOptions& opts = {});

std::string comparison_csv(const ComparisonReport& report);

/// Median with nullopt treated as +infinity; nullopt when the median is infinite.
std::optional<double> censored_median(std::vector<std::optional<int>> values);

/// Frozen greedy evaluation of one network on each scenario.
std::vector<EvalReport> evaluate_generalization(const QNetworkd& net, const std::vector<ScenarioSpec>& scenarios,
                                                int episodes_per, std::uint64_t seed);

/// Fresh network for a run seeded with `seed`.
QNetworkd initial_network(std::uint64_t seed);

}  // namespace microrl
