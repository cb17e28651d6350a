#include "microrl/evaluation.hpp"

#include "microrl/combat_env.hpp"
#include "microrl/checkpoint.hpp"
#include "microrl/errors.hpp"
#include "microrl/format.hpp"
#include "microrl/random.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <regex>
#include <sstream>

namespace microrl {

void check_combat_interface(const QNetworkd& net) {
    if (net.inputs() != kObservationSize || net.outputs() != kNumActions)
        throw ShapeError("network maps " + std::to_string(net.inputs()) + " inputs to " +
                         std::to_string(net.outputs()) + " outputs; combat needs " +
                         std::to_string(kObservationSize) + " -> " + std::to_string(kNumActions));
}

int greedy_combat_action(const QNetworkd& net, const Eigen::VectorXd& observation) {
    return greedy_action(net.forward(observation));
}

namespace {

struct EpisodeResult {
    Winner winner = Winner::None;
    int steps = 0;
    double total_reward = 0.0;
};

EpisodeResult play_episode(const EvalPolicy& policy, CombatEnvironment& env, std::uint64_t seed,
                           std::vector<std::vector<int>>* action_trace = nullptr) {
    env.reset(seed);
    EpisodeResult r;
    std::vector<AgentAction> actions;
    while (true) {
        EnvStep s;
        if (const auto* net = std::get_if<QNetworkd>(&policy)) {
            actions.clear();
            for (int a : env.agents()) actions.push_back({a, greedy_combat_action(*net, env.observation(a))});
            if (action_trace) {
                auto& row = action_trace->emplace_back();
                for (const auto& a : actions) row.push_back(a.action);
            }
            s = env.step(actions);
        } else {
            const ScriptedPolicy script = std::get<ScriptedPolicy>(policy);
            s = env.step(scripted_actions(env.state(), Side::Own, script), script);
        }
        ++r.steps;
        for (const auto& fb : s.agents) r.total_reward += fb.reward;
        if (s.terminal) {
            r.winner = s.winner;
            return r;
        }
    }
}

}  // namespace

EvalReport evaluate(const EvalPolicy& policy, const ScenarioSpec& spec, int episodes, std::uint64_t seed,
                    const RewardConfig& reward, ReplayWriter* first_episode_replay) {
    if (episodes < 1) throw ConfigError("evaluate: episodes must be >= 1");
    if (const auto* net = std::get_if<QNetworkd>(&policy)) check_combat_interface(*net);

    CombatEnvironment env(spec, reward);
    EvalReport report;
    report.scenario = spec.id;
    report.episodes = episodes;
    report.seed = seed;

    double sum_steps = 0.0, sum_sq_steps = 0.0, sum_avg_reward = 0.0;
    for (int i = 0; i < episodes; ++i) {
        env.set_replay(i == 0 ? first_episode_replay : nullptr);
        const EpisodeResult r = play_episode(policy, env, derive_seed(seed, "eval", static_cast<std::uint64_t>(i)));
        if (r.winner == Winner::Own) ++report.wins;
        sum_steps += r.steps;
        sum_sq_steps += static_cast<double>(r.steps) * r.steps;
        sum_avg_reward += r.total_reward / r.steps;
    }
    env.set_replay(nullptr);

    report.win_rate = static_cast<double>(report.wins) / episodes;
    report.mean_steps = sum_steps / episodes;
    report.std_steps = std::sqrt(std::max(0.0, sum_sq_steps / episodes - report.mean_steps * report.mean_steps));
    report.mean_avg_reward = sum_avg_reward / episodes;
    return report;
}

std::vector<EvalReport> evaluate_repeated(const EvalPolicy& policy, const ScenarioSpec& spec, int episodes,
                                          int repeats, std::uint64_t seed, const RewardConfig& reward) {
    if (repeats < 1) throw ConfigError("evaluate_repeated: repeats must be >= 1");
    std::vector<EvalReport> out;
    for (int r = 0; r < repeats; ++r)
        out.push_back(evaluate(policy, spec, episodes, derive_seed(seed, "repeat", static_cast<std::uint64_t>(r)), reward));
    return out;
}

std::vector<std::vector<int>> greedy_action_trace(const QNetworkd& net, const ScenarioSpec& spec, std::uint64_t seed) {
    check_combat_interface(net);
    CombatEnvironment env(spec);
    std::vector<std::vector<int>> trace;
    play_episode(EvalPolicy{net}, env, seed, &trace);
    return trace;
}

std::string checkpoint_filename(int episode) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ckpt_e%06d.txt", episode);
    return buf;
}

std::optional<int> checkpoint_episode(const std::filesystem::path& file) {
    static const std::regex pattern(R"(^ckpt_e(\d+)\.txt$)");
    std::smatch m;
    const std::string name = file.filename().string();
    if (!std::regex_match(name, m, pattern)) return std::nullopt;
    return std::stoi(m[1].str());
}

std::vector<CurveRow> training_curve(const std::filesystem::path& dir, const ScenarioSpec& spec, int every,
                                     int episodes_per_point, std::uint64_t seed, const RewardConfig& reward) {
    if (every < 1) throw ConfigError("training_curve: every must be >= 1");
    std::map<int, std::filesystem::path> found;
    if (std::filesystem::is_directory(dir))
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (auto ep = checkpoint_episode(entry.path())) found[*ep] = entry.path();
    if (found.empty()) throw CheckpointError("no checkpoints found in " + dir.string());

    const int first = found.begin()->first;
    const int last = found.rbegin()->first;
    std::vector<int> points;
    for (int ep = first; ep <= last; ep += every) points.push_back(ep);
    if (points.back() != last) points.push_back(last);

    std::vector<CurveRow> rows;
    for (int ep : points) {
        CurveRow row;
        row.episode = ep;
        if (auto it = found.find(ep); it != found.end()) {
            const QNetworkd net = load_checkpoint(it->second);
            check_combat_interface(net);
            row.present = true;
            row.report = evaluate(EvalPolicy{net}, spec, episodes_per_point, seed, reward);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string eval_csv_header() { return "scenario,episodes,wins,win_rate,mean_steps,std_steps,mean_avg_reward,seed"; }

std::string eval_csv_row(const EvalReport& r) {
    std::ostringstream os;
    os << r.scenario << ',' << r.episodes << ',' << r.wins << ',' << format_number(r.win_rate) << ','
       << format_number(r.mean_steps) << ',' << format_number(r.std_steps) << ','
       << format_number(r.mean_avg_reward) << ',' << r.seed;
    return os.str();
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
    std::ostringstream os;
    os << "episode,present,win_rate,mean_steps,mean_avg_reward\n";
    for (const auto& row : rows) {
        os << row.episode << ',' << (row.present ? 1 : 0) << ',';
        if (row.present)
            os << format_number(row.report.win_rate) << ',' << format_number(row.report.mean_steps) << ','
               << format_number(row.report.mean_avg_reward);
        else
            os << ",,";
        os << '\n';
    }
    return os.str();
}

}  // namespace microrl
