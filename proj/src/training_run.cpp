#include "microrl/training_run.hpp"

#include "microrl/checkpoint.hpp"
#include "microrl/combat_env.hpp"
#include "microrl/errors.hpp"
#include "microrl/evaluation.hpp"
#include "microrl/format.hpp"
#include "microrl/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace microrl {

std::string metrics_csv_header() { return "episode,steps,summed_reward,avg_reward_per_step,winner,epsilon"; }

std::string metrics_csv_row(const EpisodeStats& s) {
    std::ostringstream os;
    os << s.episode << ',' << s.steps << ',' << format_number(s.total_reward) << ','
       << format_number(s.avg_reward_per_step()) << ',' << to_string(s.winner) << ',' << format_number(s.epsilon);
    return os.str();
}

nlohmann::json to_json(const TrainerConfig& cfg) {
    return {{"gamma", cfg.gamma},
            {"alpha", cfg.alpha},
            {"lambda", cfg.lambda},
            {"epsilon0", cfg.epsilon0},
            {"episodes", cfg.episodes},
            {"max_episode_steps", cfg.max_episode_steps},
            {"seed", cfg.seed},
            {"reward",
             {{"divisor", cfg.reward.divisor},
              {"death_penalty", cfg.reward.death_penalty},
              {"idle_move_penalty", cfg.reward.idle_move_penalty},
              {"variant", to_string(cfg.reward.variant)}}}};
}

TrainerConfig trainer_config_from_json(const nlohmann::json& j, TrainerConfig base, const std::string& source) {
    auto keys = [&](const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
        if (!obj.is_object()) throw ConfigError(where + ": expected an object");
        for (const auto& [key, value] : obj.items())
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
                throw ConfigError(where + ": unknown key '" + key + "'");
    };
    auto read = [&](const nlohmann::json& obj, const char* key, auto& slot, const std::string& where) {
        if (!obj.contains(key)) return;
        try {
            slot = obj.at(key).get<std::decay_t<decltype(slot)>>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where + ": key '" + key + "' has the wrong type");
        }
    };
    keys(j, {"gamma", "alpha", "lambda", "epsilon0", "episodes", "max_episode_steps", "seed", "reward"}, source);
    read(j, "gamma", base.gamma, source);
    read(j, "alpha", base.alpha, source);
    read(j, "lambda", base.lambda, source);
    read(j, "epsilon0", base.epsilon0, source);
    read(j, "episodes", base.episodes, source);
    read(j, "max_episode_steps", base.max_episode_steps, source);
    read(j, "seed", base.seed, source);
    if (j.contains("reward")) {
        const auto& r = j["reward"];
        const std::string at = source + ".reward";
        keys(r, {"divisor", "death_penalty", "idle_move_penalty", "variant"}, at);
        read(r, "divisor", base.reward.divisor, at);
        read(r, "death_penalty", base.reward.death_penalty, at);
        read(r, "idle_move_penalty", base.reward.idle_move_penalty, at);
        if (r.contains("variant")) {
            std::string v;
            read(r, "variant", v, at);
            base.reward.variant = parse_reward_variant(v);
        }
    }
    return base;
}

std::optional<std::pair<int, std::filesystem::path>> latest_checkpoint(const std::filesystem::path& dir,
                                                                       int max_episode) {
    std::optional<std::pair<int, std::filesystem::path>> best;
    if (!std::filesystem::is_directory(dir)) return best;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ep = checkpoint_episode(entry.path());
        if (ep && *ep <= max_episode && (!best || *ep > best->first)) best = {*ep, entry.path()};
    }
    return best;
}

namespace {

// Keeps the header and the first `rows` data lines of an existing metrics file.
std::string truncated_metrics(const std::filesystem::path& path, int rows) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("resume: missing " + path.string());
    std::string line, kept;
    if (!std::getline(in, line) || line != metrics_csv_header())
        throw CheckpointError("resume: " + path.string() + " has an unexpected header");
    kept = line + '\n';
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw CheckpointError("resume: " + path.string() + " holds fewer than " + std::to_string(rows) + " rows");
        kept += line + '\n';
    }
    return kept;
}

}  // namespace

RunResult run_training(const ScenarioSpec& spec, const TrainerConfig& cfg, QNetworkd init, const RunOptions& opts) {
    cfg.validate();
    if (opts.checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
    check_combat_interface(init);

    const bool persist = !opts.out_dir.empty();
    const auto metrics_path = opts.out_dir / "metrics.csv";
    TrainerConfig run_cfg = cfg;
    run_cfg.first_episode = 0;

    if (persist) {
        std::filesystem::create_directories(opts.out_dir);
        const auto found = latest_checkpoint(opts.out_dir, cfg.episodes);
        const auto any = latest_checkpoint(opts.out_dir, std::numeric_limits<int>::max());
        if (any && !opts.resume)
            throw ConfigError(opts.out_dir.string() + " already holds checkpoints; resume or pick a fresh directory");
        if (any && !found)
            throw ConfigError(opts.out_dir.string() + " only holds checkpoints beyond episode " +
                              std::to_string(cfg.episodes));
        if (found) {
            init = load_checkpoint(found->second);
            check_combat_interface(init);
            run_cfg.first_episode = found->first;
            write_text_atomic(metrics_path, truncated_metrics(metrics_path, found->first));
        } else {
            write_text_atomic(metrics_path, metrics_csv_header() + "\n");
        }
        nlohmann::json config{{"scenario", to_json(spec)}, {"trainer", to_json(cfg)}};
        write_text_atomic(opts.out_dir / "config.json", config.dump(2) + "\n");
    }

    RunResult result{init, {}, run_cfg.first_episode, {}};
    std::ofstream metrics;
    if (persist) {
        metrics.open(metrics_path, std::ios::app | std::ios::binary);
        if (!metrics) throw ConfigError("cannot append to " + metrics_path.string());
    }

    TrainHooks<QNetworkd> hooks;
    hooks.on_episode_end = [&](const EpisodeStats& s, const QNetworkd& q) {
        if (persist) {
            metrics << metrics_csv_row(s) << '\n';
            metrics.flush();
            const int done = s.episode + 1;
            if (done % opts.checkpoint_every == 0 || done == cfg.episodes) {
                const auto path = opts.out_dir / checkpoint_filename(done);
                save_checkpoint(q, path);
                result.checkpoints.push_back(path);
            }
        }
        if (opts.on_episode_end) opts.on_episode_end(s, q);
    };

    CombatEnvironment env(spec, cfg.reward);
    auto trained = train(env, run_cfg, std::move(init), hooks);
    result.net = std::move(trained.q);
    result.stats = std::move(trained.stats);
    return result;
}

}  // namespace microrl
