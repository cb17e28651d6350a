#include "microrl/checkpoint.hpp"
#include "microrl/combat_env.hpp"
#include "microrl/curriculum.hpp"
#include "microrl/errors.hpp"
#include "microrl/evaluation.hpp"
#include "microrl/format.hpp"
#include "microrl/random.hpp"
#include "microrl/scenario_io.hpp"
#include "microrl/training_run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace microrl;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kTransfer = 4, kCheckpoint = 5 };

// Flags shared by the training commands; unset ones leave the config untouched.
struct TrainerFlags {
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, gamma, lambda, epsilon0;
    std::optional<int> frame_skip;
    std::optional<std::string> opponent, reward_variant;

    void add_to(CLI::App* cmd, bool with_episodes = true) {
        if (with_episodes) cmd->add_option("--episodes", episodes, "Training episodes");
        cmd->add_option("--seed", seed, "Master seed; every random stream derives from it");
        cmd->add_option("--alpha", alpha, "Learning rate");
        cmd->add_option("--gamma", gamma, "Discount factor");
        cmd->add_option("--lambda", lambda, "Trace decay");
        cmd->add_option("--epsilon0", epsilon0, "Initial exploration rate");
        cmd->add_option("--frame-skip", frame_skip, "Simulation frames per decision");
        cmd->add_option("--opponent", opponent, "Enemy script")->check(CLI::IsMember({"weakest", "closest"}));
        cmd->add_option("--reward-variant", reward_variant, "Damage term")->check(CLI::IsMember({"folded", "literal"}));
    }

    void apply(TrainerConfig& cfg) const {
        if (episodes) cfg.episodes = *episodes;
        if (seed) cfg.seed = *seed;
        if (alpha) cfg.alpha = *alpha;
        if (gamma) cfg.gamma = *gamma;
        if (lambda) cfg.lambda = *lambda;
        if (epsilon0) cfg.epsilon0 = *epsilon0;
        if (reward_variant) cfg.reward.variant = parse_reward_variant(*reward_variant);
    }

    void apply(ScenarioSpec& spec) const {
        if (frame_skip) spec.frame_skip = *frame_skip;
        if (opponent) spec.enemy_controller = parse_scripted_policy(*opponent);
        validate(spec);
    }
};

fs::path output_root() {
    const char* env = std::getenv("MICRORL_OUT");
    return env && *env ? fs::path(env) : fs::path("runs");
}

fs::path out_dir_for(const std::string& out, const std::string& kind, const std::string& name, std::uint64_t seed) {
    if (!out.empty()) return out;
    return output_root() / (kind + "-" + name + "-s" + std::to_string(seed));
}

void write_file(const fs::path& path, const std::string& text) { write_text_atomic(path, text); }

std::string eval_table(const std::vector<EvalReport>& reports) {
    std::string s = eval_csv_header() + "\n";
    for (const auto& r : reports) s += eval_csv_row(r) + "\n";
    return s;
}

json report_json(const EvalReport& r) {
    return {{"scenario", r.scenario}, {"episodes", r.episodes},     {"wins", r.wins},
            {"win_rate", r.win_rate}, {"mean_steps", r.mean_steps}, {"std_steps", r.std_steps},
            {"mean_avg_reward", r.mean_avg_reward}, {"seed", r.seed}};
}

EvalPolicy policy_from(const std::string& checkpoint, const std::string& script) {
    if (!checkpoint.empty() && !script.empty()) throw ConfigError("give either --checkpoint or --policy, not both");
    if (!script.empty()) return parse_scripted_policy(script);
    if (checkpoint.empty()) throw ConfigError("--checkpoint or --policy is required");
    auto net = load_checkpoint(checkpoint);
    check_combat_interface(net);
    return net;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared-parameter Sarsa(lambda) micromanagement trainer"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one network on one scenario");
    std::string scenario = "g3_vs_z6", out, config_file, init_ckpt;
    int checkpoint_every = 200;
    bool resume = false;
    TrainerFlags tflags;
    train_cmd->add_option("--scenario", scenario, "Bundled scenario name or scenario JSON file");
    train_cmd->add_option("--config", config_file, "Run snapshot (config.json) to start from; flags override it");
    train_cmd->add_option("--init", init_ckpt, "Warm-start from this checkpoint");
    train_cmd->add_option("--out", out, "Output directory");
    train_cmd->add_option("--checkpoint-every", checkpoint_every, "Checkpoint interval in episodes");
    train_cmd->add_flag("--resume", resume, "Continue from the newest checkpoint in --out");
    tflags.add_to(train_cmd);

    // curriculum
    auto* curr_cmd = app.add_subcommand("curriculum", "Run a staged curriculum and evaluate on its target");
    std::string plan_ref;
    int eval_episodes = 100;
    curr_cmd->add_option("--plan", plan_ref, "Bundled plan name or plan JSON file")->required();
    curr_cmd->add_option("--out", out, "Output directory");
    curr_cmd->add_option("--checkpoint-every", checkpoint_every, "Checkpoint interval in episodes");
    curr_cmd->add_option("--eval-episodes", eval_episodes, "Target evaluation episodes");
    curr_cmd->add_flag("--resume", resume, "Skip finished stages and continue the interrupted one");
    tflags.add_to(curr_cmd, false);
    std::optional<int> plan_total;
    curr_cmd->add_option("--episodes", plan_total, "Total budget, split equally over the stages");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint or a script");
    std::string checkpoint, script, curve_dir, replay_file;
    int episodes = 100, repeats = 1, every = 200;
    std::uint64_t eval_seed = 7;
    std::optional<int> eval_frame_skip;
    std::optional<std::string> eval_opponent;
    eval_cmd->add_option("--scenario", scenario, "Bundled scenario name or scenario JSON file");
    eval_cmd->add_option("--checkpoint", checkpoint, "Network checkpoint to play greedily");
    eval_cmd->add_option("--policy", script, "Scripted own side instead of a network")
        ->check(CLI::IsMember({"weakest", "closest"}));
    eval_cmd->add_option("--curve", curve_dir, "Evaluate every periodic checkpoint in this directory");
    eval_cmd->add_option("--every", every, "Curve sampling interval in episodes");
    eval_cmd->add_option("--episodes", episodes, "Evaluation episodes");
    eval_cmd->add_option("--repeats", repeats, "Independent evaluation seed sets");
    eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
    eval_cmd->add_option("--out", out, "Also write eval.csv and eval.json (or curve.csv) here");
    eval_cmd->add_option("--replay", replay_file, "Write the first episode's replay trace here");
    eval_cmd->add_option("--frame-skip", eval_frame_skip, "Simulation frames per decision");
    eval_cmd->add_option("--opponent", eval_opponent, "Enemy script")->check(CLI::IsMember({"weakest", "closest"}));

    // replay-dump
    auto* dump_cmd = app.add_subcommand("replay-dump", "Play one greedy episode and print its trace as JSON lines");
    bool encodings = false;
    dump_cmd->add_option("--scenario", scenario, "Bundled scenario name or scenario JSON file");
    dump_cmd->add_option("--checkpoint", checkpoint, "Network checkpoint to play greedily");
    dump_cmd->add_option("--policy", script, "Scripted own side instead of a network")
        ->check(CLI::IsMember({"weakest", "closest"}));
    dump_cmd->add_option("--seed", eval_seed, "Episode seed");
    dump_cmd->add_option("--out", out, "Output file (default stdout)");
    dump_cmd->add_flag("--encodings", encodings, "Dump every agent's encoded observation instead of the trace");

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "Scratch vs warm-started training on one scenario");
    std::string source_ckpt;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int eval_every = 200;
    double threshold = 0.8;
    cmp_cmd->add_option("--scenario", scenario, "Bundled scenario name or scenario JSON file")->required();
    cmp_cmd->add_option("--source", source_ckpt, "Checkpoint the transfer arm starts from")->required();
    cmp_cmd->add_option("--seeds", seeds, "Paired seeds")->delimiter(',');
    cmp_cmd->add_option("--eval-every", eval_every, "Evaluation interval in episodes");
    cmp_cmd->add_option("--eval-episodes", eval_episodes, "Episodes per evaluation");
    cmp_cmd->add_option("--threshold", threshold, "Win-rate threshold");
    cmp_cmd->add_option("--out", out, "Write comparison.csv here");
    tflags.add_to(cmp_cmd);

    // list
    auto* list_cmd = app.add_subcommand("list", "Print bundled scenario and plan names");

    // show
    auto* show_cmd = app.add_subcommand("show", "Print a scenario or plan as resolved JSON");
    std::string show_scenario, show_plan;
    auto* show_s = show_cmd->add_option("--scenario", show_scenario, "Bundled scenario name or scenario JSON file");
    auto* show_p = show_cmd->add_option("--plan", show_plan, "Bundled plan name or plan JSON file");
    show_s->excludes(show_p);
    show_cmd->require_option(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*train_cmd) {
            ScenarioSpec spec;
            TrainerConfig cfg;
            if (!config_file.empty()) {
                const auto snap = read_json_file(config_file);
                if (!snap.is_object() || !snap.contains("scenario") || !snap.contains("trainer"))
                    throw ConfigError(config_file + ": expected {\"scenario\", \"trainer\"}");
                spec = scenario_from_json(snap["scenario"], config_file + ".scenario");
                cfg = trainer_config_from_json(snap["trainer"], cfg, config_file + ".trainer");
            }
            if (config_file.empty() || train_cmd->count("--scenario")) spec = resolve_scenario(scenario);
            tflags.apply(cfg);
            tflags.apply(spec);
            cfg.validate();

            QNetworkd init = init_ckpt.empty() ? initial_network(cfg.seed) : load_checkpoint(init_ckpt);
            RunOptions opts;
            opts.out_dir = out_dir_for(out, "train", spec.id, cfg.seed);
            opts.checkpoint_every = checkpoint_every;
            opts.resume = resume;
            opts.on_episode_end = [&](const EpisodeStats& s, const QNetworkd&) {
                if ((s.episode + 1) % 100 == 0 || s.episode + 1 == cfg.episodes)
                    std::cerr << "episode " << s.episode + 1 << "/" << cfg.episodes << " steps " << s.steps
                              << " winner " << to_string(s.winner) << '\n';
            };
            const auto result = run_training(spec, cfg, std::move(init), opts);
            std::cout << "wrote " << opts.out_dir.string() << " (" << result.stats.size() << " episodes this run, "
                      << result.checkpoints.size() << " checkpoints)\n";
            return kOk;
        }

        if (*curr_cmd) {
            const auto plan = resolve_plan(plan_ref, plan_total);
            TrainerConfig cfg;
            tflags.apply(cfg);
            CurriculumPlan run_plan = plan;
            for (auto& st : run_plan.stages) tflags.apply(st.scenario);
            tflags.apply(run_plan.target);
            CurriculumOptions opts;
            opts.out_dir = out_dir_for(out, "curriculum", plan.id, cfg.seed);
            opts.checkpoint_every = checkpoint_every;
            opts.eval_episodes = eval_episodes;
            opts.resume = resume;
            const auto manifest = run_curriculum(run_plan, cfg, opts);
            for (const auto& st : manifest.stages)
                std::cout << "stage " << st.index << " " << st.scenario << " " << st.episodes << " episodes -> "
                          << st.end_checkpoint << '\n';
            write_file(opts.out_dir / "target_eval.csv", eval_table({*manifest.target_eval}));
            std::cout << eval_table({*manifest.target_eval});
            return kOk;
        }

        if (*eval_cmd) {
            auto spec = resolve_scenario(scenario);
            if (eval_frame_skip) spec.frame_skip = *eval_frame_skip;
            if (eval_opponent) spec.enemy_controller = parse_scripted_policy(*eval_opponent);
            validate(spec);
            if (episodes < 1 || repeats < 1) throw ConfigError("--episodes and --repeats must be >= 1");
            if (!curve_dir.empty()) {
                const auto rows = training_curve(curve_dir, spec, every, episodes, eval_seed);
                const auto text = curve_csv(rows);
                std::cout << text;
                if (!out.empty()) write_file(fs::path(out) / "curve.csv", text);
                return kOk;
            }
            const auto policy = policy_from(checkpoint, script);
            std::vector<EvalReport> reports;
            if (!replay_file.empty()) {
                std::ofstream replay(replay_file);
                if (!replay) throw ConfigError("cannot write " + replay_file);
                ReplayWriter writer(replay);
                reports.push_back(evaluate(policy, spec, episodes, eval_seed, {}, &writer));
                if (repeats > 1) reports = evaluate_repeated(policy, spec, episodes, repeats, eval_seed);
            } else if (repeats > 1) {
                reports = evaluate_repeated(policy, spec, episodes, repeats, eval_seed);
            } else {
                reports.push_back(evaluate(policy, spec, episodes, eval_seed));
            }
            const auto table = eval_table(reports);
            std::cout << table;
            double mean = 0.0, var = 0.0;
            for (const auto& r : reports) mean += r.win_rate / reports.size();
            for (const auto& r : reports) var += (r.win_rate - mean) * (r.win_rate - mean) / reports.size();
            if (reports.size() > 1)
                std::cout << "# win_rate mean " << format_number(mean) << " std " << format_number(std::sqrt(var))
                          << '\n';
            if (!out.empty()) {
                json j = json::array();
                for (const auto& r : reports) j.push_back(report_json(r));
                write_file(fs::path(out) / "eval.csv", table);
                write_file(fs::path(out) / "eval.json", j.dump(2) + "\n");
            }
            return kOk;
        }

        if (*dump_cmd) {
            const auto spec = resolve_scenario(scenario);
            const auto policy = policy_from(checkpoint, script);
            std::ofstream file;
            if (!out.empty()) {
                file.open(out);
                if (!file) throw ConfigError("cannot write " + out);
            }
            std::ostream& os = out.empty() ? std::cout : file;
            ReplayWriter writer(os);
            CombatEnvironment env(spec);
            env.reset(derive_seed(eval_seed, "eval", 0));
            if (!encodings) env.set_replay(&writer);
            for (int tick = 0;; ++tick) {
                EnvStep s;
                if (const auto* net = std::get_if<QNetworkd>(&policy)) {
                    std::vector<AgentAction> actions;
                    for (int a : env.agents()) {
                        const auto& x = env.observation(a);
                        actions.push_back({a, greedy_combat_action(*net, x)});
                        if (encodings)
                            os << json{{"tick", tick},
                                       {"agent", a},
                                       {"action", actions.back().action},
                                       {"observation", std::vector<double>(x.data(), x.data() + x.size())}}
                                      .dump()
                               << '\n';
                    }
                    s = env.step(actions);
                } else {
                    if (encodings)
                        for (int a : env.agents()) {
                            const auto& x = env.observation(a);
                            os << json{{"tick", tick},
                                       {"agent", a},
                                       {"observation", std::vector<double>(x.data(), x.data() + x.size())}}
                                      .dump()
                               << '\n';
                        }
                    const auto p = std::get<ScriptedPolicy>(policy);
                    s = env.step(scripted_actions(env.state(), Side::Own, p), p);
                }
                if (s.terminal) {
                    std::cerr << "winner " << to_string(s.winner) << " after " << tick + 1 << " ticks\n";
                    break;
                }
            }
            return kOk;
        }

        if (*cmp_cmd) {
            auto spec = resolve_scenario(scenario);
            tflags.apply(spec);
            TrainerConfig cfg;
            cfg.episodes = 2000;
            tflags.apply(cfg);
            QNetworkd source = load_checkpoint(source_ckpt);
            CompareOptions opts;
            opts.eval_every = eval_every;
            opts.eval_episodes = eval_episodes;
            opts.threshold = threshold;
            const auto report = compare_scratch_vs_transfer(spec, source, cfg, seeds, opts);
            const auto text = comparison_csv(report);
            std::cout << text;
            auto show = [](const std::optional<double>& m) { return m ? format_number(*m) : std::string("never"); };
            std::cout << "# median episodes to " << format_number(threshold) << ": scratch "
                      << show(report.median_scratch()) << ", transfer " << show(report.median_transfer()) << '\n';
            if (!out.empty()) write_file(fs::path(out) / "comparison.csv", text);
            return kOk;
        }

        if (*show_cmd) {
            const json j = show_plan.empty() ? to_json(resolve_scenario(show_scenario)) : to_json(resolve_plan(show_plan));
            std::cout << j.dump(2) << '\n';
            return kOk;
        }

        if (*list_cmd) {
            std::cout << "scenarios:";
            for (const auto& n : scenarios::bundled_names()) std::cout << ' ' << n;
            std::cout << "\nplans:";
            for (const auto& n : bundled_plan_names()) std::cout << ' ' << n;
            std::cout << '\n';
            return kOk;
        }
    } catch (const TransferError& e) {
        std::cerr << "transfer error: " << e.what() << '\n';
        return kTransfer;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return kCheckpoint;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ShapeError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return kCheckpoint;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
