#include "microrl/curriculum.hpp"

#include "microrl/checkpoint.hpp"
#include "microrl/errors.hpp"
#include "microrl/format.hpp"
#include "microrl/random.hpp"
#include "microrl/scenario_io.hpp"
#include "microrl/training_run.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>
#include <sstream>

namespace microrl {

using nlohmann::json;

void CurriculumPlan::validate() const {
    if (stages.empty()) throw ConfigError("plan '" + id + "' has no stages");
    for (std::size_t i = 0; i < stages.size(); ++i)
        if (stages[i].episodes < 1)
            throw ConfigError("plan '" + id + "' stage " + std::to_string(i + 1) + " needs at least one episode");
}

std::vector<int> split_budget(int total, int parts) {
    if (parts < 1) throw ConfigError("cannot split a budget into " + std::to_string(parts) + " parts");
    if (total < parts) throw ConfigError("budget of " + std::to_string(total) + " episodes is too small for " +
                                         std::to_string(parts) + " stages");
    std::vector<int> out(parts, total / parts);
    for (int i = 0; i < total % parts; ++i) ++out[i];
    return out;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

int positive_int(const json& j, const char* key, const std::string& where) {
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 1)
        throw ConfigError(where + ": '" + key + "' must be a positive integer");
    return j.at(key).get<int>();
}

std::string scenario_ref(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_string()) throw ConfigError(where + ": '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

ScenarioSpec resolve_in(const std::string& ref, const std::filesystem::path& base_dir, const std::string& where) {
    try {
        return resolve_scenario(ref, base_dir);
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

constexpr int kDefaultPlanEpisodes = 3000;

}  // namespace

CurriculumPlan plan_from_json(const json& j, const std::string& source, const std::filesystem::path& base_dir,
                              std::optional<int> total_override) {
    check_keys(j, {"id", "target", "episodes", "stages"}, source);
    CurriculumPlan plan;
    plan.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : source;
    plan.target = resolve_in(scenario_ref(j, "target", source), base_dir, source + ".target");

    if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty())
        throw ConfigError(source + ": 'stages' must be a non-empty array");
    const auto& stages = j["stages"];
    const int n = static_cast<int>(stages.size());
    int total = j.contains("episodes") ? positive_int(j, "episodes", source) : kDefaultPlanEpisodes;
    if (total_override) total = *total_override;

    // Explicit stage budgets come out of the total first; the rest is shared equally.
    std::vector<std::optional<int>> fixed(n);
    int fixed_sum = 0;
    for (int i = 0; i < n; ++i) {
        const std::string at = source + ".stages[" + std::to_string(i) + "]";
        check_keys(stages[i], {"scenario", "episodes"}, at);
        if (stages[i].contains("episodes") && !total_override) {
            fixed[i] = positive_int(stages[i], "episodes", at);
            fixed_sum += *fixed[i];
        }
        plan.stages.push_back({resolve_in(scenario_ref(stages[i], "scenario", at), base_dir, at), 0});
    }
    const int open = static_cast<int>(std::count(fixed.begin(), fixed.end(), std::nullopt));
    std::vector<int> shares;
    if (open > 0) {
        try {
            shares = split_budget(total - fixed_sum, open);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ": " + e.what());
        }
    }
    for (int i = 0, k = 0; i < n; ++i) plan.stages[i].episodes = fixed[i] ? *fixed[i] : shares[k++];
    plan.validate();
    return plan;
}

json to_json(const CurriculumPlan& plan) {
    json j{{"id", plan.id}, {"target", to_json(plan.target)}, {"stages", json::array()}};
    for (const auto& s : plan.stages) j["stages"].push_back({{"scenario", to_json(s.scenario)}, {"episodes", s.episodes}});
    return j;
}

CurriculumPlan load_plan(const std::filesystem::path& path, std::optional<int> total_override) {
    return plan_from_json(read_json_file(path), path.string(), path.parent_path(), total_override);
}

CurriculumPlan bundled_plan(const std::string& name, std::optional<int> total_override) {
    std::vector<std::string> stages;
    if (name == "m10_vs_zl13")
        stages = {"m5_vs_zl6", "m8_vs_zl10", "m8_vs_zl12"};
    else if (name == "m20_vs_zl30")
        stages = {"m10_vs_zl12", "m15_vs_zl20", "m20_vs_zl25"};
    else
        throw ConfigError("unknown bundled plan '" + name + "'");
    json j{{"id", name}, {"target", name}, {"episodes", kDefaultPlanEpisodes}, {"stages", json::array()}};
    for (const auto& s : stages) j["stages"].push_back({{"scenario", s}});
    return plan_from_json(j, name, {}, total_override);
}

std::vector<std::string> bundled_plan_names() { return {"m10_vs_zl13", "m20_vs_zl30"}; }

CurriculumPlan resolve_plan(const std::string& ref, std::optional<int> total_override) {
    const std::filesystem::path p(ref);
    if (std::filesystem::exists(p)) return load_plan(p, total_override);
    if (p.extension() == ".json") throw ConfigError("plan file not found: " + ref);
    return bundled_plan(ref, total_override);
}

namespace {

json report_to_json(const EvalReport& r) {
    return {{"scenario", r.scenario},   {"episodes", r.episodes},     {"wins", r.wins},
            {"win_rate", r.win_rate},   {"mean_steps", r.mean_steps}, {"std_steps", r.std_steps},
            {"mean_avg_reward", r.mean_avg_reward}, {"seed", r.seed}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.episodes = j.at("episodes").get<int>();
    r.wins = j.at("wins").get<int>();
    r.win_rate = j.at("win_rate").get<double>();
    r.mean_steps = j.at("mean_steps").get<double>();
    r.std_steps = j.at("std_steps").get<double>();
    r.mean_avg_reward = j.at("mean_avg_reward").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

// Hashes go out as hex strings; JSON readers elsewhere may not keep 64-bit integers.
std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

std::uint64_t unhex(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

json RunManifest::to_json() const {
    json j{{"plan", plan_id}, {"seed", seed}, {"target", target}, {"stages", json::array()}};
    for (const auto& s : stages)
        j["stages"].push_back({{"index", s.index},
                               {"scenario", s.scenario},
                               {"episodes", s.episodes},
                               {"seed", s.seed},
                               {"start_checkpoint", s.start_checkpoint},
                               {"end_checkpoint", s.end_checkpoint},
                               {"metrics_csv", s.metrics_csv},
                               {"wall_seconds", s.wall_seconds},
                               {"start_hash", hex(s.start_hash)},
                               {"end_hash", hex(s.end_hash)},
                               {"complete", s.complete}});
    j["target_eval"] = target_eval ? report_to_json(*target_eval) : json(nullptr);
    return j;
}

RunManifest RunManifest::from_json(const json& j, const std::string& source) {
    try {
        RunManifest m;
        m.plan_id = j.at("plan").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.target = j.at("target").get<std::string>();
        for (const auto& s : j.at("stages")) {
            StageRecord r;
            r.index = s.at("index").get<int>();
            r.scenario = s.at("scenario").get<std::string>();
            r.episodes = s.at("episodes").get<int>();
            r.seed = s.at("seed").get<std::uint64_t>();
            r.start_checkpoint = s.at("start_checkpoint").get<std::string>();
            r.end_checkpoint = s.at("end_checkpoint").get<std::string>();
            r.metrics_csv = s.at("metrics_csv").get<std::string>();
            r.wall_seconds = s.at("wall_seconds").get<double>();
            r.start_hash = unhex(s.at("start_hash").get<std::string>());
            r.end_hash = unhex(s.at("end_hash").get<std::string>());
            r.complete = s.at("complete").get<bool>();
            m.stages.push_back(std::move(r));
        }
        if (j.contains("target_eval") && !j["target_eval"].is_null()) m.target_eval = report_from_json(j["target_eval"]);
        return m;
    } catch (const json::exception& e) {
        throw CheckpointError(source + ": malformed manifest: " + e.what());
    }
}

QNetworkd initial_network(std::uint64_t seed) { return init_q_network<double>(derive_seed(seed, "init")); }

RunManifest run_curriculum(const CurriculumPlan& plan, const TrainerConfig& cfg, const CurriculumOptions& opts) {
    plan.validate();
    cfg.validate();
    if (opts.out_dir.empty()) throw ConfigError("curriculum runs need an output directory");
    if (opts.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");

    const auto manifest_path = opts.out_dir / "manifest.json";
    RunManifest manifest;
    if (std::filesystem::exists(manifest_path)) {
        if (!opts.resume)
            throw ConfigError(opts.out_dir.string() + " already holds a curriculum run; resume or pick a fresh directory");
        manifest = RunManifest::from_json(read_json_file(manifest_path), manifest_path.string());
        if (manifest.plan_id != plan.id || manifest.seed != cfg.seed || manifest.stages.size() != plan.stages.size())
            throw ConfigError(manifest_path.string() + " belongs to a different plan or seed");
    } else {
        manifest.plan_id = plan.id;
        manifest.seed = cfg.seed;
        manifest.target = plan.target.id;
        for (std::size_t k = 0; k < plan.stages.size(); ++k) {
            StageRecord r;
            r.index = static_cast<int>(k) + 1;
            r.scenario = plan.stages[k].scenario.id;
            r.episodes = plan.stages[k].episodes;
            r.seed = derive_seed(cfg.seed, "stage", k);
            manifest.stages.push_back(r);
        }
    }
    auto write_manifest = [&] { write_text_atomic(manifest_path, manifest.to_json().dump(2) + "\n"); };
    std::filesystem::create_directories(opts.out_dir);
    write_manifest();

    std::optional<QNetworkd> net;  // set once a stage trains in this call
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        auto& rec = manifest.stages[k];
        const auto& stage = plan.stages[k];
        const auto dir = opts.out_dir / ("stage" + std::to_string(k + 1) + "_" + stage.scenario.id);
        if (rec.complete) {
            // The next stage reloads this file, so nothing to do until the end.
            if (!std::filesystem::exists(rec.end_checkpoint))
                throw CheckpointError("resume: stage " + std::to_string(k + 1) + " checkpoint missing: " +
                                      rec.end_checkpoint);
            continue;
        }

        QNetworkd init;
        if (k == 0) {
            init = initial_network(cfg.seed);
            rec.start_checkpoint.clear();
        } else {
            const auto& prev = manifest.stages[k - 1];
            try {
                init = load_checkpoint(prev.end_checkpoint);
                check_combat_interface(init);
            } catch (const std::exception& e) {
                throw TransferError("stage " + std::to_string(k + 1) + " cannot start from " + prev.end_checkpoint +
                                    ": " + e.what());
            }
            if (parameter_hash(init) != prev.end_hash)
                throw TransferError("stage " + std::to_string(k + 1) + ": " + prev.end_checkpoint +
                                    " does not match the parameters stage " + std::to_string(k) + " produced");
            rec.start_checkpoint = prev.end_checkpoint;
        }
        rec.start_hash = parameter_hash(init);

        TrainerConfig stage_cfg = cfg;
        stage_cfg.episodes = stage.episodes;
        stage_cfg.seed = rec.seed;
        RunOptions run_opts;
        run_opts.out_dir = dir;
        run_opts.checkpoint_every = opts.checkpoint_every;
        run_opts.resume = opts.resume;

        const auto t0 = std::chrono::steady_clock::now();
        auto result = run_training(stage.scenario, stage_cfg, std::move(init), run_opts);
        rec.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.end_checkpoint = (dir / checkpoint_filename(stage.episodes)).string();
        rec.metrics_csv = (dir / "metrics.csv").string();
        rec.end_hash = parameter_hash(result.net);
        rec.complete = true;
        write_manifest();
        net = std::move(result.net);
    }

    if (net || !manifest.target_eval) {
        if (!net) net = load_checkpoint(manifest.stages.back().end_checkpoint);
        manifest.target_eval = evaluate(*net, plan.target, opts.eval_episodes, opts.eval_seed, cfg.reward);
        write_manifest();
    }
    return manifest;
}

std::optional<double> censored_median(std::vector<std::optional<int>> values) {
    if (values.empty()) return std::nullopt;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> v;
    for (const auto& x : values) v.push_back(x ? double(*x) : inf);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double m = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    if (std::isinf(m)) return std::nullopt;
    return m;
}

std::optional<double> ComparisonReport::median_scratch() const {
    std::vector<std::optional<int>> v;
    for (const auto& r : rows) v.push_back(r.scratch.episodes_to_threshold);
    return censored_median(v);
}

std::optional<double> ComparisonReport::median_transfer() const {
    std::vector<std::optional<int>> v;
    for (const auto& r : rows) v.push_back(r.transfer.episodes_to_threshold);
    return censored_median(v);
}

bool ComparisonReport::transfer_faster() const {
    const auto t = median_transfer();
    const auto s = median_scratch();
    if (!t) return false;
    return !s || *t < *s;
}

namespace {

ArmResult train_arm(const ScenarioSpec& spec, QNetworkd init, const TrainerConfig& cfg, const CompareOptions& opts) {
    ArmResult arm;
    auto point = [&](int episodes, const QNetworkd& q) {
        const double w = evaluate(q, spec, opts.eval_episodes, opts.eval_seed, cfg.reward).win_rate;
        arm.curve.emplace_back(episodes, w);
        if (!arm.episodes_to_threshold && w >= opts.threshold) arm.episodes_to_threshold = episodes;
    };
    point(0, init);
    RunOptions run_opts;
    run_opts.on_episode_end = [&](const EpisodeStats& s, const QNetworkd& q) {
        const int done = s.episode + 1;
        if (done % opts.eval_every == 0 || done == cfg.episodes) point(done, q);
    };
    run_training(spec, cfg, std::move(init), run_opts);
    arm.final_win_rate = arm.curve.back().second;
    return arm;
}

}  // namespace

ComparisonReport compare_scratch_vs_transfer(const ScenarioSpec& spec, const QNetworkd& source,
                                             const TrainerConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                             const CompareOptions& opts) {
    if (seeds.size() < 2) throw ConfigError("scratch-vs-transfer comparison needs at least two seeds");
    if (opts.eval_every < 1 || opts.eval_episodes < 1) throw ConfigError("evaluation interval and size must be >= 1");
    if (!(opts.threshold > 0.0 && opts.threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
    try {
        check_combat_interface(source);
    } catch (const ShapeError& e) {
        throw TransferError(std::string("source network: ") + e.what());
    }

    ComparisonReport report;
    report.scenario = spec.id;
    report.threshold = opts.threshold;
    report.episodes = cfg.episodes;
    for (const auto seed : seeds) {
        TrainerConfig arm_cfg = cfg;
        arm_cfg.seed = seed;
        ComparisonRow row;
        row.seed = seed;
        row.scratch = train_arm(spec, initial_network(seed), arm_cfg, opts);
        row.transfer = train_arm(spec, source, arm_cfg, opts);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string comparison_csv(const ComparisonReport& report) {
    std::ostringstream os;
    os << "seed,arm,episodes_to_threshold,final_win_rate\n";
    for (const auto& r : report.rows) {
        for (const auto& [name, arm] : {std::pair{"scratch", &r.scratch}, std::pair{"transfer", &r.transfer}}) {
            os << r.seed << ',' << name << ','
               << (arm->episodes_to_threshold ? std::to_string(*arm->episodes_to_threshold) : "never") << ','
               << format_number(arm->final_win_rate) << '\n';
        }
    }
    return os.str();
}

std::vector<EvalReport> evaluate_generalization(const QNetworkd& net, const std::vector<ScenarioSpec>& scenarios,
                                                int episodes_per, std::uint64_t seed) {
    check_combat_interface(net);
    std::vector<EvalReport> out;
    for (const auto& s : scenarios) out.push_back(evaluate(net, s, episodes_per, seed));
    return out;
}

}  // namespace microrl
