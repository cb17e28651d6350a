#include "support.hpp"

#include "microrl/checkpoint.hpp"
#include "microrl/curriculum.hpp"
#include "microrl/errors.hpp"
#include "microrl/scenario_io.hpp"
#include "microrl/training_run.hpp"

#include <doctest.h>

#include <fstream>

using namespace microrl;
using nlohmann::json;

TEST_CASE("budget split") {
    CHECK(split_budget(3000, 3) == std::vector<int>{1000, 1000, 1000});
    CHECK(split_budget(10, 3) == std::vector<int>{4, 3, 3});
    CHECK_THROWS_AS(split_budget(2, 3), ConfigError);
    CHECK_THROWS_AS(split_budget(5, 0), ConfigError);
}

TEST_CASE("bundled plans follow the staged design") {
    const auto p = bundled_plan("m10_vs_zl13");
    REQUIRE(p.stages.size() == 3);
    CHECK(p.stages[0].scenario.id == "m5_vs_zl6");
    CHECK(p.stages[1].scenario.id == "m8_vs_zl10");
    CHECK(p.stages[2].scenario.id == "m8_vs_zl12");
    CHECK(p.target.id == "m10_vs_zl13");
    CHECK(p.stages[0].scenario.own_units.size() == 5);
    CHECK(p.stages[2].scenario.enemy_units.size() == 12);
    const auto q = bundled_plan("m20_vs_zl30", 90);
    CHECK(q.stages[0].scenario.id == "m10_vs_zl12");
    CHECK(q.stages[1].scenario.id == "m15_vs_zl20");
    CHECK(q.stages[2].scenario.id == "m20_vs_zl25");
    for (const auto& s : q.stages) CHECK(s.episodes == 30);
    CHECK_THROWS_AS(bundled_plan("nope"), ConfigError);
}

TEST_CASE("plan parsing") {
    json j = {{"id", "p"},
              {"target", "g3_vs_z6"},
              {"episodes", 100},
              {"stages", {{{"scenario", "g3_vs_z6"}, {"episodes", 40}}, {{"scenario", "g3_vs_zl12"}}}}};
    auto p = plan_from_json(j, "p.json");
    CHECK(p.stages[0].episodes == 40);
    CHECK(p.stages[1].episodes == 60);
    p = plan_from_json(j, "p.json", {}, 10);
    CHECK(p.stages[0].episodes == 5);

    auto bad = j;
    bad["stages"] = json::array();
    CHECK_THROWS_AS(plan_from_json(bad, "p.json"), ConfigError);
    bad = j;
    bad["stages"][0]["budget"] = 3;
    CHECK_THROWS_AS(plan_from_json(bad, "p.json"), ConfigError);
    bad = j;
    bad["stages"][0]["scenario"] = "missing.json";
    CHECK_THROWS_AS(plan_from_json(bad, "p.json"), ConfigError);
    bad = j;
    bad["stages"][0]["episodes"] = 0;
    CHECK_THROWS_AS(plan_from_json(bad, "p.json"), ConfigError);
}

TEST_CASE("shipped plan and scenario files match the builders") {
    const std::filesystem::path root = MICRORL_SOURCE_DIR;
    for (const auto& name : scenarios::bundled_names()) {
        const auto file = root / "scenarios" / (name + ".json");
        REQUIRE(std::filesystem::exists(file));
        CHECK(to_json(load_scenario(file)) == to_json(scenarios::bundled(name)));
    }
    for (const auto& name : bundled_plan_names()) {
        const auto file = root / "plans" / (name + ".json");
        REQUIRE(std::filesystem::exists(file));
        CHECK(to_json(load_plan(file)) == to_json(bundled_plan(name)));
    }
}

TEST_CASE("curriculum chains checkpoints and evaluates the target") {
    const auto plan = bundled_plan("m10_vs_zl13", 6);
    TrainerConfig cfg;
    cfg.seed = 2;
    CurriculumOptions opts;
    opts.out_dir = testing_support::scratch_dir("curriculum_chain");
    opts.eval_episodes = 3;
    const auto m = run_curriculum(plan, cfg, opts);
    REQUIRE(m.stages.size() == 3);
    CHECK(m.stages[0].start_checkpoint.empty());
    CHECK(m.stages[0].start_hash == parameter_hash(initial_network(cfg.seed)));
    for (std::size_t k = 1; k < 3; ++k) {
        CHECK(m.stages[k].start_checkpoint == m.stages[k - 1].end_checkpoint);
        CHECK(m.stages[k].start_hash == m.stages[k - 1].end_hash);
        CHECK(m.stages[k].seed != m.stages[k - 1].seed);
    }
    for (const auto& s : m.stages) {
        CHECK(s.complete);
        CHECK(std::filesystem::exists(s.end_checkpoint));
        CHECK(parameter_hash(load_checkpoint(s.end_checkpoint)) == s.end_hash);
    }
    REQUIRE(m.target_eval);
    CHECK(m.target_eval->scenario == "m10_vs_zl13");
    CHECK(m.target_eval->episodes == 3);

    const auto back = RunManifest::from_json(read_json_file(opts.out_dir / "manifest.json"));
    CHECK(back.to_json() == m.to_json());
    CHECK_THROWS_AS(run_curriculum(plan, cfg, opts), ConfigError);
}

TEST_CASE("single-stage curriculum is plain training") {
    CurriculumPlan plan;
    plan.id = "one";
    plan.stages.push_back({scenarios::goliaths_vs_zealots(), 4});
    plan.target = scenarios::goliaths_vs_zealots();
    TrainerConfig cfg;
    cfg.seed = 5;
    CurriculumOptions opts;
    opts.out_dir = testing_support::scratch_dir("curriculum_single");
    opts.eval_episodes = 2;
    const auto m = run_curriculum(plan, cfg, opts);

    TrainerConfig direct = cfg;
    direct.episodes = 4;
    direct.seed = m.stages[0].seed;
    const auto r = run_training(plan.stages[0].scenario, direct, initial_network(cfg.seed));
    CHECK(parameter_hash(r.net) == m.stages[0].end_hash);
}

TEST_CASE("a corrupted hand-off checkpoint is a transfer error naming the file") {
    const auto plan = bundled_plan("m10_vs_zl13", 6);
    TrainerConfig cfg;
    CurriculumOptions opts;
    opts.out_dir = testing_support::scratch_dir("curriculum_corrupt");
    opts.eval_episodes = 1;
    auto m = run_curriculum(plan, cfg, opts);

    // Pretend stage 2 never finished, and damage stage 1's output.
    m.stages[1].complete = false;
    m.stages[2].complete = false;
    m.target_eval.reset();
    write_text_atomic(opts.out_dir / "manifest.json", m.to_json().dump(2));
    std::filesystem::remove_all(opts.out_dir / "stage2_m8_vs_zl10");
    std::filesystem::remove_all(opts.out_dir / "stage3_m8_vs_zl12");
    { std::ofstream(m.stages[0].end_checkpoint) << "psmagds-v1 93 100 9\n0.1\n"; }
    opts.resume = true;
    try {
        run_curriculum(plan, cfg, opts);
        FAIL("expected a transfer error");
    } catch (const TransferError& e) {
        CHECK(std::string(e.what()).find(m.stages[0].end_checkpoint) != std::string::npos);
    }
}

TEST_CASE("interrupted curriculum resumes from the last complete checkpoint") {
    const auto plan = bundled_plan("m10_vs_zl13", 9);
    TrainerConfig cfg;
    cfg.seed = 8;
    CurriculumOptions whole;
    whole.out_dir = testing_support::scratch_dir("curriculum_whole");
    whole.eval_episodes = 2;
    whole.checkpoint_every = 2;
    const auto ref = run_curriculum(plan, cfg, whole);

    // Simulate a kill in stage 2 after its first checkpoint.
    CurriculumOptions cut = whole;
    cut.out_dir = testing_support::scratch_dir("curriculum_cut");
    auto m = run_curriculum(plan, cfg, cut);
    m.stages[1].complete = false;
    m.stages[2] = ref.stages[2];
    m.stages[2].complete = false;
    m.stages[2].end_checkpoint.clear();
    m.target_eval.reset();
    write_text_atomic(cut.out_dir / "manifest.json", m.to_json().dump(2));
    std::filesystem::remove(cut.out_dir / "stage2_m8_vs_zl10" / checkpoint_filename(3));
    std::filesystem::remove_all(cut.out_dir / "stage3_m8_vs_zl12");

    cut.resume = true;
    const auto resumed = run_curriculum(plan, cfg, cut);
    for (std::size_t k = 0; k < 3; ++k) CHECK(resumed.stages[k].end_hash == ref.stages[k].end_hash);
    CHECK(resumed.target_eval->win_rate == ref.target_eval->win_rate);
    CHECK(resumed.target_eval->mean_steps == ref.target_eval->mean_steps);
}

TEST_CASE("scratch versus transfer bookkeeping") {
    CHECK(censored_median({1, 2, 3}) == 2.0);
    CHECK(censored_median({200, std::nullopt, 400}) == 400.0);
    CHECK_FALSE(censored_median({200, std::nullopt, std::nullopt}));
    CHECK(censored_median({200, 400}) == 300.0);

    ComparisonReport r;
    r.rows.resize(3);
    r.rows[0].transfer.episodes_to_threshold = 200;
    r.rows[1].transfer.episodes_to_threshold = 400;
    r.rows[0].scratch.episodes_to_threshold = 600;
    CHECK(r.median_transfer() == 400.0);
    CHECK_FALSE(r.median_scratch());
    CHECK(r.transfer_faster());
    r.rows[2].transfer.episodes_to_threshold = std::nullopt;
    r.rows[1].transfer.episodes_to_threshold = std::nullopt;
    CHECK_FALSE(r.transfer_faster());
}

TEST_CASE("comparison needs two seeds and runs paired arms") {
    const auto spec = scenarios::goliaths_vs_zealots();
    TrainerConfig cfg;
    cfg.episodes = 4;
    CHECK_THROWS_AS(compare_scratch_vs_transfer(spec, initial_network(1), cfg, {1}), ConfigError);
    CompareOptions opts;
    opts.eval_every = 2;
    opts.eval_episodes = 2;
    const auto r = compare_scratch_vs_transfer(spec, initial_network(1), cfg, {1, 2}, opts);
    REQUIRE(r.rows.size() == 2);
    // Seed 1's scratch arm starts from the same network as the transfer source.
    CHECK(r.rows[0].scratch.curve == r.rows[0].transfer.curve);
    CHECK(r.rows[1].scratch.curve.size() == 3);
    CHECK(comparison_csv(r).find("seed,arm,episodes_to_threshold,final_win_rate\n") == 0);
}

TEST_CASE("generalization table covers every scenario") {
    const auto net = initial_network(3);
    const std::vector<ScenarioSpec> specs{scenarios::goliaths_vs_zealots(), scenarios::goliaths_vs_zealots(6, 12)};
    const auto rows = evaluate_generalization(net, specs, 2, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].scenario == "g6_vs_z12");
    CHECK(rows[0].win_rate == evaluate(net, specs[0], 2, 1).win_rate);
}
