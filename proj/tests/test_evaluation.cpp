#include "support.hpp"

#include "microrl/checkpoint.hpp"
#include "microrl/curriculum.hpp"
#include "microrl/errors.hpp"
#include "microrl/evaluation.hpp"
#include "microrl/scenario_io.hpp"
#include "microrl/training_run.hpp"

#include <doctest.h>

#include <sstream>

using namespace microrl;
using testing_support::at;
using testing_support::placed;

TEST_CASE("win rate is wins over episodes") {
    const auto r = evaluate(ScriptedPolicy::AttackWeakest, scenarios::goliaths_vs_zerglings(6, 4), 20, 3);
    CHECK(r.episodes == 20);
    CHECK(r.win_rate == static_cast<double>(r.wins) / 20);
    CHECK(r.wins > 0);
    CHECK_THROWS_AS(evaluate(ScriptedPolicy::AttackWeakest, scenarios::goliaths_vs_zealots(), 0, 1), ConfigError);
}

TEST_CASE("mirror match under scripts is repeatable") {
    auto spec = placed({at(unit_classes::marine(), 20, 30), at(unit_classes::marine(), 20, 34)},
                       {at(unit_classes::marine(), 44, 30), at(unit_classes::marine(), 44, 34)});
    const auto a = evaluate(ScriptedPolicy::AttackClosest, spec, 5, 1);
    const auto b = evaluate(ScriptedPolicy::AttackClosest, spec, 5, 2);
    CHECK(a.wins == b.wins);
    CHECK(a.mean_steps == b.mean_steps);
}

TEST_CASE("zero network always picks the first action") {
    const QNetworkd zero;
    const auto trace = greedy_action_trace(zero, scenarios::goliaths_vs_zealots(), 4);
    for (const auto& tick : trace)
        for (int a : tick) CHECK(a == 0);
    const auto r = evaluate(zero, scenarios::goliaths_vs_zealots(), 3, 1);
    CHECK(r.episodes == 3);
}

TEST_CASE("evaluation is pure and reproducible") {
    const auto net = initial_network(6);
    const auto before = parameter_hash(net);
    const auto spec = scenarios::goliaths_vs_zealots();
    const auto a = evaluate(net, spec, 4, 9);
    const auto b = evaluate(net, spec, 4, 9);
    CHECK(parameter_hash(net) == before);
    CHECK(eval_csv_row(a) == eval_csv_row(b));
    QNetworkd wrong(10, 5, 9);
    CHECK_THROWS_AS(evaluate(wrong, spec, 1, 1), ShapeError);
}

TEST_CASE("repeats use distinct seed sets") {
    const auto reps = evaluate_repeated(ScriptedPolicy::AttackWeakest, scenarios::goliaths_vs_zerglings(6, 6), 10, 5, 1);
    REQUIRE(reps.size() == 5);
    CHECK(reps[0].seed != reps[1].seed);
}

TEST_CASE("checkpoint reload replays the same greedy actions") {
    TrainerConfig cfg;
    cfg.episodes = 3;
    const auto r = run_training(scenarios::goliaths_vs_zealots(), cfg, initial_network(1));
    const auto dir = testing_support::scratch_dir("reload");
    save_checkpoint(r.net, dir / "net.txt");
    const auto back = load_checkpoint(dir / "net.txt");
    for (std::uint64_t seed : {1u, 2u, 3u})
        CHECK(greedy_action_trace(back, scenarios::goliaths_vs_zealots(), seed) ==
              greedy_action_trace(r.net, scenarios::goliaths_vs_zealots(), seed));
}

TEST_CASE("training curve with gaps") {
    TrainerConfig cfg;
    cfg.episodes = 6;
    RunOptions opts;
    opts.out_dir = testing_support::scratch_dir("curve");
    opts.checkpoint_every = 2;
    run_training(scenarios::goliaths_vs_zealots(), cfg, initial_network(1), opts);
    std::filesystem::remove(opts.out_dir / checkpoint_filename(4));
    const auto rows = training_curve(opts.out_dir, scenarios::goliaths_vs_zealots(), 2, 2, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].episode == 2);
    CHECK(rows[1].episode == 4);
    CHECK_FALSE(rows[1].present);
    CHECK(rows[2].present);
    CHECK(curve_csv(rows).find("4,") != std::string::npos);

    const auto only = testing_support::scratch_dir("curve_single");
    std::filesystem::copy(opts.out_dir / checkpoint_filename(6), only / checkpoint_filename(6));
    CHECK(training_curve(only, scenarios::goliaths_vs_zealots(), 2, 1, 1).size() == 1);
    CHECK_THROWS_AS(training_curve(testing_support::scratch_dir("curve_empty"), scenarios::goliaths_vs_zealots(), 2, 1, 1),
                    CheckpointError);
}

TEST_CASE("replay records one line per tick") {
    std::ostringstream os;
    ReplayWriter w(os);
    const auto r = evaluate(ScriptedPolicy::AttackWeakest, scenarios::goliaths_vs_zealots(), 2, 1, {}, &w);
    std::istringstream in(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["tick"] == lines);
        CHECK(j["units"].size() == 9);
        CHECK(j["outcome"].contains("winner"));
        ++lines;
    }
    CHECK(lines == w.lines());
    CHECK(lines > 0);
    CHECK(r.episodes == 2);
}

TEST_CASE("scenario json round trip and errors") {
    auto spec = scenarios::goliaths_vs_zealots();
    spec.obstacles.push_back({{32, 32}, 3});
    UnitClass slow = unit_classes::zealot();
    slow.move_speed = 0.3;
    spec.enemy_units[0].unit_class = slow;
    const auto j = to_json(spec);
    CHECK(j["enemy_units"][0]["class"].is_object());
    CHECK(j["own_units"][0]["class"] == "goliath");
    const auto back = scenario_from_json(j);
    CHECK(to_json(back) == j);

    auto partial = nlohmann::json::parse(R"({"own_units":[{"class":"marine","x":5,"y":5}],
        "enemy_units":[{"class":{"name":"zergling","move_speed":0.6},"x":9,"y":5}]})");
    const auto p = scenario_from_json(partial);
    CHECK(p.enemy_units[0].unit_class.move_speed == 0.6);
    CHECK(p.enemy_units[0].unit_class.max_hitpoint == 35);

    auto bad = partial;
    bad["frameskip"] = 3;
    CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
    bad = partial;
    bad["own_units"][0]["class"] = "wraith";
    CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
    bad = partial;
    bad["own_units"][0].erase("x");
    CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/s.json"), ConfigError);
    CHECK_THROWS_AS(resolve_scenario("nope.json"), ConfigError);
    CHECK(resolve_scenario("g3_vs_zl20").enemy_units.size() == 20);
}
