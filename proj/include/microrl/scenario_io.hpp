#pragma once

#include "microrl/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace microrl {

// Scenario files are JSON objects:
//
//   {
//     "id": "g3_vs_z6",
//     "map": {"width": 64, "height": 64},
//     "enemy_controller": "closest",
//     "max_episode_steps": 1000,
//     "frame_skip": 10,
//     "spawn_jitter": 1.0,
//     "own_units":   [{"class": "goliath", "x": 20, "y": 32}, ...],
//     "enemy_units": [{"class": {"name": "zealot", "move_speed": 0.3, ...}, "x": 44, "y": 32}],
//     "obstacles":   [{"x": 32, "y": 32, "radius": 3}]
//   }
//
// A unit's "class" is either a bundled class name or an object; object fields not
// given default to the bundled class of the same name. Missing top-level keys take
// the ScenarioSpec defaults.

nlohmann::json to_json(const UnitClass& c);
nlohmann::json to_json(const ScenarioSpec& spec);

/// Throws ConfigError naming `source` and the offending key.
ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& source = "<json>");

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

/// A bundled scenario name, or a path to a scenario file. Relative paths are tried
/// against `base_dir` first, then the working directory.
ScenarioSpec resolve_scenario(const std::string& ref, const std::filesystem::path& base_dir = {});

/// Reads a whole JSON file; ConfigError on missing file or syntax error.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes through a temporary file and a rename so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace microrl
