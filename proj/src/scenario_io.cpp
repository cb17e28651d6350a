#include "microrl/scenario_io.hpp"

#include "microrl/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace microrl {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return get_or<T>(j, key, T{}, where);
}

UnitClass class_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return unit_classes::by_name(j.get<std::string>());
    check_keys(j, {"name", "max_hitpoint", "cooldown_frames", "damage_factor", "defence_factor", "fire_range",
                   "sight_range", "move_speed"},
               where);
    UnitClass c;
    c.name = require<std::string>(j, "name", where);
    bool bundled = false;
    for (const auto& n : unit_classes::names()) bundled = bundled || n == c.name;
    if (bundled) c = unit_classes::by_name(c.name);
    auto field = [&](const char* key, auto& slot) {
        using V = std::decay_t<decltype(slot)>;
        slot = bundled ? get_or<V>(j, key, slot, where) : require<V>(j, key, where);
    };
    field("max_hitpoint", c.max_hitpoint);
    field("cooldown_frames", c.cooldown_frames);
    field("damage_factor", c.damage_factor);
    field("defence_factor", c.defence_factor);
    field("fire_range", c.fire_range);
    field("sight_range", c.sight_range);
    field("move_speed", c.move_speed);
    validate(c);
    return c;
}

std::vector<UnitPlacement> units_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<UnitPlacement> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        check_keys(j[i], {"class", "x", "y"}, at);
        if (!j[i].contains("class")) throw ConfigError(at + ": missing key 'class'");
        UnitPlacement p;
        p.unit_class = class_from_json(j[i]["class"], at + ".class");
        p.position = {require<double>(j[i], "x", at), require<double>(j[i], "y", at)};
        out.push_back(std::move(p));
    }
    return out;
}

json placement_to_json(const UnitPlacement& p) {
    json j;
    const bool stock = [&] {
        for (const auto& n : unit_classes::names())
            if (n == p.unit_class.name) return unit_classes::by_name(n) == p.unit_class;
        return false;
    }();
    j["class"] = stock ? json(p.unit_class.name) : to_json(p.unit_class);
    j["x"] = p.position.x();
    j["y"] = p.position.y();
    return j;
}

}  // namespace

json to_json(const UnitClass& c) {
    return {{"name", c.name},
            {"max_hitpoint", c.max_hitpoint},
            {"cooldown_frames", c.cooldown_frames},
            {"damage_factor", c.damage_factor},
            {"defence_factor", c.defence_factor},
            {"fire_range", c.fire_range},
            {"sight_range", c.sight_range},
            {"move_speed", c.move_speed}};
}

json to_json(const ScenarioSpec& spec) {
    json j;
    j["id"] = spec.id;
    j["map"] = {{"width", spec.map_width}, {"height", spec.map_height}};
    j["enemy_controller"] = spec.enemy_controller == ScriptedPolicy::AttackWeakest ? "weakest" : "closest";
    j["max_episode_steps"] = spec.max_episode_steps;
    j["frame_skip"] = spec.frame_skip;
    j["spawn_jitter"] = spec.spawn_jitter;
    j["own_units"] = json::array();
    for (const auto& p : spec.own_units) j["own_units"].push_back(placement_to_json(p));
    j["enemy_units"] = json::array();
    for (const auto& p : spec.enemy_units) j["enemy_units"].push_back(placement_to_json(p));
    j["obstacles"] = json::array();
    for (const auto& o : spec.obstacles)
        j["obstacles"].push_back({{"x", o.center.x()}, {"y", o.center.y()}, {"radius", o.radius}});
    return j;
}

ScenarioSpec scenario_from_json(const json& j, const std::string& source) {
    check_keys(j, {"id", "map", "enemy_controller", "max_episode_steps", "frame_skip", "spawn_jitter", "own_units",
                   "enemy_units", "obstacles"},
               source);
    ScenarioSpec spec;
    spec.id = get_or<std::string>(j, "id", spec.id, source);
    if (j.contains("map")) {
        const std::string at = source + ".map";
        check_keys(j["map"], {"width", "height"}, at);
        spec.map_width = get_or<double>(j["map"], "width", spec.map_width, at);
        spec.map_height = get_or<double>(j["map"], "height", spec.map_height, at);
    }
    if (j.contains("enemy_controller")) {
        try {
            spec.enemy_controller = parse_scripted_policy(get_or<std::string>(j, "enemy_controller", "", source));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ": " + e.what());
        }
    }
    spec.max_episode_steps = get_or<int>(j, "max_episode_steps", spec.max_episode_steps, source);
    spec.frame_skip = get_or<int>(j, "frame_skip", spec.frame_skip, source);
    spec.spawn_jitter = get_or<double>(j, "spawn_jitter", spec.spawn_jitter, source);
    if (!j.contains("own_units")) throw ConfigError(source + ": missing key 'own_units'");
    if (!j.contains("enemy_units")) throw ConfigError(source + ": missing key 'enemy_units'");
    spec.own_units = units_from_json(j["own_units"], source + ".own_units");
    spec.enemy_units = units_from_json(j["enemy_units"], source + ".enemy_units");
    if (j.contains("obstacles")) {
        const auto& obs = j["obstacles"];
        if (!obs.is_array()) throw ConfigError(source + ".obstacles: expected an array");
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const std::string at = source + ".obstacles[" + std::to_string(i) + "]";
            check_keys(obs[i], {"x", "y", "radius"}, at);
            TerrainObstacle o;
            o.center = {require<double>(obs[i], "x", at), require<double>(obs[i], "y", at)};
            o.radius = require<double>(obs[i], "radius", at);
            spec.obstacles.push_back(o);
        }
    }
    try {
        validate(spec);
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return spec;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << text;
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_json_file(path), path.string());
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
    write_text_atomic(path, to_json(spec).dump(2) + "\n");
}

ScenarioSpec resolve_scenario(const std::string& ref, const std::filesystem::path& base_dir) {
    const std::filesystem::path p(ref);
    if (!base_dir.empty() && p.is_relative() && std::filesystem::exists(base_dir / p)) return load_scenario(base_dir / p);
    if (std::filesystem::exists(p)) return load_scenario(p);
    if (p.extension() == ".json") throw ConfigError("scenario file not found: " + ref);
    return scenarios::bundled(ref);
}

}  // namespace microrl
