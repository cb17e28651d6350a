#pragma once

#include "microrl/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace microrl {

/// The nine discrete unit actions in canonical order: eight fixed-distance moves,
/// then a hold-position attack on the weakest enemy in fire range.
enum class CombatAction : std::uint8_t {
    Up,
    Down,
    Left,
    Right,
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
    AttackWeakest,
};

inline constexpr int kNumActions = 9;

constexpr int action_index(CombatAction a) { return static_cast<int>(a); }

constexpr CombatAction action_from_index(int i) { return static_cast<CombatAction>(i); }

constexpr bool is_move(CombatAction a) { return a != CombatAction::AttackWeakest; }

/// Sector a move action heads into (see sector_of). Undefined for AttackWeakest.
constexpr int move_sector(CombatAction a) {
    switch (a) {
        case CombatAction::Right: return 0;
        case CombatAction::UpperRight: return 1;
        case CombatAction::Up: return 2;
        case CombatAction::UpperLeft: return 3;
        case CombatAction::Left: return 4;
        case CombatAction::LowerLeft: return 5;
        case CombatAction::Down: return 6;
        case CombatAction::LowerRight: return 7;
        case CombatAction::AttackWeakest: break;
    }
    return -1;
}

constexpr CombatAction move_for_sector(int sector) {
    constexpr std::array<CombatAction, 8> moves{
        CombatAction::Right,    CombatAction::UpperRight, CombatAction::Up,
        CombatAction::UpperLeft, CombatAction::Left,      CombatAction::LowerLeft,
        CombatAction::Down,     CombatAction::LowerRight,
    };
    return moves[static_cast<std::size_t>(sector)];
}

/// Unit-length displacement of a move; +y is Up.
inline Vec2 move_direction(CombatAction a) {
    constexpr double d = 0.70710678118654752440;
    switch (a) {
        case CombatAction::Up: return {0.0, 1.0};
        case CombatAction::Down: return {0.0, -1.0};
        case CombatAction::Left: return {-1.0, 0.0};
        case CombatAction::Right: return {1.0, 0.0};
        case CombatAction::UpperLeft: return {-d, d};
        case CombatAction::UpperRight: return {d, d};
        case CombatAction::LowerLeft: return {-d, -d};
        case CombatAction::LowerRight: return {d, -d};
        case CombatAction::AttackWeakest: break;
    }
    return {0.0, 0.0};
}

constexpr std::string_view action_name(CombatAction a) {
    constexpr std::array<std::string_view, kNumActions> names{
        "up", "down", "left", "right", "upper_left", "upper_right", "lower_left", "lower_right", "attack",
    };
    return names[static_cast<std::size_t>(a)];
}

inline std::optional<CombatAction> parse_action(std::string_view s) {
    for (int i = 0; i < kNumActions; ++i)
        if (action_name(action_from_index(i)) == s) return action_from_index(i);
    return std::nullopt;
}

}  // namespace microrl
