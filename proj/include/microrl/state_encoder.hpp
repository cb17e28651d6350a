#pragma once

#include "microrl/action.hpp"
#include "microrl/combat_sim.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace microrl {

/// Layout of one 42-entry state block.
namespace obs_layout {
inline constexpr int kCooldown = 0;
inline constexpr int kHitpoint = 1;
inline constexpr int kOwnSum = 2;
inline constexpr int kOwnMax = 10;
inline constexpr int kEnemySum = 18;
inline constexpr int kEnemyMax = 26;
inline constexpr int kTerrain = 34;
inline constexpr int kBlockSize = 42;

inline constexpr int kCurrent = 0;
inline constexpr int kPrevious = kBlockSize;
inline constexpr int kLastAction = 2 * kBlockSize;
inline constexpr int kSize = 2 * kBlockSize + kNumActions;
}  // namespace obs_layout

inline constexpr int kObservationSize = obs_layout::kSize;  // 93

/// current block (42) | previous block (42) | last action one-hot (9)
using Observation = Eigen::Matrix<double, kObservationSize, 1>;
using StateBlock = Eigen::Matrix<double, obs_layout::kBlockSize, 1>;

/// 0.05 beyond sight range, otherwise 1 - 0.95 d/D.
double unit_distance_value(double d, double sight_range);

/// 0 beyond sight range, otherwise 1 - d/D.
double terrain_distance_value(double d, double sight_range);

struct SectorEntry {
    std::size_t index;  // position in the input list
    double distance;
    Side side;
};

struct Neighbor {
    Vec2 position;
    Side side;
};

using SectorBuckets = std::array<std::vector<SectorEntry>, kNumSectors>;

/// Buckets neighbours into the eight 45-degree sectors around `center` (see sector_of).
SectorBuckets sectorize(const Vec2& center, std::span<const Neighbor> neighbors);

/// Terrain surface points around a unit: each obstacle rim at unit arc spacing plus its
/// nearest point, and the map boundary at unit spacing plus the foot of the perpendicular.
std::vector<Vec2> terrain_samples(const RawObservation& raw, double radius);

/// The 42-entry block describing the unit's current situation.
StateBlock encode_block(const RawObservation& raw);

/// Full 93-entry observation. Without a previous observation the previous block repeats
/// the current one; without a last action the one-hot is all zeros.
Observation encode(const RawObservation& raw, const Observation* previous, std::optional<CombatAction> last_action);

}  // namespace microrl
