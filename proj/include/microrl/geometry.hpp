#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace microrl {

using Vec2 = Eigen::Vector2d;

inline constexpr int kNumSectors = 8;

/// Sector index of an offset vector. Sector 0 covers bearings [-22.5, 22.5) degrees
/// around +x and indices grow counterclockwise; a bearing exactly on a boundary
/// belongs to the counterclockwise-next sector. The zero vector maps to sector 0.
inline int sector_of(const Vec2& offset) {
    if (offset.x() == 0.0 && offset.y() == 0.0) return 0;
    double deg = std::atan2(offset.y(), offset.x()) * (180.0 / std::numbers::pi);
    if (deg < 0.0) deg += 360.0;
    // Snap values within rounding noise of a boundary onto it.
    const double scaled = (deg + 22.5) / 45.0;
    const int k = static_cast<int>(std::floor(scaled + 1e-9));
    return k % kNumSectors;
}

/// Unit vector pointing at the middle of a sector.
inline Vec2 sector_direction(int sector) {
    const double rad = sector * (std::numbers::pi / 4.0);
    return {std::cos(rad), std::sin(rad)};
}

}  // namespace microrl
