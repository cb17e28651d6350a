#include "microrl/state_encoder.hpp"

#include "microrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace microrl {

namespace {

void check_distance_args(double d, double sight_range) {
    if (!(d >= 0.0)) throw DomainError("distance must be >= 0");
    if (!(sight_range > 0.0)) throw DomainError("sight range must be > 0");
}

// Samples along one straight map edge: the foot of the perpendicular from `c` plus
// integer coordinates within `radius` of it.
void edge_samples(double fixed, bool vertical, double length, const Vec2& c, double radius, std::vector<Vec2>& out) {
    const double along = vertical ? c.y() : c.x();
    const double across = vertical ? c.x() : c.y();
    if (std::abs(across - fixed) > radius) return;
    auto emit = [&](double t) { out.push_back(vertical ? Vec2{fixed, t} : Vec2{t, fixed}); };
    const double lo = std::max(0.0, along - radius);
    const double hi = std::min(length, along + radius);
    emit(std::clamp(along, 0.0, length));
    for (double t = std::ceil(lo); t <= hi; t += 1.0) emit(t);
}

}  // namespace

double unit_distance_value(double d, double sight_range) {
    check_distance_args(d, sight_range);
    if (d > sight_range) return 0.05;
    return 1.0 - 0.95 * (d / sight_range);
}

double terrain_distance_value(double d, double sight_range) {
    check_distance_args(d, sight_range);
    if (d > sight_range) return 0.0;
    return 1.0 - d / sight_range;
}

SectorBuckets sectorize(const Vec2& center, std::span<const Neighbor> neighbors) {
    SectorBuckets buckets;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        const Vec2 offset = neighbors[i].position - center;
        buckets[static_cast<std::size_t>(sector_of(offset))].push_back({i, offset.norm(), neighbors[i].side});
    }
    return buckets;
}

std::vector<Vec2> terrain_samples(const RawObservation& raw, double radius) {
    std::vector<Vec2> points;
    const Vec2& c = raw.position;
    for (const auto& o : raw.obstacles) {
        // Exact nearest rim point, so the closest distance is never off by the sampling.
        const Vec2 away = c - o.center;
        if (away.norm() > 0.0) points.push_back(o.center + o.radius * away.normalized());
        const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * o.radius)));
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * k / n;
            points.push_back(o.center + o.radius * Vec2{std::cos(a), std::sin(a)});
        }
    }
    edge_samples(0.0, true, raw.map_height, c, radius, points);
    edge_samples(raw.map_width, true, raw.map_height, c, radius, points);
    edge_samples(0.0, false, raw.map_width, c, radius, points);
    edge_samples(raw.map_height, false, raw.map_width, c, radius, points);
    return points;
}

StateBlock encode_block(const RawObservation& raw) {
    using namespace obs_layout;
    const UnitClass& cls = raw.unit_class;
    const double sight = cls.sight_range;

    StateBlock block = StateBlock::Zero();
    block[kCooldown] = static_cast<double>(raw.cooldown_remaining) / cls.cooldown_frames;
    block[kHitpoint] = static_cast<double>(raw.hitpoint) / cls.max_hitpoint;

    std::vector<Neighbor> visible;
    visible.reserve(raw.allies.size() + raw.enemies.size());
    for (const auto* list : {&raw.allies, &raw.enemies})
        for (const auto& u : *list)
            if (u.in_sight) visible.push_back({u.position, u.side});

    const SectorBuckets buckets = sectorize(raw.position, visible);
    for (int k = 0; k < kNumSectors; ++k) {
        for (const auto& e : buckets[static_cast<std::size_t>(k)]) {
            const double v = unit_distance_value(e.distance, sight);
            const bool own = e.side == raw.side;
            block[(own ? kOwnSum : kEnemySum) + k] += v;
            double& mx = block[(own ? kOwnMax : kEnemyMax) + k];
            mx = std::max(mx, v);
        }
    }

    for (const Vec2& p : terrain_samples(raw, sight)) {
        const Vec2 offset = p - raw.position;
        const double d = offset.norm();
        if (d > sight) continue;
        double& t = block[kTerrain + sector_of(offset)];
        t = std::max(t, terrain_distance_value(d, sight));
    }
    return block;
}

Observation encode(const RawObservation& raw, const Observation* previous, std::optional<CombatAction> last_action) {
    using namespace obs_layout;
    Observation obs = Observation::Zero();
    const StateBlock current = encode_block(raw);
    obs.segment<kBlockSize>(kCurrent) = current;
    obs.segment<kBlockSize>(kPrevious) = previous ? StateBlock(previous->segment<kBlockSize>(kCurrent)) : current;
    if (last_action) obs[kLastAction + action_index(*last_action)] = 1.0;
    return obs;
}

}  // namespace microrl
