// Shared helpers for the unit tests.
#pragma once

#include "esl/rotation.hpp"
#include "esl/vec3.hpp"

#include <random>

namespace esl::test {

inline Vec3 random_unit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 v{g(rng), g(rng), g(rng)};
        if (norm(v) > 1e-3) return normalized(v);
    }
}

inline Vec3 random_vec(std::mt19937_64 &rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double max_abs(const Vec3 &v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }

/// Independent axis/angle extraction from a rotation matrix (trace for the
/// angle, skew part for the axis). Valid for 0 < theta < pi.
inline AxisAngle axis_angle_from_matrix(const Mat3 &R) {
    const double c = std::clamp(0.5 * (R(0, 0) + R(1, 1) + R(2, 2) - 1.0), -1.0, 1.0);
    const Vec3 s{R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)};
    return {normalized(s), std::acos(c)};
}

} // namespace esl::test
