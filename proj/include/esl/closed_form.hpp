// Exact solutions for constant angular-velocity direction.
#pragma once

#include "esl/rotation.hpp"
#include "esl/vec3.hpp"

#include <span>
#include <utility>

namespace esl {

/// Closed-form axis/angle motion under unit constant omega_hat, starting from
/// (n0, theta0) at t = 0:
///   theta(t) = 2 acos(a cos(t/2 + b))
///   n(t) = p/|p|, p(t) = e1 cos(t/2 + b) + e2 (1 - a^2)^(-1/2) sin(t/2 + b)
struct SpinorSolution {
    double a = 1.0;
    double b = 0.0;
    double cos_b = 1.0;
    double sin_b = 0.0;
    /// omega_hat . n0 / a
    double k = 0.0;
    Vec3 e1, e2;
    Vec3 u, u1, u2;
    Vec3 n0;
    double theta0 = 0.0;
    Vec3 omega_hat;
};

/// Throws parallel_axis when |omega_hat . n0| >= 1 - 1e-12 and
/// theta_out_of_range unless 0 < theta0 < 2*pi.
SpinorSolution spinor_params(const Vec3 &n0, double theta0, const Vec3 &omega_hat);

double spinor_theta(const SpinorSolution &sol, double t);
Vec3 spinor_axis(const SpinorSolution &sol, double t);
AxisAngle spinor_state(const SpinorSolution &sol, double t);
/// n(t) * theta(t)
Vec3 spinor_euler_vector(const SpinorSolution &sol, double t);

/// Constant omega held for `duration`.
struct OmegaSegment {
    Vec3 omega;
    double duration = 0.0;
};

struct Propagation {
    /// Net rotation with theta in [0, 2*pi).
    AxisAngle rotation;
    bool identity_composition = false;
    /// Sign of the accumulated unit quaternion relative to
    /// (cos(theta/2), n sin(theta/2)) of `rotation`: -1 after an odd number of
    /// net 2*pi turns.
    int spinor_sign = 1;
};

/// Folds Rodrigues composition over the segments, each a rotation by
/// |omega|*duration about omega, applied after the initial rotation.
Propagation exact_propagate(const AxisAngle &initial, std::span<const OmegaSegment> segments);

} // namespace esl
