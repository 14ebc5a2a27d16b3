// Right-hand sides of the rotation ODEs and a fixed-step RK4 integrator.
#pragma once

#include "esl/omega.hpp"
#include "esl/rotation.hpp"
#include "esl/trajectory.hpp"

#include <array>
#include <cstddef>
#include <optional>

namespace esl {

/// Half-width of the band around |E| = 2*pi*k (k >= 1) where the Euler vector
/// right-hand side refuses to evaluate.
inline constexpr double euler_boundary_guard = 1e-8;
/// |sin(theta/2)| below which the axis/angle right-hand side refuses to evaluate.
inline constexpr double axis_angle_guard = 1e-8;
/// |G| above which Gibbs integration stops.
inline constexpr double gibbs_overflow_limit = 1e6;

/// (1 - g(theta))/theta^2 with g(theta) = (theta/2) cot(theta/2).
double euler_middle_coefficient(double theta);

/// F' for F = n f(theta). theta_hint selects the branch of f^{-1}; when absent
/// theta is recovered from |F| on [0, rep.inverse_limit].
Vec3 rhs_generalized(const Vec3 &F, const Vec3 &omega, const GeneralizedRep &rep,
                     std::optional<double> theta_hint = std::nullopt);

Vec3 rhs_euler_vector(const Vec3 &E, const Vec3 &omega);

struct QuaternionRate {
    double dm0 = 0.0;
    Vec3 dm;
};
QuaternionRate rhs_quaternion(const UnitQuaternion &q, const Vec3 &omega);

Vec3 rhs_gibbs(const Vec3 &G, const Vec3 &omega);

/// 2 omega.G
double divergence_gibbs(const Vec3 &G, const Vec3 &omega);

struct AxisAngleRate {
    Vec3 dn;
    double dtheta = 0.0;
};
AxisAngleRate rhs_axis_angle(const Vec3 &n, double theta, const Vec3 &omega);

/// [omega]x R: each column of R is a body vector moving with velocity omega x r.
Mat3 rhs_rotation_matrix(const Mat3 &R, const Vec3 &omega);

template <std::size_t N> using StateN = std::array<double, N>;

/// One classic RK4 step of y' = f(t, y).
template <std::size_t N, class F> StateN<N> rk4_step(F &&f, double t, const StateN<N> &y, double dt) {
    auto axpy = [](const StateN<N> &a, double s, const StateN<N> &b) {
        StateN<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const StateN<N> k1 = f(t, y);
    const StateN<N> k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const StateN<N> k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const StateN<N> k4 = f(t + dt, axpy(y, dt, k3));
    StateN<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

struct IntegrateOptions {
    /// Euler vector steps whose stages come within this distance of |E| = 2*pi*k
    /// are taken in quaternion form instead. Must be at least the guard.
    double euler_bridge_band = euler_boundary_guard;
    /// When false a boundary hit aborts the Euler run instead of bridging.
    bool euler_bridge = true;
    bool renormalize_quaternion = true;
    double gibbs_overflow = gibbs_overflow_limit;
};

/// Fixed-step RK4 from t0 to t_end on the grid t0 + k*dt. The initial rotation
/// is converted into `rep` first. Singular aborts (boundary_singularity,
/// gibbs_overflow) end the trajectory early and are recorded in its metadata
/// rather than thrown.
Trajectory integrate(Representation rep, const AnyRotation &initial, const OmegaModel &omega, double t0,
                     double t_end, double dt, const IntegrateOptions &options = {});

/// RK4 on R' = [omega]x R without re-orthogonalisation. Returns R at every
/// grid point.
std::vector<Mat3> integrate_rotation_matrix(const Mat3 &R0, const OmegaModel &omega, double t0, double t_end,
                                            double dt);

struct ContinuationOptions {
    /// Angle at t0. Selects the starting branch; required to start anywhere but
    /// the principal branch [0, 2*pi].
    std::optional<double> initial_theta;
    /// A grid minimum of |m| is refined when below this value.
    double candidate_threshold = 0.05;
    /// A refined minimum of |m| counts as a zero when below this value.
    double zero_threshold = 1e-6;
    /// Derivative orders 0..4 count as non-vanishing above this norm.
    double derivative_threshold = 1e-6;
};

/// Continuous (n, theta) from a quaternion trajectory. Between zeros of |m|
/// the angle stays on one branch [2*pi*l, 2*pi*(l+1)]; at each zero the branch
/// crosses or reflects according to the order of the first non-vanishing
/// derivative of omega, and n takes the one-sided limit.
Trajectory continue_axis_angle(const Trajectory &qtraj, const OmegaModel &omega, const ContinuationOptions &options = {});

} // namespace esl
