#include "esl/closed_form.hpp"

#include "esl/error.hpp"

#include <algorithm>
#include <cmath>

namespace esl {

namespace {

Vec3 require_unit(const Vec3 &v, const char *what) {
    const double n = norm(v);
    if (!(n > 0.0) || !is_finite(v)) throw Error(ErrorCode::invalid_argument, std::string(what) + " must be non-zero");
    return v / n;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

UnitQuaternion multiply(const UnitQuaternion &p, const UnitQuaternion &q) {
    return {p.m0 * q.m0 - dot(p.m, q.m), p.m * q.m0 + q.m * p.m0 + cross(p.m, q.m)};
}

} // namespace

SpinorSolution spinor_params(const Vec3 &n0_in, double theta0, const Vec3 &omega_in) {
    if (!(theta0 > 0.0 && theta0 < two_pi))
        throw Error(ErrorCode::theta_out_of_range, "theta0 must lie in (0, 2*pi)");
    const Vec3 n0 = require_unit(n0_in, "n0");
    const Vec3 w = require_unit(omega_in, "omega_hat");
    const double wn = dot(w, n0);
    if (std::abs(wn) >= 1.0 - 1e-12) throw Error(ErrorCode::parallel_axis, "n0 is parallel to omega");

    SpinorSolution s;
    s.n0 = n0;
    s.theta0 = theta0;
    s.omega_hat = w;
    const double ch = std::cos(0.5 * theta0), sh = std::sin(0.5 * theta0);
    s.a = std::sqrt(1.0 - (1.0 - wn * wn) * sh * sh);
    s.cos_b = clamp_unit(ch / s.a);
    s.sin_b = clamp_unit(wn / s.a * sh);
    s.b = std::atan2(s.sin_b, s.cos_b);
    s.u1 = normalized(w - n0 * wn);
    s.u2 = cross(s.u1, n0);
    s.u = s.u1 * ch + s.u2 * sh;
    s.k = wn / s.a;
    // sqrt(1 - k^2) equals |cos(theta0/2)| sqrt(1 - wn^2) / a; the sign of
    // cos(theta0/2) has to be kept for theta0 > pi.
    const double r = std::copysign(std::sqrt(std::max(0.0, 1.0 - s.k * s.k)), ch);
    s.e1 = n0 * r - s.u * s.k;
    s.e2 = n0 * s.k + s.u * r;
    return s;
}

double spinor_theta(const SpinorSolution &sol, double t) {
    return 2.0 * std::acos(clamp_unit(sol.a * std::cos(0.5 * t + sol.b)));
}

Vec3 spinor_axis(const SpinorSolution &sol, double t) {
    const double ph = 0.5 * t + sol.b;
    const Vec3 p = sol.e1 * std::cos(ph) + sol.e2 * (std::sin(ph) / std::sqrt(1.0 - sol.a * sol.a));
    return normalized(p);
}

AxisAngle spinor_state(const SpinorSolution &sol, double t) { return {spinor_axis(sol, t), spinor_theta(sol, t)}; }

Vec3 spinor_euler_vector(const SpinorSolution &sol, double t) { return spinor_axis(sol, t) * spinor_theta(sol, t); }

Propagation exact_propagate(const AxisAngle &initial, std::span<const OmegaSegment> segments) {
    Propagation out;
    out.rotation = initial;
    UnitQuaternion spinor = to_quaternion(initial);
    bool composed = false;
    for (const auto &seg : segments) {
        const double speed = norm(seg.omega);
        if (speed == 0.0 || seg.duration == 0.0) continue;
        const AxisAngle step{seg.omega / speed, speed * seg.duration};
        const Composition c = compose_rotations(out.rotation, step);
        out.rotation = c.rotation;
        out.identity_composition = c.identity_composition;
        spinor = multiply(to_quaternion(step), spinor);
        composed = true;
    }
    // Nothing composed: the initial rotation comes back untouched.
    if (!composed) return out;
    const UnitQuaternion reduced = to_quaternion(out.rotation);
    const double d = spinor.m0 * reduced.m0 + dot(spinor.m, reduced.m);
    out.spinor_sign = d < 0.0 ? -1 : 1;
    return out;
}

} // namespace esl
