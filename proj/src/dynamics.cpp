#include "esl/dynamics.hpp"

#include "esl/error.hpp"

#include <cmath>
#include <limits>

namespace esl {

namespace {

/// Distance from theta to the nearest 2*pi*k with k != 0, or +inf when the
/// nearest multiple is zero.
double distance_to_boundary(double theta) {
    const double k = std::round(theta / two_pi);
    if (k == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(theta - k * two_pi);
}

Vec3 v3(const double *p) { return {p[0], p[1], p[2]}; }

} // namespace

double euler_middle_coefficient(double theta) {
    const double t2 = theta * theta;
    if (std::abs(theta) < 1e-2) return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    const double half = 0.5 * theta;
    const double g = half * std::cos(half) / std::sin(half);
    return (1.0 - g) / t2;
}

Vec3 rhs_generalized(const Vec3 &F, const Vec3 &omega, const GeneralizedRep &rep, std::optional<double> theta_hint) {
    const double fnorm = norm(F);
    double theta = 0.0;
    if (theta_hint) {
        theta = *theta_hint;
    } else {
        if (fnorm > rep.inverse_limit)
            throw Error(ErrorCode::out_of_range, "|F| outside the invertible range of f");
        theta = rep.f_inverse(fnorm);
    }
    if (distance_to_boundary(theta) <= euler_boundary_guard)
        throw Error(ErrorCode::boundary_singularity, "theta at a non-zero multiple of 2*pi");

    const double fp = rep.f_prime(theta);
    double coef = 0.0;
    if (std::abs(theta) < 1e-3) {
        const double f1 = rep.f_prime_at_0;
        coef = (f1 / 12.0 + rep.f_third_at_0 / 3.0) / (f1 * f1);
    } else {
        const double f = rep.f(theta);
        const double half = 0.5 * theta;
        coef = (fp - 0.5 * f * std::cos(half) / std::sin(half)) / (f * f);
    }
    const double fsq = dot(F, F);
    return omega * fp - (omega * fsq - F * dot(omega, F)) * coef + 0.5 * cross(omega, F);
}

Vec3 rhs_euler_vector(const Vec3 &E, const Vec3 &omega) {
    const double theta = norm(E);
    if (distance_to_boundary(theta) <= euler_boundary_guard)
        throw Error(ErrorCode::boundary_singularity, "|E| at a non-zero multiple of 2*pi");
    // The two factors of the middle term are kept together: one diverges at the
    // boundary while the other vanishes on the true solution.
    const double c = euler_middle_coefficient(theta);
    return omega - (omega * (theta * theta) - E * dot(omega, E)) * c + 0.5 * cross(omega, E);
}

QuaternionRate rhs_quaternion(const UnitQuaternion &q, const Vec3 &omega) {
    return {-0.5 * dot(omega, q.m), 0.5 * q.m0 * omega + 0.5 * cross(omega, q.m)};
}

Vec3 rhs_gibbs(const Vec3 &G, const Vec3 &omega) {
    return 0.5 * omega + 0.5 * dot(omega, G) * G + 0.5 * cross(omega, G);
}

double divergence_gibbs(const Vec3 &G, const Vec3 &omega) { return 2.0 * dot(omega, G); }

AxisAngleRate rhs_axis_angle(const Vec3 &n, double theta, const Vec3 &omega) {
    const double s = std::sin(0.5 * theta);
    if (std::abs(s) < axis_angle_guard) throw Error(ErrorCode::boundary_singularity, "sin(theta/2) = 0");
    const double wn = dot(omega, n);
    const double cot = std::cos(0.5 * theta) / s;
    return {(omega - n * wn) * (0.5 * cot) + 0.5 * cross(omega, n), wn};
}

Mat3 rhs_rotation_matrix(const Mat3 &R, const Vec3 &omega) { return skew(omega) * R; }

namespace {

struct Stepper {
    const OmegaModel &omega;
    const IntegrateOptions &opt;
    TrajectoryMeta &meta;

    StateN<4> quaternion_step(double t, const StateN<4> &y, double dt) const {
        auto f = [&](double tt, const StateN<4> &s) {
            const auto r = rhs_quaternion({s[0], v3(&s[1])}, omega.eval(tt));
            return StateN<4>{r.dm0, r.dm.x, r.dm.y, r.dm.z};
        };
        StateN<4> out = rk4_step<4>(f, t, y, dt);
        const double nrm = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2] + out[3] * out[3]);
        const double drift = std::abs(nrm - 1.0);
        meta.norm_drift_total += drift;
        meta.norm_drift_max = std::max(meta.norm_drift_max, drift);
        if (opt.renormalize_quaternion)
            for (double &v : out) v /= nrm;
        return out;
    }

    StateN<3> euler_step(double t, const StateN<3> &y, double dt) const {
        const double band = std::max(opt.euler_bridge_band, euler_boundary_guard);
        auto f = [&](double tt, const StateN<3> &s) {
            const Vec3 E = v3(s.data());
            if (distance_to_boundary(norm(E)) <= band)
                throw Error(ErrorCode::boundary_singularity, "|E| at a non-zero multiple of 2*pi");
            const Vec3 r = rhs_euler_vector(E, omega.eval(tt));
            return StateN<3>{r.x, r.y, r.z};
        };
        try {
            return rk4_step<3>(f, t, y, dt);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::boundary_singularity || !opt.euler_bridge) throw;
        }
        return euler_bridge_step(t, y, dt);
    }

    // Steps through the boundary in quaternion form, then picks the Euler
    // vector on the neighbouring branches that is closest to the current one.
    StateN<3> euler_bridge_step(double t, const StateN<3> &y, double dt) const {
        ++meta.bridge_steps;
        const Vec3 E = v3(y.data());
        const double theta = norm(E);
        const Vec3 n = E / theta;
        const double s = std::sin(0.5 * theta);
        const StateN<4> q = quaternion_step(t, {std::cos(0.5 * theta), n.x * s, n.y * s, n.z * s}, dt);
        const UnitQuaternion q1{q[0], v3(&q[1])};
        const int lc = static_cast<int>(std::floor(theta / two_pi));
        Vec3 best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int l = lc - 1; l <= lc + 1; ++l) {
            ConversionContext ctx;
            ctx.branch = l;
            ctx.reference_axis = n;
            const AxisAngle aa = axis_angle_from_quaternion(q1, ctx);
            const Vec3 cand = aa.n * aa.theta;
            const double d = norm(cand - E);
            if (d < best_dist) {
                best_dist = d;
                best = cand;
            }
        }
        return {best.x, best.y, best.z};
    }

    StateN<3> gibbs_step(double t, const StateN<3> &y, double dt) const {
        auto f = [&](double tt, const StateN<3> &s) {
            const Vec3 r = rhs_gibbs(v3(s.data()), omega.eval(tt));
            return StateN<3>{r.x, r.y, r.z};
        };
        StateN<3> out = rk4_step<3>(f, t, y, dt);
        const Vec3 G = v3(out.data());
        if (!is_finite(G) || norm(G) > opt.gibbs_overflow)
            throw Error(ErrorCode::gibbs_overflow, "|G| exceeded the overflow limit");
        return out;
    }

    StateN<4> axis_angle_step(double t, const StateN<4> &y, double dt) const {
        auto f = [&](double tt, const StateN<4> &s) {
            const auto r = rhs_axis_angle(v3(s.data()), s[3], omega.eval(tt));
            return StateN<4>{r.dn.x, r.dn.y, r.dn.z, r.dtheta};
        };
        StateN<4> out = rk4_step<4>(f, t, y, dt);
        const double nn = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
        for (int i = 0; i < 3; ++i) out[i] /= nn;
        return out;
    }
};

template <std::size_t N, class Step>
void run(Trajectory &traj, StateN<N> y, double t0, double dt, std::size_t count, Step &&step) {
    traj.reserve(count);
    traj.push_back(t0, y);
    for (std::size_t k = 1; k < count; ++k) {
        const double t = t0 + static_cast<double>(k - 1) * dt;
        try {
            y = step(t, y, dt);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::boundary_singularity && e.code() != ErrorCode::gibbs_overflow) throw;
            auto &meta = traj.meta();
            meta.aborted = true;
            meta.abort_time = t;
            meta.abort_code = e.code();
            meta.abort_reason = e.what();
            return;
        }
        traj.push_back(t0 + static_cast<double>(k) * dt, y);
    }
}

} // namespace

Trajectory integrate(Representation rep, const AnyRotation &initial, const OmegaModel &omega, double t0,
                     double t_end, double dt, const IntegrateOptions &options) {
    const std::size_t count = grid_count(t0, t_end, dt);
    TrajectoryMeta meta;
    meta.omega = omega.describe();
    meta.t0 = t0;
    meta.t_end = t_end;
    meta.dt = dt;
    Trajectory traj(rep, meta);
    Stepper st{omega, options, traj.meta()};

    switch (rep) {
    case Representation::euler_vector: {
        const Vec3 e = std::get<EulerVector>(convert(initial, rep)).e;
        run<3>(traj, {e.x, e.y, e.z}, t0, dt, count,
               [&](double t, const StateN<3> &y, double h) { return st.euler_step(t, y, h); });
        break;
    }
    case Representation::quaternion: {
        const auto q = std::get<UnitQuaternion>(convert(initial, rep));
        StateN<4> y{q.m0, q.m.x, q.m.y, q.m.z};
        if (options.renormalize_quaternion) {
            const double nq = q.norm();
            for (double &v : y) v /= nq;
        }
        run<4>(traj, y, t0, dt, count,
               [&](double t, const StateN<4> &s, double h) { return st.quaternion_step(t, s, h); });
        break;
    }
    case Representation::gibbs_vector: {
        const Vec3 g = std::get<GibbsVector>(convert(initial, rep)).g;
        run<3>(traj, {g.x, g.y, g.z}, t0, dt, count,
               [&](double t, const StateN<3> &y, double h) { return st.gibbs_step(t, y, h); });
        break;
    }
    case Representation::axis_angle: {
        const auto aa = std::get<AxisAngle>(convert(initial, rep));
        run<4>(traj, {aa.n.x, aa.n.y, aa.n.z, aa.theta}, t0, dt, count,
               [&](double t, const StateN<4> &y, double h) { return st.axis_angle_step(t, y, h); });
        break;
    }
    case Representation::modified_gibbs:
        throw Error(ErrorCode::invalid_argument, "integrate the quaternion form instead of the modified Gibbs vector");
    }
    return traj;
}

std::vector<Mat3> integrate_rotation_matrix(const Mat3 &R0, const OmegaModel &omega, double t0, double t_end,
                                            double dt) {
    const std::size_t count = grid_count(t0, t_end, dt);
    std::vector<Mat3> out;
    out.reserve(count);
    out.push_back(R0);
    auto f = [&](double t, const StateN<9> &s) {
        Mat3 R;
        R.a = s;
        return rhs_rotation_matrix(R, omega.eval(t)).a;
    };
    StateN<9> y = R0.a;
    for (std::size_t k = 1; k < count; ++k) {
        y = rk4_step<9>(f, t0 + static_cast<double>(k - 1) * dt, y, dt);
        Mat3 R;
        R.a = y;
        out.push_back(R);
    }
    return out;
}

} // namespace esl
