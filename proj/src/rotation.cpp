#include "esl/rotation.hpp"

#include "esl/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace esl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::gibbs_singularity: return "gibbs_singularity";
    case ErrorCode::axis_undefined: return "axis_undefined";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::not_differentiable: return "not_differentiable";
    case ErrorCode::boundary_singularity: return "boundary_singularity";
    case ErrorCode::gibbs_overflow: return "gibbs_overflow";
    case ErrorCode::parity_undetermined: return "parity_undetermined";
    case ErrorCode::parallel_axis: return "parallel_axis";
    case ErrorCode::theta_out_of_range: return "theta_out_of_range";
    case ErrorCode::period_too_small: return "period_too_small";
    case ErrorCode::trajectory_aborted: return "trajectory_aborted";
    case ErrorCode::series_too_short: return "series_too_short";
    case ErrorCode::too_many_samples: return "too_many_samples";
    case ErrorCode::schema_mismatch: return "schema_mismatch";
    case ErrorCode::io_error: return "io_error";
    }
    return "unknown";
}

std::string_view to_string(Representation rep) {
    switch (rep) {
    case Representation::axis_angle: return "axisangle";
    case Representation::euler_vector: return "euler";
    case Representation::modified_gibbs: return "modified_gibbs";
    case Representation::gibbs_vector: return "gibbs";
    case Representation::quaternion: return "quat";
    }
    return "unknown";
}

Representation representation_from_string(std::string_view name) {
    if (name == "axisangle") return Representation::axis_angle;
    if (name == "euler") return Representation::euler_vector;
    if (name == "modified_gibbs") return Representation::modified_gibbs;
    if (name == "gibbs") return Representation::gibbs_vector;
    if (name == "quat") return Representation::quaternion;
    throw Error(ErrorCode::invalid_argument, "unknown representation '" + std::string(name) + "'");
}

Vec3 rotate_point(const Vec3 &r, const AxisAngle &rot) {
    const double c = std::cos(rot.theta);
    const double s = std::sin(rot.theta);
    return r * c + rot.n * (dot(rot.n, r) * (1.0 - c)) + cross(rot.n, r) * s;
}

RotationMatrix matrix_from_axis_angle(const AxisAngle &rot) {
    const double c = std::cos(rot.theta);
    const double s = std::sin(rot.theta);
    const Vec3 &n = rot.n;
    RotationMatrix R;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R(i, j) = (1.0 - c) * n[i] * n[j];
    for (int i = 0; i < 3; ++i) R(i, i) += c;
    const Mat3 K = skew(n);
    for (int i = 0; i < 9; ++i) R.a[i] += s * K.a[i];
    return R;
}

RotationMatrix matrix_from_quaternion(const UnitQuaternion &q_in) {
    const double len = q_in.norm();
    const double w = q_in.m0 / len;
    const Vec3 m = q_in.m / len;
    RotationMatrix R;
    const double diag = w * w - dot(m, m);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R(i, j) = 2.0 * m[i] * m[j];
    for (int i = 0; i < 3; ++i) R(i, i) += diag;
    const Mat3 K = skew(m);
    for (int i = 0; i < 9; ++i) R.a[i] += 2.0 * w * K.a[i];
    return R;
}

RotationMatrix matrix_from_euler_vector(const Vec3 &e) {
    const double theta = norm(e);
    if (theta == 0.0) return RotationMatrix::identity();
    return matrix_from_axis_angle({e / theta, theta});
}

RotationMatrix matrix_from_gibbs(const Vec3 &g) {
    // (1, G) is a positive multiple of the quaternion (cos, n sin).
    return matrix_from_quaternion({1.0, g});
}

Composition compose_rotations(const AxisAngle &first, const AxisAngle &second) {
    const double c1 = std::cos(0.5 * first.theta);
    const double s1 = std::sin(0.5 * first.theta);
    const double c2 = std::cos(0.5 * second.theta);
    const double s2 = std::sin(0.5 * second.theta);
    const Vec3 &a1 = first.n;
    const Vec3 &a2 = second.n;

    const double c3 = c2 * c1 - dot(a2, a1) * s2 * s1;
    const Vec3 v = a2 * (s2 * c1) + a1 * (c2 * s1) + cross(a2, a1) * (s2 * s1);
    const double s3 = norm(v);

    Composition out;
    if (s3 <= 1e-15) {
        out.identity_composition = true;
        out.rotation = {placeholder_axis, 0.0};
        out.spinor_sign = c3 < 0.0 ? -1 : 1;
        return out;
    }
    out.rotation = {v / s3, 2.0 * std::atan2(s3, c3)};
    return out;
}

Vec3 gibbs_identity_residual(const Vec3 &A, const Vec3 &B, const Vec3 &C, const Vec3 &D) {
    return D * dot(A, cross(B, C)) - cross(B, C) * dot(A, D) - cross(C, A) * dot(B, D) -
           cross(A, B) * dot(C, D);
}

EulerVector to_euler_vector(const AxisAngle &rot) { return {rot.n * rot.theta}; }

ModifiedGibbs to_modified_gibbs(const AxisAngle &rot) { return {rot.n * std::sin(0.5 * rot.theta)}; }

GibbsVector to_gibbs(const AxisAngle &rot) {
    // Distance from theta to the nearest pi + 2*pi*k.
    const double off = std::remainder(rot.theta - pi, two_pi);
    if (std::abs(off) <= 1e-9)
        throw Error(ErrorCode::gibbs_singularity, "Gibbs vector is unbounded at theta = pi (mod 2 pi)");
    return {rot.n * std::tan(0.5 * rot.theta)};
}

UnitQuaternion to_quaternion(const AxisAngle &rot) {
    return {std::cos(0.5 * rot.theta), rot.n * std::sin(0.5 * rot.theta)};
}

namespace {

AxisAngle signed_by_reference(const Vec3 &axis, double theta, const ConversionContext &ctx) {
    if (ctx.reference_axis && dot(axis, *ctx.reference_axis) < 0.0) return {-axis, -theta};
    return {axis, theta};
}

[[noreturn]] void throw_axis_undefined() {
    throw Error(ErrorCode::axis_undefined, "rotation angle is a multiple of 2 pi and no reference axis was given");
}

} // namespace

AxisAngle axis_angle_from_euler(const EulerVector &e, const ConversionContext &ctx) {
    const double theta = norm(e.e);
    if (theta == 0.0) {
        if (!ctx.reference_axis) throw_axis_undefined();
        return {*ctx.reference_axis, 0.0};
    }
    return signed_by_reference(e.e / theta, theta, ctx);
}

AxisAngle axis_angle_from_gibbs(const GibbsVector &g, const ConversionContext &ctx) {
    const double t = norm(g.g);
    if (t == 0.0) {
        if (!ctx.reference_axis) throw_axis_undefined();
        return {*ctx.reference_axis, 0.0};
    }
    return signed_by_reference(g.g / t, 2.0 * std::atan(t), ctx);
}

AxisAngle axis_angle_from_quaternion(const UnitQuaternion &q, const ConversionContext &ctx) {
    const double s = norm(q.m);
    const int l = ctx.branch;
    const bool odd = (l % 2) != 0;
    // Half-angle on [0, pi] from the principal branch.
    const double half_p = std::atan2(s, q.m0);
    const double half = pi * l + (odd ? pi - half_p : half_p);
    if (s == 0.0) {
        if (!ctx.reference_axis) throw_axis_undefined();
        return {*ctx.reference_axis, 2.0 * half};
    }
    const Vec3 axis = q.m / s;
    return {odd ? -axis : axis, 2.0 * half};
}

AxisAngle axis_angle_from_modified_gibbs(const ModifiedGibbs &m, const ConversionContext &ctx) {
    const double s = norm(m.m);
    if (s > 1.0 + 1e-12)
        throw Error(ErrorCode::invalid_argument, "modified Gibbs vector longer than 1");
    const double m0 = std::sqrt(std::max(0.0, 1.0 - s * s));
    return axis_angle_from_quaternion({m0, m.m}, ctx);
}

Vec3 euler_restart(const Vec3 &e) {
    const double theta = norm(e);
    if (theta == 0.0) return e;
    return -(e / theta) * (two_pi - theta);
}

namespace {

AxisAngle to_axis_angle(const AnyRotation &in, const ConversionContext &ctx) {
    struct Visitor {
        const ConversionContext &ctx;
        AxisAngle operator()(const AxisAngle &a) const { return a; }
        AxisAngle operator()(const EulerVector &e) const { return axis_angle_from_euler(e, ctx); }
        AxisAngle operator()(const ModifiedGibbs &m) const { return axis_angle_from_modified_gibbs(m, ctx); }
        AxisAngle operator()(const GibbsVector &g) const { return axis_angle_from_gibbs(g, ctx); }
        AxisAngle operator()(const UnitQuaternion &q) const { return axis_angle_from_quaternion(q, ctx); }
    };
    return std::visit(Visitor{ctx}, in);
}

bool is_zero_rotation(const AnyRotation &in) {
    if (auto *e = std::get_if<EulerVector>(&in)) return norm(e->e) == 0.0;
    if (auto *m = std::get_if<ModifiedGibbs>(&in)) return norm(m->m) == 0.0;
    if (auto *g = std::get_if<GibbsVector>(&in)) return norm(g->g) == 0.0;
    return false;
}

} // namespace

AnyRotation convert(const AnyRotation &in, Representation target, const ConversionContext &ctx) {
    // Zero vectors map to zero vectors without needing an axis.
    if (target != Representation::axis_angle && is_zero_rotation(in)) {
        switch (target) {
        case Representation::euler_vector: return EulerVector{};
        case Representation::modified_gibbs: return ModifiedGibbs{};
        case Representation::gibbs_vector: return GibbsVector{};
        case Representation::quaternion: return UnitQuaternion{};
        case Representation::axis_angle: break;
        }
    }
    // Quaternion <-> modified Gibbs shares the vector part directly.
    if (auto *q = std::get_if<UnitQuaternion>(&in)) {
        if (target == Representation::quaternion) return *q;
        if (target == Representation::modified_gibbs) return ModifiedGibbs{q->m};
        if (target == Representation::gibbs_vector) {
            if (std::abs(q->m0) <= 1e-9 * q->norm())
                throw Error(ErrorCode::gibbs_singularity, "Gibbs vector is unbounded at theta = pi (mod 2 pi)");
            return GibbsVector{q->m / q->m0};
        }
    }
    const AxisAngle aa = to_axis_angle(in, ctx);
    switch (target) {
    case Representation::axis_angle: return aa;
    case Representation::euler_vector: return to_euler_vector(aa);
    case Representation::modified_gibbs: return to_modified_gibbs(aa);
    case Representation::gibbs_vector: return to_gibbs(aa);
    case Representation::quaternion: return to_quaternion(aa);
    }
    throw Error(ErrorCode::invalid_argument, "unknown target representation");
}

GeneralizedRep euler_rep() {
    GeneralizedRep rep;
    rep.f = [](double t) { return t; };
    rep.f_prime = [](double) { return 1.0; };
    rep.f_inverse = [](double x) { return x; };
    rep.inverse_limit = std::numeric_limits<double>::infinity();
    rep.f_prime_at_0 = 1.0;
    rep.f_third_at_0 = 0.0;
    return rep;
}

GeneralizedRep modified_gibbs_rep() {
    GeneralizedRep rep;
    rep.f = [](double t) { return std::sin(0.5 * t); };
    rep.f_prime = [](double t) { return 0.5 * std::cos(0.5 * t); };
    rep.f_inverse = [](double x) { return 2.0 * std::asin(std::min(x, 1.0)); };
    rep.inverse_limit = 1.0;
    rep.f_prime_at_0 = 0.5;
    rep.f_third_at_0 = -0.125;
    return rep;
}

GeneralizedRep gibbs_rep() {
    GeneralizedRep rep;
    rep.f = [](double t) { return std::tan(0.5 * t); };
    rep.f_prime = [](double t) {
        const double tn = std::tan(0.5 * t);
        return 0.5 * (1.0 + tn * tn);
    };
    rep.f_inverse = [](double x) { return 2.0 * std::atan(x); };
    rep.inverse_limit = std::numeric_limits<double>::infinity();
    rep.f_prime_at_0 = 0.5;
    rep.f_third_at_0 = 0.25;
    return rep;
}

bool validate(const GeneralizedRep &rep) {
    if (!rep.f || !rep.f_prime || !rep.f_inverse) return false;
    if (std::abs(rep.f(0.0)) > 1e-15 || !(rep.f_prime_at_0 > 0.0)) return false;
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
        const double fp = rep.f(x);
        const double fm = rep.f(-x);
        if (std::abs(fp + fm) > 1e-12 * (1.0 + std::abs(fp))) return false;
    }
    return true;
}

} // namespace esl
