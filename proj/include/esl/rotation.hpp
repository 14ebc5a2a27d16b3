// Exact rotation algebra: Rodrigues rotation and composition, conversions
// between the axis/angle family of representations, and the four-vector
// identity of Gibbs.
#pragma once

#include "esl/vec3.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <string_view>
#include <variant>

namespace esl {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Axis and angle with the angle unbounded in sign and magnitude, so that a
/// continuously evolving rotation can be followed across multiples of 2*pi.
struct AxisAngle {
    Vec3 n{0.0, 0.0, 1.0};
    double theta = 0.0;
};

/// E = n * theta.
struct EulerVector {
    Vec3 e;
};

/// M = n * sin(theta/2). Only meaningful as a three-vector for |theta| <= pi;
/// use UnitQuaternion beyond that.
struct ModifiedGibbs {
    Vec3 m;
};

/// G = n * tan(theta/2). Singular at theta = pi.
struct GibbsVector {
    Vec3 g;
};

/// (m0, m) = (cos(theta/2), n sin(theta/2)).
struct UnitQuaternion {
    double m0 = 1.0;
    Vec3 m;

    double norm() const { return std::sqrt(m0 * m0 + dot(m, m)); }
};

using RotationMatrix = Mat3;

enum class Representation { axis_angle, euler_vector, modified_gibbs, gibbs_vector, quaternion };

std::string_view to_string(Representation rep);
Representation representation_from_string(std::string_view name);

using AnyRotation = std::variant<AxisAngle, EulerVector, ModifiedGibbs, GibbsVector, UnitQuaternion>;

/// Extra information for conversions into AxisAngle.
struct ConversionContext {
    /// Branch index l selecting theta in [2*pi*l, 2*pi*(l+1)] when converting
    /// from a quaternion.
    int branch = 0;
    /// Previous axis. Resolves the axis when sin(theta/2) = 0 and picks the
    /// sign of (n, theta) for Euler vectors.
    std::optional<Vec3> reference_axis;
};

/// Axis used when the net rotation is the identity and no axis exists.
inline constexpr Vec3 placeholder_axis = axes::k;

Vec3 rotate_point(const Vec3 &r, const AxisAngle &rot);

RotationMatrix matrix_from_axis_angle(const AxisAngle &rot);
RotationMatrix matrix_from_quaternion(const UnitQuaternion &q);
RotationMatrix matrix_from_euler_vector(const Vec3 &e);
RotationMatrix matrix_from_gibbs(const Vec3 &g);

struct Composition {
    /// Net rotation with theta in [0, 2*pi).
    AxisAngle rotation;
    /// True when the net rotation is the identity; the axis is then the
    /// placeholder.
    bool identity_composition = false;
    /// Sign of the composed unit quaternion relative to
    /// (cos(theta/2), n sin(theta/2)). Only -1 for a composition that lands on
    /// the identity through a full 2*pi turn.
    int spinor_sign = 1;
};

/// Rodrigues composition: applying `first` and then `second` equals applying
/// the result.
Composition compose_rotations(const AxisAngle &first, const AxisAngle &second);

/// D(A.(BxC)) - BxC(A.D) - CxA(B.D) - AxB(C.D); zero up to rounding.
Vec3 gibbs_identity_residual(const Vec3 &A, const Vec3 &B, const Vec3 &C, const Vec3 &D);

AnyRotation convert(const AnyRotation &in, Representation target, const ConversionContext &ctx = {});

// Typed conversions backing `convert`.
EulerVector to_euler_vector(const AxisAngle &rot);
ModifiedGibbs to_modified_gibbs(const AxisAngle &rot);
GibbsVector to_gibbs(const AxisAngle &rot);
UnitQuaternion to_quaternion(const AxisAngle &rot);

AxisAngle axis_angle_from_euler(const EulerVector &e, const ConversionContext &ctx = {});
AxisAngle axis_angle_from_modified_gibbs(const ModifiedGibbs &m, const ConversionContext &ctx = {});
AxisAngle axis_angle_from_gibbs(const GibbsVector &g, const ConversionContext &ctx = {});
/// Angle from 2*atan2(|m|, m0), placed on the requested branch.
AxisAngle axis_angle_from_quaternion(const UnitQuaternion &q, const ConversionContext &ctx = {});

/// Same physical rotation with the axis flipped and the angle replaced by
/// 2*pi - |E|. Used to restart an Euler vector integration away from 2*pi.
Vec3 euler_restart(const Vec3 &e);

/// Odd scalar function f defining F = n f(theta).
struct GeneralizedRep {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
    /// Inverse of f on [0, inverse_limit].
    std::function<double(double)> f_inverse;
    double inverse_limit = 0.0;
    double f_prime_at_0 = 1.0;
    double f_third_at_0 = 0.0;
};

/// f(theta) = theta.
GeneralizedRep euler_rep();
/// f(theta) = sin(theta/2).
GeneralizedRep modified_gibbs_rep();
/// f(theta) = tan(theta/2).
GeneralizedRep gibbs_rep();

/// Checks f(0) = 0, f'(0) > 0 and oddness on a few sample points.
bool validate(const GeneralizedRep &rep);

} // namespace esl
