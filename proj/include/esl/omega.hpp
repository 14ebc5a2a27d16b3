// Angular-velocity models omega(t) and the quadratures built on them.
#pragma once

#include "esl/vec3.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace esl {

class OmegaModel;

struct ConstantOmega {
    Vec3 w;
};

/// amplitude * (cos(alpha t), sin(alpha t), 0); period 2*pi/alpha.
struct RotatingPlaneOmega {
    double alpha = 0.0;
    double amplitude = 1.0;
};

/// 3t^2 (i sin(1/t) + j cos(1/t)) + t (-i cos(1/t) + j sin(1/t)) for t > 0,
/// pinned to zero at t = 0. Its integral is t^3 (sin(1/t), cos(1/t), 0).
struct PathologicalOmega {};

/// Natural cubic spline through (t, omega) samples.
class TabulatedOmega {
public:
    TabulatedOmega(std::vector<double> times, std::vector<Vec3> values);

    Vec3 eval(double t) const;
    double t_front() const { return times_.front(); }
    double t_back() const { return times_.back(); }
    const std::vector<double> &times() const { return times_; }
    const std::vector<Vec3> &values() const { return values_; }

private:
    std::vector<double> times_;
    std::vector<Vec3> values_;
    std::vector<Vec3> second_; // spline second derivatives at the knots
};

/// -inner(t1 - t): the angular velocity that replays `inner` backwards from t1.
struct ReversedOmega {
    std::shared_ptr<const OmegaModel> inner;
    double t1 = 0.0;
};

class OmegaModel {
public:
    using Kind = std::variant<ConstantOmega, RotatingPlaneOmega, PathologicalOmega, TabulatedOmega, ReversedOmega>;

    static OmegaModel constant(const Vec3 &w);
    /// Unit-amplitude rotation in the x-y plane with the given period.
    static OmegaModel rotating_plane(double period, double amplitude = 1.0);
    static OmegaModel pathological();
    static OmegaModel tabulated(std::vector<double> times, std::vector<Vec3> values);
    static OmegaModel reversed(const OmegaModel &inner, double t1);
    /// Samples `model` on an even grid of `count` points over [t0, t1].
    static OmegaModel tabulate(const OmegaModel &model, double t0, double t1, std::size_t count);

    /// Parses the command-line form: const:x,y,z | rotplane:T[,amp] |
    /// pathological | csv:PATH.
    static OmegaModel from_spec(const std::string &spec);

    const Kind &kind() const { return kind_; }
    /// Round-trippable description (the spec string where one exists).
    std::string describe() const;

    Vec3 eval(double t) const;

private:
    explicit OmegaModel(Kind k, std::string spec = {}) : kind_(std::move(k)), spec_(std::move(spec)) {}

    Kind kind_;
    std::string spec_;
};

Vec3 omega_eval(const OmegaModel &model, double t);

/// omega and its derivatives of orders 0..max_order (max_order <= 4).
/// Analytic except for tabulated models, which use central differences.
std::vector<Vec3> omega_derivatives(const OmegaModel &model, double t, int max_order);

/// Integral of |omega| over [t0, t] by adaptive Simpson quadrature.
double arc_time(const OmegaModel &model, double t0, double t);

/// Componentwise integral of omega over [t0, t].
Vec3 integrated_omega(const OmegaModel &model, double t0, double t);

/// Reads a CSV with header `t,wx,wy,wz` and at least four rows.
OmegaModel load_tabulated_csv(const std::filesystem::path &path);

} // namespace esl
