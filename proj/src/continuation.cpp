#include "esl/dynamics.hpp"

#include "esl/error.hpp"

#include <cmath>
#include <limits>

namespace esl {

namespace {

struct Zero {
    double t = 0.0;
    double m0 = 1.0; // sign of the scalar part at the zero
};

/// Cubic Hermite interpolation of the quaternion trajectory on one interval.
class QuaternionSpline {
public:
    QuaternionSpline(const Trajectory &q, const OmegaModel &omega) : q_(q), omega_(omega) {}

    /// m(t) on [t_k, t_{k+1}], t = t_k + s*dt.
    UnitQuaternion at(std::size_t k, double s) const {
        const double h = q_.time(k + 1) - q_.time(k);
        const auto a = q_.quaternion(k), b = q_.quaternion(k + 1);
        const auto da = rate(k), db = rate(k + 1);
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        UnitQuaternion out;
        out.m0 = h00 * a.m0 + h10 * h * da.dm0 + h01 * b.m0 + h11 * h * db.dm0;
        out.m = h00 * a.m + h10 * h * da.dm + h01 * b.m + h11 * h * db.dm;
        return out;
    }

private:
    QuaternionRate rate(std::size_t k) const { return rhs_quaternion(q_.quaternion(k), omega_.eval(q_.time(k))); }

    const Trajectory &q_;
    const OmegaModel &omega_;
};

/// Minimum of |m| over interval k by golden-section search. Returns (s, |m|).
std::pair<double, double> interval_minimum(const QuaternionSpline &sp, std::size_t k) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    auto f = [&](double s) { return norm(sp.at(k, s).m); };
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    double s = 0.5 * (lo + hi), fs = f(s);
    // The minimum may sit on an end of the interval.
    if (const double f0 = f(0.0); f0 < fs) s = 0.0, fs = f0;
    if (const double f1e = f(1.0); f1e < fs) s = 1.0, fs = f1e;
    return {s, fs};
}

std::vector<Zero> find_zeros(const Trajectory &q, const OmegaModel &omega, const ContinuationOptions &opt) {
    const std::size_t n = q.size();
    std::vector<double> mn(n);
    for (std::size_t k = 0; k < n; ++k) mn[k] = norm(q.quaternion(k).m);
    const QuaternionSpline sp(q, omega);

    std::vector<Zero> zeros;
    for (std::size_t k = 0; k < n; ++k) {
        if (mn[k] >= opt.candidate_threshold) continue;
        if (k > 0 && mn[k] > mn[k - 1]) continue;
        if (k + 1 < n && mn[k] > mn[k + 1]) continue;
        double best_t = q.time(k), best = mn[k];
        std::size_t best_iv = k;
        for (std::size_t iv : {k - 1, k}) {
            if (iv + 1 >= n || (k == 0 && iv != k)) continue;
            const auto [s, v] = interval_minimum(sp, iv);
            if (v < best) {
                best = v;
                best_t = q.time(iv) + s * (q.time(iv + 1) - q.time(iv));
                best_iv = iv;
            }
        }
        if (best >= opt.zero_threshold) continue;
        if (!zeros.empty() && best_t - zeros.back().t < 0.5 * q.meta().dt) continue;
        const double s = best_iv + 1 < n ? (best_t - q.time(best_iv)) / (q.time(best_iv + 1) - q.time(best_iv)) : 0.0;
        const double m0 = best_iv + 1 < n ? sp.at(best_iv, s).m0 : q.quaternion(best_iv).m0;
        zeros.push_back({best_t, m0});
    }
    return zeros;
}

/// Order and normalized value of the first derivative of omega that does not
/// vanish at t.
std::pair<int, Vec3> first_nonvanishing(const OmegaModel &omega, double t, double threshold) {
    const auto d = omega_derivatives(omega, t, 4);
    for (int j = 0; j < static_cast<int>(d.size()); ++j)
        if (norm(d[j]) > threshold) return {j, normalized(d[j])};
    throw Error(ErrorCode::parity_undetermined,
                "omega and its derivatives through order 4 vanish at t = " + std::to_string(t));
}

int parity_sign(int p) { return (p % 2 == 0) ? 1 : -1; }

} // namespace

Trajectory continue_axis_angle(const Trajectory &qtraj, const OmegaModel &omega, const ContinuationOptions &opt) {
    if (qtraj.representation() != Representation::quaternion)
        throw Error(ErrorCode::invalid_argument, "continuation needs a quaternion trajectory");
    if (qtraj.size() < 2) throw Error(ErrorCode::invalid_argument, "continuation needs at least two samples");

    TrajectoryMeta meta = qtraj.meta();
    ContinuationRecord rec;
    const double dt = qtraj.time(1) - qtraj.time(0);
    const double at_zero_tol = 1e-9 * dt;

    auto zeros = find_zeros(qtraj, omega, opt);

    // Starting branch.
    int l = 0;
    std::optional<Vec3> start_axis;
    const UnitQuaternion q0 = qtraj.quaternion(0);
    const bool start_on_boundary = !zeros.empty() && std::abs(zeros.front().t - qtraj.time(0)) <= at_zero_tol;
    if (start_on_boundary) {
        int j = q0.m0 > 0.0 ? 0 : 1;
        if (opt.initial_theta) j = static_cast<int>(std::lround(*opt.initial_theta / two_pi));
        if (parity_sign(j) != (q0.m0 > 0.0 ? 1 : -1))
            throw Error(ErrorCode::invalid_argument, "initial theta does not match the initial quaternion");
        const auto [i, w] = first_nonvanishing(omega, qtraj.time(0), opt.derivative_threshold);
        l = j;
        start_axis = w;
        rec.zero_times.push_back(qtraj.time(0));
        rec.parity_used.push_back(i);
        rec.limit_axes.push_back(w);
        rec.branches_after.push_back(l);
        zeros.erase(zeros.begin());
    } else if (opt.initial_theta) {
        l = static_cast<int>(std::floor(*opt.initial_theta / two_pi));
        ConversionContext ctx;
        ctx.branch = l;
        const AxisAngle aa = axis_angle_from_quaternion(q0, ctx);
        if (std::abs(aa.theta - *opt.initial_theta) > 1e-6)
            throw Error(ErrorCode::invalid_argument, "initial theta does not match the initial quaternion");
    }
    rec.initial_branch = l;

    Trajectory out(Representation::axis_angle, meta);
    out.reserve(qtraj.size());
    Vec3 last_axis = start_axis.value_or(placeholder_axis);
    std::size_t next_zero = 0;
    for (std::size_t k = 0; k < qtraj.size(); ++k) {
        const double t = qtraj.time(k);
        std::optional<Vec3> forced_axis;
        if (k == 0 && start_axis) forced_axis = start_axis;
        bool emitted = false;
        while (next_zero < zeros.size() && zeros[next_zero].t <= t + at_zero_tol) {
            const Zero &z = zeros[next_zero++];
            const auto [i, w] = first_nonvanishing(omega, z.t, opt.derivative_threshold);
            const int m0_sign = z.m0 > 0.0 ? 1 : -1;
            const Vec3 limit = w * static_cast<double>(m0_sign * parity_sign(l + i + 1));
            const bool at_left = m0_sign == parity_sign(l);
            // Samples exactly at the zero are reported on the incoming branch.
            const bool sample_at_zero = std::abs(z.t - t) <= at_zero_tol;
            if (sample_at_zero) forced_axis = limit;
            const int incoming = l;
            if (i % 2 == 0) l += at_left ? -1 : 1;
            rec.zero_times.push_back(z.t);
            rec.parity_used.push_back(i);
            rec.limit_axes.push_back(limit);
            rec.branches_after.push_back(l);
            if (sample_at_zero) {
                ConversionContext ctx;
                ctx.branch = incoming;
                ctx.reference_axis = limit;
                const AxisAngle aa = axis_angle_from_quaternion(qtraj.quaternion(k), ctx);
                out.push_back(t, std::array<double, 4>{limit.x, limit.y, limit.z, aa.theta});
                last_axis = limit;
                emitted = true;
            }
        }
        if (!emitted) {
            ConversionContext ctx;
            ctx.branch = l;
            ctx.reference_axis = forced_axis.value_or(last_axis);
            AxisAngle aa = axis_angle_from_quaternion(qtraj.quaternion(k), ctx);
            if (forced_axis) aa.n = *forced_axis;
            out.push_back(t, std::array<double, 4>{aa.n.x, aa.n.y, aa.n.z, aa.theta});
            last_axis = aa.n;
        }
    }
    rec.branch = l;
    out.meta().continuation = rec;
    return out;
}

} // namespace esl
