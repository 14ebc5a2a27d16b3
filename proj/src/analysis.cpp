#include "esl/analysis.hpp"

#include "esl/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace esl {

// ---------------------------------------------------------------- strobe

StrobeSeries strobe(const Trajectory &traj, double period, double offset) {
    if (traj.size() < 2) throw Error(ErrorCode::invalid_argument, "strobe needs at least two samples");
    const double t0 = traj.time(0);
    const double dt = traj.time(1) - t0;
    if (!(period >= 2.0 * dt)) throw Error(ErrorCode::period_too_small, "strobe period must be at least 2*dt");
    if (offset < 0.0) throw Error(ErrorCode::invalid_argument, "strobe offset must be non-negative");
    const double t_last = traj.time(traj.size() - 1);

    StrobeSeries out;
    out.period = period;
    out.offset = offset;
    if (t_last - t0 < offset) return out;
    const auto count = static_cast<std::size_t>(std::floor((t_last - t0 - offset) / period + 1e-9)) + 1;
    const std::size_t w = traj.width();
    for (std::size_t k = 0; k < count; ++k) {
        const double t = t0 + offset + static_cast<double>(k) * period;
        const double pos = (t - t0) / dt;
        auto i = static_cast<std::size_t>(std::floor(pos));
        i = std::min(i, traj.size() - 2);
        const double frac = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
        const auto a = traj.state(i), b = traj.state(i + 1);
        std::vector<double> p(w);
        for (std::size_t c = 0; c < w; ++c) p[c] = a[c] + frac * (b[c] - a[c]);
        out.times.push_back(t);
        out.points.push_back(std::move(p));
    }
    return out;
}

GapStats nearest_neighbor_gaps(const std::vector<std::vector<double>> &points) {
    const std::size_t n = points.size();
    if (n < 2) return {};
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double d = points[i][c] - points[j][c];
                s += d * d;
            }
            const double d = std::sqrt(s);
            nearest[i] = std::min(nearest[i], d);
            nearest[j] = std::min(nearest[j], d);
        }
    std::sort(nearest.begin(), nearest.end());
    const double median = n % 2 ? nearest[n / 2] : 0.5 * (nearest[n / 2 - 1] + nearest[n / 2]);
    return {nearest.front(), median, nearest.back()};
}

// ---------------------------------------------------------------- Lyapunov

namespace {

using Vec = std::vector<double>;

double dotv(const Vec &a, const Vec &b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

void remove_component(Vec &v, const Vec &unit) {
    const double c = dotv(v, unit);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * unit[i];
}

/// Modified Gram-Schmidt. Returns the column norms found along the way.
std::vector<double> orthonormalize(std::vector<Vec> &frame) {
    std::vector<double> r(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) remove_component(frame[i], frame[j]);
        r[i] = std::sqrt(dotv(frame[i], frame[i]));
        for (double &x : frame[i]) x /= r[i];
    }
    return r;
}

class TangentFlow {
public:
    explicit TangentFlow(const LyapunovSystem &sys) : sys_(sys), d_(sys.y0.size()) {}

    // Evaluates f at (t, y) and J(t, y) applied to each frame vector.
    void eval(double t, const Vec &y, const std::vector<Vec> &frame, Vec &dy, std::vector<Vec> &dframe) {
        dy.assign(d_, 0.0);
        sys_.f(t, y, dy);
        jac_.assign(d_ * d_, 0.0);
        Vec yp = y, fp(d_), fm(d_);
        for (std::size_t j = 0; j < d_; ++j) {
            // 1e-6 for unit-sized states, relative beyond that so the step
            // survives rounding on a growing state.
            const double h = 1e-6 * std::max(1.0, std::abs(y[j]));
            yp[j] = y[j] + h;
            sys_.f(t, yp, fp);
            yp[j] = y[j] - h;
            sys_.f(t, yp, fm);
            yp[j] = y[j];
            for (std::size_t i = 0; i < d_; ++i) jac_[i * d_ + j] = (fp[i] - fm[i]) / (2.0 * h);
        }
        dframe.resize(frame.size());
        for (std::size_t v = 0; v < frame.size(); ++v) {
            dframe[v].assign(d_, 0.0);
            for (std::size_t i = 0; i < d_; ++i)
                for (std::size_t j = 0; j < d_; ++j) dframe[v][i] += jac_[i * d_ + j] * frame[v][j];
        }
    }

    void step(double t, Vec &y, std::vector<Vec> &frame, double dt) {
        const std::size_t m = frame.size();
        auto add = [](const Vec &a, double s, const Vec &b) {
            Vec r(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
            return r;
        };
        auto add_frame = [&](const std::vector<Vec> &a, double s, const std::vector<Vec> &b) {
            std::vector<Vec> r(m);
            for (std::size_t v = 0; v < m; ++v) r[v] = add(a[v], s, b[v]);
            return r;
        };
        Vec k1, k2, k3, k4;
        std::vector<Vec> K1, K2, K3, K4;
        eval(t, y, frame, k1, K1);
        eval(t + 0.5 * dt, add(y, 0.5 * dt, k1), add_frame(frame, 0.5 * dt, K1), k2, K2);
        eval(t + 0.5 * dt, add(y, 0.5 * dt, k2), add_frame(frame, 0.5 * dt, K2), k3, K3);
        eval(t + dt, add(y, dt, k3), add_frame(frame, dt, K3), k4, K4);
        for (std::size_t i = 0; i < d_; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (std::size_t v = 0; v < m; ++v)
            for (std::size_t i = 0; i < d_; ++i)
                frame[v][i] += dt / 6.0 * (K1[v][i] + 2.0 * K2[v][i] + 2.0 * K3[v][i] + K4[v][i]);
    }

private:
    const LyapunovSystem &sys_;
    std::size_t d_;
    Vec jac_;
};

} // namespace

LyapunovEstimate lyapunov_spectrum(const LyapunovSystem &sys, double t0, std::size_t steps, double dt,
                                   std::size_t renorm_interval) {
    const std::size_t d = sys.y0.size();
    const std::size_t m = sys.count ? sys.count : d;
    if (d == 0 || m > d) throw Error(ErrorCode::invalid_argument, "bad Lyapunov system dimensions");
    if (!(dt > 0.0) || steps == 0 || renorm_interval == 0)
        throw Error(ErrorCode::invalid_argument, "need dt > 0, steps > 0 and renorm_interval > 0");

    Vec y = sys.y0;
    auto constrain = [&](std::vector<Vec> &frame) {
        if (!sys.constraint_normal) return;
        Vec nrm = sys.constraint_normal(y);
        const double len = std::sqrt(dotv(nrm, nrm));
        for (double &x : nrm) x /= len;
        for (auto &v : frame) remove_component(v, nrm);
    };

    // Initial frame: coordinate directions projected onto the constraint
    // surface, dropping any that collapse.
    std::vector<Vec> frame;
    for (std::size_t j = 0; j < d && frame.size() < m; ++j) {
        std::vector<Vec> cand{Vec(d, 0.0)};
        cand[0][j] = 1.0;
        constrain(cand);
        for (const auto &f : frame) remove_component(cand[0], f);
        const double len = std::sqrt(dotv(cand[0], cand[0]));
        if (len < 1e-8) continue;
        for (double &x : cand[0]) x /= len;
        frame.push_back(cand[0]);
    }
    if (frame.size() < m) throw Error(ErrorCode::invalid_argument, "constraint leaves too few tangent directions");

    LyapunovEstimate est;
    est.steps = steps;
    std::vector<double> sums(m, 0.0);
    TangentFlow flow(sys);
    for (std::size_t k = 1; k <= steps; ++k) {
        flow.step(t0 + static_cast<double>(k - 1) * dt, y, frame, dt);
        if (sys.project_state) sys.project_state(y);
        if (k % renorm_interval == 0 || k == steps) {
            constrain(frame);
            const auto r = orthonormalize(frame);
            const double elapsed = static_cast<double>(k) * dt;
            std::vector<double> running(m);
            for (std::size_t i = 0; i < m; ++i) {
                sums[i] += std::log(r[i]);
                running[i] = sums[i] / elapsed;
            }
            est.history_steps.push_back(k);
            est.history.push_back(std::move(running));
        }
    }
    est.exponents = est.history.back();
    std::sort(est.exponents.begin(), est.exponents.end(), std::greater<>());
    return est;
}

LyapunovEstimate lyapunov_spectrum(Representation rep, const OmegaModel &omega, const AnyRotation &initial,
                                   std::size_t steps, double dt, std::size_t renorm_interval) {
    LyapunovSystem sys;
    switch (rep) {
    case Representation::quaternion: {
        const auto q = std::get<UnitQuaternion>(convert(initial, rep));
        const double nq = q.norm();
        sys.y0 = {q.m0 / nq, q.m.x / nq, q.m.y / nq, q.m.z / nq};
        sys.count = 3;
        sys.f = [&omega](double t, std::span<const double> y, std::span<double> dy) {
            const auto r = rhs_quaternion({y[0], {y[1], y[2], y[3]}}, omega.eval(t));
            dy[0] = r.dm0;
            dy[1] = r.dm.x;
            dy[2] = r.dm.y;
            dy[3] = r.dm.z;
        };
        sys.project_state = [](std::span<double> y) {
            const double nq = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
            for (double &v : y) v /= nq;
        };
        sys.constraint_normal = [](std::span<const double> y) { return Vec(y.begin(), y.end()); };
        break;
    }
    case Representation::euler_vector: {
        const Vec3 e = std::get<EulerVector>(convert(initial, rep)).e;
        sys.y0 = {e.x, e.y, e.z};
        sys.f = [&omega](double t, std::span<const double> y, std::span<double> dy) {
            const Vec3 r = rhs_euler_vector({y[0], y[1], y[2]}, omega.eval(t));
            dy[0] = r.x;
            dy[1] = r.y;
            dy[2] = r.z;
        };
        break;
    }
    case Representation::gibbs_vector: {
        const Vec3 g = std::get<GibbsVector>(convert(initial, rep)).g;
        sys.y0 = {g.x, g.y, g.z};
        sys.f = [&omega](double t, std::span<const double> y, std::span<double> dy) {
            const Vec3 r = rhs_gibbs({y[0], y[1], y[2]}, omega.eval(t));
            dy[0] = r.x;
            dy[1] = r.y;
            dy[2] = r.z;
        };
        sys.project_state = [](std::span<double> y) {
            const double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
            if (!std::isfinite(n) || n > gibbs_overflow_limit)
                throw Error(ErrorCode::gibbs_overflow, "|G| exceeded the overflow limit");
        };
        break;
    }
    default:
        throw Error(ErrorCode::invalid_argument,
                    "Lyapunov spectra are available for the euler, quat and gibbs forms only");
    }
    try {
        return lyapunov_spectrum(sys, 0.0, steps, dt, renorm_interval);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::boundary_singularity || e.code() == ErrorCode::gibbs_overflow)
            throw Error(ErrorCode::trajectory_aborted, e.what());
        throw;
    }
}

LyapunovEstimate lyapunov_self_test(std::size_t steps, double dt) {
    LyapunovSystem sys;
    sys.y0 = {1.0, 1.0};
    sys.f = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = 0.1 * y[0];
        dy[1] = -0.2 * y[1];
    };
    return lyapunov_spectrum(sys, 0.0, steps, dt, 10);
}

// ---------------------------------------------------------------- spectra

std::string_view to_string(Window w) { return w == Window::hann ? "hann" : "none"; }

Window window_from_string(std::string_view name) {
    if (name == "hann") return Window::hann;
    if (name == "none") return Window::none;
    throw Error(ErrorCode::invalid_argument, "unknown window '" + std::string(name) + "'");
}

double Spectrum::db(std::size_t k) const {
    return 10.0 * std::log10(std::max(power[k], std::numeric_limits<double>::min()) / reference_power);
}

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex fftw_planner_mutex;
} // namespace

Spectrum power_spectrum(std::span<const double> series, double dt, Window window) {
    const std::size_t n = series.size();
    if (n < 64) throw Error(ErrorCode::series_too_short, "power spectrum needs at least 64 samples");
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "sample spacing must be positive");

    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> w(n, 1.0);
    if (window == Window::hann)
        for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / n));
    const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
    const double sum_w2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

    const std::size_t nf = n / 2 + 1;
    double *in = fftw_alloc_real(n);
    fftw_complex *out = fftw_alloc_complex(nf);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < n; ++i) in[i] = (series[i] - mean) * w[i];
    fftw_execute(plan);

    Spectrum spec;
    spec.window = window;
    spec.dt = dt;
    spec.freqs.resize(nf);
    spec.power.resize(nf);
    const double scale = 1.0 / (static_cast<double>(n) * sum_w2);
    for (std::size_t k = 0; k < nf; ++k) {
        const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        spec.freqs[k] = static_cast<double>(k) / (static_cast<double>(n) * dt);
        spec.power[k] = (edge ? 1.0 : 2.0) * mag2 * scale;
    }
    spec.reference_power = sum_w * sum_w / (2.0 * static_cast<double>(n) * sum_w2);
    {
        std::lock_guard lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return spec;
}

std::vector<Peak> detect_peaks(const Spectrum &spec, double min_prominence_db, std::size_t max_peaks) {
    const std::size_t n = spec.power.size();
    if (n < 3) return {};
    std::vector<double> db(n);
    for (std::size_t k = 0; k < n; ++k) db[k] = spec.db(k);

    // Sparse table for range minima.
    std::vector<std::vector<double>> table{db};
    for (std::size_t len = 2; len <= n; len *= 2) {
        const auto &prev = table.back();
        std::vector<double> next(n - len + 1);
        for (std::size_t i = 0; i + len <= n; ++i) next[i] = std::min(prev[i], prev[i + len / 2]);
        table.push_back(std::move(next));
    }
    auto range_min = [&](std::size_t lo, std::size_t hi) { // inclusive
        const auto level = static_cast<std::size_t>(std::bit_width(hi - lo + 1) - 1);
        return std::min(table[level][lo], table[level][hi - (std::size_t{1} << level) + 1]);
    };

    // Nearest strictly higher sample on each side.
    const auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> left(n, none), right(n, none), stack;
    for (std::size_t k = 0; k < n; ++k) {
        while (!stack.empty() && db[stack.back()] <= db[k]) stack.pop_back();
        if (!stack.empty()) left[k] = stack.back();
        stack.push_back(k);
    }
    stack.clear();
    for (std::size_t k = n; k-- > 0;) {
        while (!stack.empty() && db[stack.back()] <= db[k]) stack.pop_back();
        if (!stack.empty()) right[k] = stack.back();
        stack.push_back(k);
    }

    std::vector<Peak> peaks;
    for (std::size_t k = 1; k < n; ++k) {
        const bool rises = db[k] > db[k - 1];
        const bool falls = k + 1 == n || db[k] >= db[k + 1];
        if (!rises || !falls) continue;
        // DC is excluded, so the left base never reaches bin 0.
        const double left_base = range_min(left[k] == none ? 1 : left[k], k);
        const double right_base = right[k] == none ? range_min(k, n - 1) : range_min(k, right[k]);
        const double prominence = db[k] - std::max(left_base, right_base);
        if (prominence < min_prominence_db) continue;
        peaks.push_back({spec.freqs[k], spec.power[k], prominence, k});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.power > b.power; });
    if (peaks.size() > max_peaks) peaks.resize(max_peaks);
    return peaks;
}

// ---------------------------------------------------------------- recurrence

RecurrenceMatrix recurrence(const Trajectory &traj, double epsilon, std::size_t stride) {
    if (stride < 1) throw Error(ErrorCode::invalid_argument, "stride must be at least 1");
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be non-negative");
    RecurrenceMatrix r;
    r.epsilon = epsilon;
    r.stride = stride;
    r.n = traj.empty() ? 0 : (traj.size() - 1) / stride + 1;
    if (r.n > max_recurrence_samples)
        throw Error(ErrorCode::too_many_samples,
                    std::to_string(r.n) + " strided samples exceed " + std::to_string(max_recurrence_samples));
    r.bits.assign(r.n * r.n, 0);
    const double eps2 = epsilon * epsilon;
    for (std::size_t i = 0; i < r.n; ++i) {
        const auto a = traj.state(i * stride);
        r.bits[i * r.n + i] = 1;
        for (std::size_t j = i + 1; j < r.n; ++j) {
            const auto b = traj.state(j * stride);
            double s = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
            const std::uint8_t bit = s <= eps2 ? 1 : 0;
            r.bits[i * r.n + j] = bit;
            r.bits[j * r.n + i] = bit;
        }
    }
    return r;
}

std::vector<double> diagonal_recurrence_rate(const RecurrenceMatrix &r) {
    std::vector<double> rate(r.n, 0.0);
    for (std::size_t lag = 0; lag < r.n; ++lag) {
        std::size_t set = 0;
        for (std::size_t j = 0; j + lag < r.n; ++j) set += r.bits[(j + lag) * r.n + j];
        rate[lag] = static_cast<double>(set) / static_cast<double>(r.n - lag);
    }
    return rate;
}

std::vector<std::size_t> band_lags(const RecurrenceMatrix &r, double min_rate) {
    const auto rate = diagonal_recurrence_rate(r);
    std::vector<std::size_t> lags;
    for (std::size_t lag = 1; lag < rate.size(); ++lag) {
        const bool rises = rate[lag] > rate[lag - 1];
        const bool falls = lag + 1 == rate.size() || rate[lag] >= rate[lag + 1];
        if (rises && falls && rate[lag] >= min_rate) lags.push_back(lag);
    }
    return lags;
}

} // namespace esl
