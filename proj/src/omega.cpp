#include "esl/omega.hpp"

#include "esl/csv.hpp"
#include "esl/error.hpp"
#include "esl/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

namespace esl {

namespace {

constexpr double quadrature_tolerance = 1e-10;

// Slack for queries that land a rounding error outside a tabulated range.
bool within(double t, double lo, double hi) {
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return t >= lo - slack && t <= hi + slack;
}

} // namespace

TabulatedOmega::TabulatedOmega(std::vector<double> times, std::vector<Vec3> values)
    : times_(std::move(times)), values_(std::move(values)) {
    const std::size_t n = times_.size();
    if (n != values_.size()) throw Error(ErrorCode::invalid_argument, "times and values differ in length");
    if (n < 4) throw Error(ErrorCode::invalid_argument, "tabulated omega needs at least 4 samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(times_[i] > times_[i - 1]))
            throw Error(ErrorCode::invalid_argument, "tabulated times must be strictly increasing");
    for (const auto &v : values_)
        if (!is_finite(v)) throw Error(ErrorCode::invalid_argument, "tabulated omega must be finite");

    // Natural spline: tridiagonal solve for the interior second derivatives.
    second_.assign(n, Vec3{});
    std::vector<double> diag(n, 0.0), upper(n, 0.0);
    std::vector<Vec3> rhs(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = times_[i] - times_[i - 1];
        const double h1 = times_[i + 1] - times_[i];
        const double lower = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0;
        if (i > 1) {
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= rhs[i - 1] * w;
        }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        Vec3 v = rhs[i];
        if (i + 2 < n) v -= second_[i + 1] * upper[i];
        second_[i] = v / diag[i];
        if (i == 1) break;
    }
}

Vec3 TabulatedOmega::eval(double t) const {
    if (!within(t, times_.front(), times_.back()))
        throw Error(ErrorCode::out_of_range, "time " + std::to_string(t) + " outside tabulated range");
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = times_[hi] - times_[lo];
    const double a = (times_[hi] - t) / h;
    const double b = (t - times_[lo]) / h;
    return values_[lo] * a + values_[hi] * b +
           (second_[lo] * (a * a * a - a) + second_[hi] * (b * b * b - b)) * (h * h / 6.0);
}

OmegaModel OmegaModel::constant(const Vec3 &w) {
    if (!is_finite(w)) throw Error(ErrorCode::invalid_argument, "constant omega must be finite");
    std::ostringstream os;
    os.precision(17);
    os << "const:" << w.x << ',' << w.y << ',' << w.z;
    return OmegaModel(ConstantOmega{w}, os.str());
}

OmegaModel OmegaModel::rotating_plane(double period, double amplitude) {
    if (!(period > 0.0) || !std::isfinite(period))
        throw Error(ErrorCode::invalid_argument, "rotating-plane period must be positive");
    std::ostringstream os;
    os.precision(17);
    os << "rotplane:" << period;
    if (amplitude != 1.0) os << ',' << amplitude;
    return OmegaModel(RotatingPlaneOmega{two_pi / period, amplitude}, os.str());
}

OmegaModel OmegaModel::pathological() { return OmegaModel(PathologicalOmega{}, "pathological"); }

OmegaModel OmegaModel::tabulated(std::vector<double> times, std::vector<Vec3> values) {
    return OmegaModel(TabulatedOmega(std::move(times), std::move(values)));
}

OmegaModel OmegaModel::reversed(const OmegaModel &inner, double t1) {
    return OmegaModel(ReversedOmega{std::make_shared<const OmegaModel>(inner), t1});
}

OmegaModel OmegaModel::tabulate(const OmegaModel &model, double t0, double t1, std::size_t count) {
    if (count < 4 || !(t1 > t0)) throw Error(ErrorCode::invalid_argument, "bad tabulation grid");
    std::vector<double> ts(count);
    std::vector<Vec3> ws(count);
    for (std::size_t i = 0; i < count; ++i) {
        ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
        ws[i] = model.eval(ts[i]);
    }
    return tabulated(std::move(ts), std::move(ws));
}

OmegaModel OmegaModel::from_spec(const std::string &spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
    const auto numbers = [&](std::size_t expect_min, std::size_t expect_max) {
        std::vector<double> out;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            char *end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (end == item.c_str() || *end != '\0')
                throw Error(ErrorCode::invalid_argument, "bad number '" + item + "' in omega spec");
            out.push_back(v);
        }
        if (out.size() < expect_min || out.size() > expect_max)
            throw Error(ErrorCode::invalid_argument, "wrong argument count in omega spec '" + spec + "'");
        return out;
    };
    if (head == "const") {
        const auto v = numbers(3, 3);
        return constant({v[0], v[1], v[2]});
    }
    if (head == "rotplane") {
        const auto v = numbers(1, 2);
        return rotating_plane(v[0], v.size() > 1 ? v[1] : 1.0);
    }
    if (head == "pathological" && args.empty()) return pathological();
    if (head == "csv" && !args.empty()) {
        OmegaModel m = load_tabulated_csv(args);
        m.spec_ = spec;
        return m;
    }
    throw Error(ErrorCode::invalid_argument, "unrecognised omega spec '" + spec + "'");
}

std::string OmegaModel::describe() const {
    if (!spec_.empty()) return spec_;
    if (auto *r = std::get_if<ReversedOmega>(&kind_)) {
        std::ostringstream os;
        os.precision(17);
        os << "reversed(" << r->inner->describe() << ";t1=" << r->t1 << ')';
        return os.str();
    }
    if (auto *tab = std::get_if<TabulatedOmega>(&kind_)) {
        std::ostringstream os;
        os.precision(17);
        os << "tabulated(" << tab->times().size() << " samples on [" << tab->t_front() << ',' << tab->t_back() << "])";
        return os.str();
    }
    return "omega";
}

namespace {

using Complex = std::complex<double>;
// Laurent polynomial in t: exponent -> coefficient.
using Laurent = std::map<int, Complex>;

// W(t) = omega_x + i omega_y = (3i t^2 - t) exp(-i/t) for the pathological
// model. Each derivative keeps the form Q(t) exp(-i/t) with
// Q' = dQ/dt + (i/t^2) Q.
Vec3 pathological_derivative(double t, int order) {
    if (t < 0.0) throw Error(ErrorCode::out_of_range, "pathological omega is defined only for t >= 0");
    if (t == 0.0) {
        if (order == 0) return {};
        throw Error(ErrorCode::not_differentiable, "pathological omega has no derivative at t = 0");
    }
    Laurent q{{2, Complex(0.0, 3.0)}, {1, Complex(-1.0, 0.0)}};
    for (int k = 0; k < order; ++k) {
        Laurent next;
        for (const auto &[p, c] : q) {
            if (p != 0) next[p - 1] += c * static_cast<double>(p);
            next[p - 2] += c * Complex(0.0, 1.0);
        }
        q = std::move(next);
    }
    Complex value(0.0, 0.0);
    for (const auto &[p, c] : q) value += c * std::pow(t, p);
    value *= std::exp(Complex(0.0, -1.0 / t));
    return {value.real(), value.imag(), 0.0};
}

// Central differences of order 1..4. Higher orders use wider steps so that
// cancellation stays well below the 1e-6 parity threshold.
Vec3 tabulated_derivative(const TabulatedOmega &tab, double t, int order) {
    if (order == 0) return tab.eval(t);
    static constexpr double steps[] = {0.0, 1e-4, 1e-4, 2e-3, 1e-2};
    const double h = steps[order];
    const int reach = order <= 2 ? 1 : 2;
    if (!within(t - reach * h, tab.t_front(), tab.t_back()) || !within(t + reach * h, tab.t_front(), tab.t_back()))
        throw Error(ErrorCode::out_of_range, "difference stencil leaves the tabulated range");
    const auto f = [&](int k) { return tab.eval(t + k * h); };
    switch (order) {
    case 1: return (f(1) - f(-1)) / (2.0 * h);
    case 2: return (f(1) - f(0) * 2.0 + f(-1)) / (h * h);
    case 3: return (f(2) - f(1) * 2.0 + f(-1) * 2.0 - f(-2)) / (2.0 * h * h * h);
    default: return (f(2) - f(1) * 4.0 + f(0) * 6.0 - f(-1) * 4.0 + f(-2)) / (h * h * h * h);
    }
}

Vec3 derivative(const OmegaModel &model, double t, int order) {
    struct Visitor {
        double t;
        int order;
        Vec3 operator()(const ConstantOmega &c) const { return order == 0 ? c.w : Vec3{}; }
        Vec3 operator()(const RotatingPlaneOmega &r) const {
            const double phase = r.alpha * t + order * 0.5 * pi;
            const double scale = r.amplitude * std::pow(r.alpha, order);
            return {scale * std::cos(phase), scale * std::sin(phase), 0.0};
        }
        Vec3 operator()(const PathologicalOmega &) const { return pathological_derivative(t, order); }
        Vec3 operator()(const TabulatedOmega &tab) const { return tabulated_derivative(tab, t, order); }
        Vec3 operator()(const ReversedOmega &r) const {
            // d^j/dt^j [-w(t1 - t)] = -(-1)^j w^(j)(t1 - t)
            const Vec3 inner = derivative(*r.inner, r.t1 - t, order);
            return (order % 2 == 0) ? -inner : inner;
        }
    };
    return std::visit(Visitor{t, order}, model.kind());
}

template <class F>
Vec3 simpson_recursive(const F &f, double a, double b, const Vec3 &fa, const Vec3 &fm, const Vec3 &fb,
                       const Vec3 &whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Vec3 flm = f(lm);
    const Vec3 frm = f(rm);
    const Vec3 left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    const Vec3 right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    const Vec3 delta = left + right - whole;
    const double err = std::max({std::abs(delta.x), std::abs(delta.y), std::abs(delta.z)});
    if (depth <= 0 || err <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recursive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recursive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson with the interval pre-split into panels so that oscillatory
// integrands are not accepted on an aliased first estimate.
template <class F>
Vec3 adaptive_simpson(const F &f, double a, double b, double tol) {
    constexpr int panels = 32;
    constexpr int max_depth = 40;
    Vec3 total;
    const double h = (b - a) / panels;
    Vec3 fa = f(a);
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double hi = (p + 1 == panels) ? b : a + (p + 1) * h;
        const double mid = 0.5 * (lo + hi);
        const Vec3 fm = f(mid);
        const Vec3 fb = f(hi);
        const Vec3 whole = (fa + fm * 4.0 + fb) * ((hi - lo) / 6.0);
        total += simpson_recursive(f, lo, hi, fa, fm, fb, whole, tol / panels, max_depth);
        fa = fb;
    }
    return total;
}

} // namespace

Vec3 OmegaModel::eval(double t) const {
    return derivative(*this, t, 0);
}

Vec3 omega_eval(const OmegaModel &model, double t) { return model.eval(t); }

std::vector<Vec3> omega_derivatives(const OmegaModel &model, double t, int max_order) {
    if (max_order < 0 || max_order > 4) throw Error(ErrorCode::invalid_argument, "max_order must be in 0..4");
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int j = 0; j <= max_order; ++j) out.push_back(derivative(model, t, j));
    return out;
}

double arc_time(const OmegaModel &model, double t0, double t) {
    if (t < t0) throw Error(ErrorCode::invalid_argument, "arc_time needs t >= t0");
    if (t == t0) return 0.0;
    const auto speed = [&](double u) { return Vec3{norm(model.eval(u)), 0.0, 0.0}; };
    return adaptive_simpson(speed, t0, t, quadrature_tolerance).x;
}

Vec3 integrated_omega(const OmegaModel &model, double t0, double t) {
    if (t < t0) throw Error(ErrorCode::invalid_argument, "integrated_omega needs t >= t0");
    if (t == t0) return {};
    // Infinitely many oscillations accumulate at t = 0, so use the
    // antiderivative t^3 (sin(1/t), cos(1/t), 0).
    if (std::holds_alternative<PathologicalOmega>(model.kind())) {
        model.eval(t0);
        const auto anti = [](double u) {
            return u == 0.0 ? Vec3{} : Vec3{std::sin(1.0 / u), std::cos(1.0 / u), 0.0} * (u * u * u);
        };
        return anti(t) - anti(t0);
    }
    return adaptive_simpson([&](double u) { return model.eval(u); }, t0, t, quadrature_tolerance);
}

OmegaModel load_tabulated_csv(const std::filesystem::path &path) {
    const CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"t", "wx", "wy", "wz"})
        throw Error(ErrorCode::schema_mismatch, "omega CSV must have header t,wx,wy,wz");
    if (table.rows.size() < 4) throw Error(ErrorCode::schema_mismatch, "omega CSV needs at least 4 rows");
    std::vector<double> ts;
    std::vector<Vec3> ws;
    for (const auto &row : table.rows) {
        ts.push_back(row[0]);
        ws.push_back({row[1], row[2], row[3]});
    }
    try {
        return OmegaModel::tabulated(std::move(ts), std::move(ws));
    } catch (const Error &e) {
        throw Error(ErrorCode::schema_mismatch, e.what());
    }
}

} // namespace esl
