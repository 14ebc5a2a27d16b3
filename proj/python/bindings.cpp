// Python bindings for the esl core.
#include "esl/acceptance.hpp"
#include "esl/analysis.hpp"
#include "esl/closed_form.hpp"
#include "esl/dynamics.hpp"
#include "esl/error.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace esl;

namespace {

using V3 = std::array<double, 3>;

Vec3 vec(const V3 &a) { return {a[0], a[1], a[2]}; }
V3 arr(const Vec3 &v) { return {v.x, v.y, v.z}; }

py::array_t<double> states(const Trajectory &tr) {
    py::array_t<double> out({tr.size(), tr.width()});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < tr.size(); ++k)
        for (std::size_t c = 0; c < tr.width(); ++c) m(k, c) = tr.state(k)[c];
    return out;
}

py::array_t<double> to_array(const std::vector<double> &v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> mat(const Mat3 &R) {
    py::array_t<double> out({3, 3});
    auto m = out.mutable_unchecked<2>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = R(i, j);
    return out;
}

/// The initial rotation given as an Euler vector, or as axis and angle.
AnyRotation initial_rotation(const std::optional<V3> &e0, const std::optional<V3> &axis, double theta) {
    if (axis) return AxisAngle{normalized(vec(*axis)), theta};
    if (e0) return EulerVector{vec(*e0)};
    throw Error(ErrorCode::invalid_argument, "give e0 or axis");
}

py::dict trajectory_dict(const Trajectory &tr) {
    const auto &meta = tr.meta();
    py::dict d;
    d["representation"] = std::string(to_string(tr.representation()));
    d["columns"] = Trajectory::columns(tr.representation());
    d["t"] = to_array(tr.times());
    d["states"] = states(tr);
    d["aborted"] = meta.aborted;
    d["abort_time"] = meta.abort_time;
    d["abort_reason"] = meta.abort_reason;
    d["bridge_steps"] = meta.bridge_steps;
    d["norm_drift_total"] = meta.norm_drift_total;
    if (meta.continuation) {
        const auto &c = *meta.continuation;
        py::dict rec;
        rec["initial_branch"] = c.initial_branch;
        rec["branch"] = c.branch;
        rec["zero_times"] = c.zero_times;
        rec["parity_used"] = c.parity_used;
        std::vector<V3> axes;
        for (const auto &a : c.limit_axes) axes.push_back(arr(a));
        rec["limit_axes"] = axes;
        rec["branches_after"] = c.branches_after;
        d["continuation"] = rec;
    }
    return d;
}

} // namespace

PYBIND11_MODULE(_esl, m) {
    m.doc() = "Euler axis/angle kinematics";

    static py::exception<Error> exc(m, "EslError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error &e) {
            // args = (message, code name)
            PyErr_SetObject(exc.ptr(), py::make_tuple(e.what(), std::string(to_string(e.code()))).ptr());
        }
    });

    m.def("rotate_point", [](const V3 &r, const V3 &n, double theta) { return arr(rotate_point(vec(r), {vec(n), theta})); },
          py::arg("r"), py::arg("axis"), py::arg("theta"));
    m.def("matrix_from_axis_angle", [](const V3 &n, double theta) { return mat(matrix_from_axis_angle({vec(n), theta})); },
          py::arg("axis"), py::arg("theta"));
    m.def(
        "compose_rotations",
        [](const V3 &n1, double t1, const V3 &n2, double t2) {
            const auto c = compose_rotations({vec(n1), t1}, {vec(n2), t2});
            return py::make_tuple(arr(c.rotation.n), c.rotation.theta, c.identity_composition);
        },
        py::arg("axis1"), py::arg("theta1"), py::arg("axis2"), py::arg("theta2"),
        "First rotation then second; returns (axis, theta, identity_composition).");
    m.def(
        "gibbs_identity_residual",
        [](const V3 &a, const V3 &b, const V3 &c, const V3 &d) {
            return arr(gibbs_identity_residual(vec(a), vec(b), vec(c), vec(d)));
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"));
    m.def("to_euler_vector", [](const V3 &n, double th) { return arr(to_euler_vector({vec(n), th}).e); });
    m.def("to_gibbs", [](const V3 &n, double th) { return arr(to_gibbs({vec(n), th}).g); });
    m.def("to_quaternion", [](const V3 &n, double th) {
        const auto q = to_quaternion({vec(n), th});
        return std::array<double, 4>{q.m0, q.m.x, q.m.y, q.m.z};
    });
    m.def(
        "axis_angle_from_euler",
        [](const V3 &e) {
            const auto a = axis_angle_from_euler(EulerVector{vec(e)});
            return py::make_tuple(arr(a.n), a.theta);
        },
        py::arg("e"));

    m.def("rhs_euler_vector", [](const V3 &e, const V3 &w) { return arr(rhs_euler_vector(vec(e), vec(w))); });
    m.def("rhs_gibbs", [](const V3 &g, const V3 &w) { return arr(rhs_gibbs(vec(g), vec(w))); });
    m.def("divergence_gibbs", [](const V3 &g, const V3 &w) { return divergence_gibbs(vec(g), vec(w)); });

    m.def(
        "spinor_params",
        [](const V3 &n0, double theta0, const V3 &w) {
            const auto s = spinor_params(vec(n0), theta0, vec(w));
            py::dict d;
            d["a"] = s.a;
            d["b"] = s.b;
            d["k"] = s.k;
            d["e1"] = arr(s.e1);
            d["e2"] = arr(s.e2);
            d["u"] = arr(s.u);
            d["u1"] = arr(s.u1);
            d["u2"] = arr(s.u2);
            return d;
        },
        py::arg("n0"), py::arg("theta0"), py::arg("omega_hat"));
    m.def(
        "spinor_state",
        [](const V3 &n0, double theta0, const V3 &w, const std::vector<double> &t) {
            const auto s = spinor_params(vec(n0), theta0, vec(w));
            py::array_t<double> out({t.size(), std::size_t{4}});
            auto o = out.mutable_unchecked<2>();
            for (std::size_t k = 0; k < t.size(); ++k) {
                const auto st = spinor_state(s, t[k]);
                o(k, 0) = st.n.x, o(k, 1) = st.n.y, o(k, 2) = st.n.z, o(k, 3) = st.theta;
            }
            return out;
        },
        py::arg("n0"), py::arg("theta0"), py::arg("omega_hat"), py::arg("t"),
        "Closed-form (nx, ny, nz, theta) at each time for constant unit omega.");

    m.def(
        "integrate",
        [](const std::string &rep, const std::string &omega, std::optional<V3> e0, std::optional<V3> axis, double theta,
           double t0, double t_end, double dt) {
            const auto model = OmegaModel::from_spec(omega);
            const auto init = initial_rotation(e0, axis, theta);
            const auto kind = representation_from_string(rep);
            std::optional<Trajectory> tr;
            {
                py::gil_scoped_release release;
                tr = integrate(kind, init, model, t0, t_end, dt);
            }
            return trajectory_dict(*tr);
        },
        py::arg("rep"), py::arg("omega"), py::arg("e0") = std::nullopt, py::arg("axis") = std::nullopt,
        py::arg("theta") = 0.0, py::arg("t0") = 0.0, py::arg("t_end") = 10.0, py::arg("dt") = 1e-3,
        "Integrate one representation; omega is a spec string such as 'rotplane:40'.");
    m.def(
        "continued_axis_angle",
        [](const std::string &omega, std::optional<V3> e0, std::optional<V3> axis, double theta, double t0,
           double t_end, double dt) {
            const auto model = OmegaModel::from_spec(omega);
            const auto init = initial_rotation(e0, axis, theta);
            ContinuationOptions opt;
            opt.initial_theta = axis ? theta : norm(vec(*e0));
            const auto q = integrate(Representation::quaternion, init, model, t0, t_end, dt);
            return trajectory_dict(continue_axis_angle(q, model, opt));
        },
        py::arg("omega"), py::arg("e0") = std::nullopt, py::arg("axis") = std::nullopt, py::arg("theta") = 0.0,
        py::arg("t0") = 0.0, py::arg("t_end") = 10.0, py::arg("dt") = 1e-3,
        "Quaternion integration followed by continuation through theta = 2 pi k.");

    m.def(
        "power_spectrum",
        [](const std::vector<double> &x, double dt, const std::string &window) {
            const auto s = power_spectrum(x, dt, window_from_string(window));
            return py::make_tuple(to_array(s.freqs), to_array(s.power), s.reference_power);
        },
        py::arg("series"), py::arg("dt"), py::arg("window") = "hann", "Returns (freqs, power, reference_power).");
    m.def(
        "detect_peaks",
        [](const std::vector<double> &x, double dt, const std::string &window, double min_prominence_db,
           std::size_t max_peaks) {
            const auto s = power_spectrum(x, dt, window_from_string(window));
            std::vector<std::pair<double, double>> out;
            for (const auto &p : detect_peaks(s, min_prominence_db, max_peaks)) out.emplace_back(p.freq, p.power);
            return out;
        },
        py::arg("series"), py::arg("dt"), py::arg("window") = "hann", py::arg("min_prominence_db") = 6.0,
        py::arg("max_peaks") = 5, "Peaks of the series' spectrum as (freq, power), strongest first.");
    m.def(
        "lyapunov_self_test",
        [](std::size_t steps, double dt) { return lyapunov_self_test(steps, dt).exponents; },
        py::arg("steps") = 10000, py::arg("dt") = 0.01);
    m.def(
        "lyapunov_spectrum",
        [](const std::string &rep, const std::string &omega, const V3 &e0, std::size_t steps, double dt,
           std::size_t renorm) {
            const auto model = OmegaModel::from_spec(omega);
            py::gil_scoped_release release;
            return lyapunov_spectrum(representation_from_string(rep), model, EulerVector{vec(e0)}, steps, dt, renorm)
                .exponents;
        },
        py::arg("rep"), py::arg("omega"), py::arg("e0"), py::arg("steps") = 100000, py::arg("dt") = 0.01,
        py::arg("renorm") = 10);

    m.def("acceptance_check_names", &acceptance_check_names);
    m.def(
        "run_acceptance",
        [](std::optional<std::string> only, double tol_scale) {
            VerifyOptions opt;
            opt.only = std::move(only);
            opt.tol_scale = tol_scale;
            std::vector<py::dict> out;
            std::vector<CheckResult> results;
            {
                py::gil_scoped_release release;
                results = run_acceptance(opt);
            }
            for (const auto &r : results) {
                py::dict d;
                d["name"] = r.name;
                d["pass"] = r.pass;
                d["value"] = r.value;
                d["tolerance"] = r.tolerance;
                d["detail"] = r.detail;
                d["seconds"] = r.seconds;
                out.push_back(d);
            }
            return out;
        },
        py::arg("only") = std::nullopt, py::arg("tol_scale") = 1.0);
}
