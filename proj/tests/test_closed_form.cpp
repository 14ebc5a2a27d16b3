#include "doctest.h"
#include "support.hpp"

#include "esl/closed_form.hpp"
#include "esl/dynamics.hpp"
#include "esl/error.hpp"

using namespace esl;
using namespace esl::test;

TEST_CASE("quarter turn about i driven about k") {
    const auto s = spinor_params(axes::i, pi / 2, axes::k);
    CHECK(s.a == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(s.b) < 1e-12);
    CHECK(max_abs(s.e1 - axes::i) < 1e-12);
    CHECK(max_abs(s.e2 - Vec3{0, 1, 1} / std::sqrt(2.0)) < 1e-12);
    CHECK(spinor_theta(s, 0.0) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(spinor_theta(s, two_pi) == doctest::Approx(1.5 * pi).epsilon(1e-14));
    for (double t = 0.0; t < 4 * pi; t += 0.37) {
        const double sh = std::sin(t / 2);
        const Vec3 expected = Vec3{std::cos(t / 2), sh, sh} / std::sqrt(1 + sh * sh);
        CHECK(max_abs(spinor_axis(s, t) - expected) < 1e-14);
    }
}

TEST_CASE("perpendicular drive gives b = 0") {
    for (double th : {0.3, 1.0, 2.5, 3.1})
        CHECK(std::abs(spinor_params(axes::j, th, axes::k).b) < 1e-12);
}

TEST_CASE("spinor invariants on random inputs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec3 n0 = random_unit(rng);
        const Vec3 w = random_unit(rng);
        if (std::abs(dot(n0, w)) > 0.99) continue;
        const double th = uniform(rng, 0.01, two_pi - 0.01);
        const auto s = spinor_params(n0, th, w);
        const double c = dot(w, n0);
        CHECK(std::abs((1 - s.a * s.a) - (1 - c * c) * std::sin(th / 2) * std::sin(th / 2)) < 1e-12);
        CHECK(std::abs(dot(s.e1, s.e2)) < 1e-12);
        CHECK(std::abs(norm(s.e1) - 1) < 1e-12);
        CHECK(std::abs(norm(s.e2) - 1) < 1e-12);
        CHECK(std::abs(dot(s.u, s.n0)) < 1e-12);
        CHECK(s.a > std::abs(c) - 1e-15);
        CHECK(s.a < 1.0);
        // The closed form starts from the given state.
        CHECK(spinor_theta(s, 0.0) == doctest::Approx(th).epsilon(1e-10));
        CHECK(max_abs(spinor_axis(s, 0.0) - n0) < 1e-10);
        const double lo = 2 * std::acos(s.a);
        for (double t : {0.4, 2.2, 5.0, 9.1}) {
            const double theta = spinor_theta(s, t);
            CHECK(theta >= lo - 1e-12);
            CHECK(theta <= two_pi - lo + 1e-12);
            CHECK(spinor_theta(s, t + 2 * two_pi) == doctest::Approx(theta).epsilon(1e-12));
            CHECK(spinor_theta(s, t + two_pi) == doctest::Approx(two_pi - theta).epsilon(1e-12));
            CHECK(max_abs(spinor_axis(s, t + two_pi) + spinor_axis(s, t)) < 1e-12);
            CHECK(std::abs(norm(spinor_axis(s, t)) - 1) < 1e-14);
        }
        // Extremes are reached at t = -2b and 2pi - 2b.
        CHECK(spinor_theta(s, -2 * s.b) == doctest::Approx(lo).epsilon(1e-10));
        CHECK(spinor_theta(s, two_pi - 2 * s.b) == doctest::Approx(two_pi - lo).epsilon(1e-10));
    }
}

TEST_CASE("closed form matches the composition oracle") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 n0 = random_unit(rng), w = random_unit(rng);
        if (std::abs(dot(n0, w)) > 0.99) continue;
        const double th = uniform(rng, 0.1, two_pi - 0.1);
        const auto s = spinor_params(n0, th, w);
        const double t = uniform(rng, 0.0, 4 * pi);
        const Mat3 oracle = matrix_from_axis_angle({w, t}) * matrix_from_axis_angle({n0, th});
        CHECK(frobenius_distance(matrix_from_axis_angle(spinor_state(s, t)), oracle) < 1e-10);
    }
}

TEST_CASE("closed form satisfies the axis/angle equations") {
    const auto s = spinor_params(normalized(Vec3{1, 0.3, -0.4}), 2.0, normalized(Vec3{0.2, 0.1, 1}));
    const double h = 1e-5;
    for (double t = 0.1; t < 12.0; t += 0.5) {
        const auto st = spinor_state(s, t);
        if (std::abs(std::sin(st.theta / 2)) < 0.05) continue;
        const auto rate = rhs_axis_angle(st.n, st.theta, s.omega_hat);
        const Vec3 dn = (spinor_axis(s, t + h) - spinor_axis(s, t - h)) / (2 * h);
        const double dth = (spinor_theta(s, t + h) - spinor_theta(s, t - h)) / (2 * h);
        CHECK(max_abs(dn - rate.dn) < 10 * h);
        CHECK(std::abs(dth - rate.dtheta) < 10 * h);
    }
}

TEST_CASE("axis speed peaks at e1 and dips at e2") {
    const auto s = spinor_params(normalized(Vec3{1, 0.5, 0.2}), 1.2, axes::k);
    const int n = 10000;
    const double h = 1e-6;
    double vmax = -1, vmin = 1e9;
    Vec3 at_max, at_min;
    for (int k = 0; k < n; ++k) {
        const double t = 4 * pi * k / n;
        const double v = norm(spinor_axis(s, t + h) - spinor_axis(s, t - h)) / (2 * h);
        if (v > vmax) vmax = v, at_max = spinor_axis(s, t);
        if (v < vmin) vmin = v, at_min = spinor_axis(s, t);
    }
    CHECK(std::min(norm(at_max - s.e1), norm(at_max + s.e1)) < 2e-3);
    CHECK(std::min(norm(at_min - s.e2), norm(at_min + s.e2)) < 2e-3);
}

TEST_CASE("spinor parameter errors") {
    auto code = [](auto &&fn) {
        try {
            fn();
        } catch (const Error &e) {
            return e.code();
        }
        return ErrorCode::io_error;
    };
    CHECK(code([] { spinor_params(axes::k, 1.0, axes::k); }) == ErrorCode::parallel_axis);
    CHECK(code([] { spinor_params(axes::k, 1.0, -axes::k); }) == ErrorCode::parallel_axis);
    CHECK(code([] { spinor_params(axes::i, 0.0, axes::k); }) == ErrorCode::theta_out_of_range);
    CHECK(code([] { spinor_params(axes::i, two_pi, axes::k); }) == ErrorCode::theta_out_of_range);
    CHECK(code([] { spinor_params(Vec3{}, 1.0, axes::k); }) == ErrorCode::invalid_argument);
}

TEST_CASE("exact propagation") {
    const AxisAngle init{axes::i, pi / 2};
    CHECK(exact_propagate(init, {}).rotation.theta == init.theta);
    const auto s = spinor_params(axes::i, pi / 2, axes::k);
    for (double t : {0.5, 3.0, 7.0}) {
        const OmegaSegment seg{axes::k, t};
        const auto p = exact_propagate(init, std::span(&seg, 1));
        CHECK(frobenius_distance(matrix_from_axis_angle(p.rotation), matrix_from_axis_angle(spinor_state(s, t))) <
              1e-12);
    }
    // Two half-segments land on the same rotation as one full segment.
    const OmegaSegment halves[] = {{Vec3{0, 0.5, 1}, 0.8}, {Vec3{0, 0.5, 1}, 0.8}};
    const OmegaSegment whole{Vec3{0, 0.5, 1}, 1.6};
    CHECK(frobenius_distance(matrix_from_axis_angle(exact_propagate(init, halves).rotation),
                             matrix_from_axis_angle(exact_propagate(init, std::span(&whole, 1)).rotation)) < 1e-12);
}

TEST_CASE("piecewise-constant propagation approaches the integrated rotating drive") {
    const auto omega = OmegaModel::rotating_plane(5.0);
    const double T = 4.0;
    const int n = 1000;
    std::vector<OmegaSegment> segs;
    for (int k = 0; k < n; ++k) segs.push_back({omega.eval((k + 0.5) * T / n), T / n});
    const AxisAngle init{normalized(Vec3{1, 1, 1}), 1.0};
    const auto p = exact_propagate(init, segs);
    const auto q = integrate(Representation::quaternion, init, omega, 0.0, T, 1e-3);
    CHECK(frobenius_distance(matrix_from_axis_angle(p.rotation), q.matrix(q.size() - 1)) < 1e-5);
}

TEST_CASE("time rescaling reduces to the unit-speed solution") {
    // omega = s(t) k with s = 1 + sin(t)/2; tau = t + (1 - cos t)/2.
    std::vector<double> ts;
    std::vector<Vec3> ws;
    for (int k = 0; k <= 1200; ++k) {
        const double t = 0.005 * k;
        ts.push_back(t);
        ws.push_back({0, 0, 1 + 0.5 * std::sin(t)});
    }
    const auto omega = OmegaModel::tabulated(ts, ws);
    const auto s = spinor_params(axes::i, pi / 2, axes::k);
    const auto tr = integrate(Representation::euler_vector, EulerVector{{pi / 2, 0, 0}}, omega, 0.0, 5.0, 1e-3);
    REQUIRE_FALSE(tr.meta().aborted);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); k += 100) {
        const double t = tr.time(k);
        const double tau = t + 0.5 * (1 - std::cos(t));
        worst = std::max(worst, max_abs(tr.euler(k) - spinor_euler_vector(s, tau)));
    }
    CHECK(worst < 1e-6);
}
