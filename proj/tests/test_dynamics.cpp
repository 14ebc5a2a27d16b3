#include "doctest.h"
#include "support.hpp"

#include "esl/closed_form.hpp"
#include "esl/dynamics.hpp"
#include "esl/error.hpp"

using namespace esl;
using namespace esl::test;

namespace {
ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::invalid_argument;
}

/// Euler vector of the rotation E followed by a turn of |w| h about w.
Vec3 composed_euler(const Vec3 &E, const Vec3 &w, double h) {
    const auto c = compose_rotations(axis_angle_from_euler(EulerVector{E}), {normalized(w), norm(w) * h});
    return c.rotation.n * c.rotation.theta;
}
} // namespace

TEST_CASE("Euler vector rate at the origin and along omega") {
    const Vec3 w{0.3, -1.0, 2.0};
    CHECK(rhs_euler_vector({}, w) == w);
    CHECK(max_abs(rhs_euler_vector({0, 0, 1.7}, axes::k) - axes::k) < 1e-15);
}

TEST_CASE("Euler vector rate matches the composition oracle") {
    std::mt19937_64 rng(41);
    const double h = 1e-4;
    auto central = [](const Vec3 &E, const Vec3 &w, double step) {
        return (composed_euler(E, w, step) - composed_euler(E, w, -step)) / (2 * step);
    };
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 E = random_unit(rng) * uniform(rng, 1e-3, two_pi - 0.05);
        const Vec3 w = random_vec(rng, 2.0);
        // Richardson extrapolation removes the O(h^2) term.
        const Vec3 fd = (central(E, w, h / 2) * 4.0 - central(E, w, h)) / 3.0;
        CHECK(max_abs(fd - rhs_euler_vector(E, w)) < 1e-6 * (1 + norm(w)));
    }
}

TEST_CASE("middle coefficient series and closed form meet") {
    for (double th : {0.0, 1e-4, 5e-3, 9.9e-3})
        CHECK(euler_middle_coefficient(th) ==
              doctest::Approx(1.0 / 12 + th * th / 720 + std::pow(th, 4) / 30240).epsilon(1e-14));
    const double a = 1.0e-2 * (1 - 1e-12), b = 1.0e-2 * (1 + 1e-12);
    CHECK(euler_middle_coefficient(a) == doctest::Approx(euler_middle_coefficient(b)).epsilon(1e-9));
    const double th = 2.0;
    CHECK(euler_middle_coefficient(th) == doctest::Approx((1 - th / 2 / std::tan(th / 2)) / (th * th)).epsilon(1e-14));
}

TEST_CASE("Euler vector rate guards the boundary") {
    CHECK(code_of([] { rhs_euler_vector({two_pi + 1e-9, 0, 0}, axes::k); }) == ErrorCode::boundary_singularity);
    CHECK(code_of([] { rhs_euler_vector({0, 2 * two_pi, 0}, axes::k); }) == ErrorCode::boundary_singularity);
    CHECK_NOTHROW(rhs_euler_vector({two_pi + 1e-6, 0, 0}, axes::k));
}

TEST_CASE("generalized rate specialises to each representation") {
    std::mt19937_64 rng(43);
    const auto er = euler_rep(), mr = modified_gibbs_rep(), gr = gibbs_rep();
    const Vec3 w0{0.5, 1, -2};
    CHECK(max_abs(rhs_generalized({}, w0, er) - w0) < 1e-15);
    CHECK(max_abs(rhs_generalized({}, w0, mr) - w0 * 0.5) < 1e-15);
    CHECK(max_abs(rhs_generalized({}, w0, gr) - w0 * 0.5) < 1e-15);
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 n = random_unit(rng), w = random_vec(rng, 2.0);
        const double th = uniform(rng, 1e-4, pi - 0.1);
        const Vec3 E = n * th;
        CHECK(max_abs(rhs_generalized(E, w, er) - rhs_euler_vector(E, w)) < 1e-12);
        const Vec3 G = n * std::tan(th / 2);
        CHECK(max_abs(rhs_generalized(G, w, gr) - rhs_gibbs(G, w)) < 1e-11 * (1 + dot(G, G)));
        // For M the middle term vanishes: dM = w m0 / 2 + w x M / 2.
        const Vec3 M = n * std::sin(th / 2);
        const Vec3 expect = w * (0.5 * std::cos(th / 2)) + cross(w, M) * 0.5;
        CHECK(max_abs(rhs_generalized(M, w, mr) - expect) < 1e-12);
    }
}

TEST_CASE("generalized rate is continuous through the small-angle limit") {
    const Vec3 w{0.2, 0.7, -0.4}, n = normalized(Vec3{1, 2, 2});
    for (const auto &rep : {euler_rep(), modified_gibbs_rep(), gibbs_rep()}) {
        const Vec3 in = rhs_generalized(n * rep.f(0.999e-3), w, rep);
        const Vec3 out = rhs_generalized(n * rep.f(1.001e-3), w, rep);
        CHECK(max_abs(in - out) < 1e-6);
    }
}

TEST_CASE("quaternion rate") {
    const auto r = rhs_quaternion({1.0, {}}, axes::k);
    CHECK(r.dm0 == 0.0);
    CHECK(r.dm == Vec3{0, 0, 0.5});
    const auto z = rhs_quaternion(to_quaternion({normalized(Vec3{1, 1, 0}), 0.7}), {});
    CHECK(z.dm0 == 0.0);
    CHECK(z.dm == Vec3{});
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        const auto q = to_quaternion({random_unit(rng), uniform(rng, 0, 4 * pi)});
        const auto d = rhs_quaternion(q, random_vec(rng, 3.0));
        CHECK(std::abs(q.m0 * d.dm0 + dot(q.m, d.dm)) < 1e-15);
    }
}

TEST_CASE("Gibbs rate, divergence and chain rule") {
    CHECK(rhs_gibbs({}, Vec3{2, 4, 6}) == Vec3{1, 2, 3});
    CHECK(divergence_gibbs({1, 0, 0}, {1, 0, 0}) == 2.0);
    CHECK(divergence_gibbs({0, 1, 0}, {1, 0, 0}) == 0.0);
    std::mt19937_64 rng(53);
    const double h = 1e-5;
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 n = random_unit(rng), w = random_vec(rng, 2.0);
        const double th = uniform(rng, 0.05, pi - 0.1);
        const Vec3 G = n * std::tan(th / 2);
        double div = 0.0;
        for (int c = 0; c < 3; ++c) {
            Vec3 up = G, dn = G;
            up[c] += h;
            dn[c] -= h;
            div += (rhs_gibbs(up, w)[c] - rhs_gibbs(dn, w)[c]) / (2 * h);
        }
        CHECK(std::abs(div - divergence_gibbs(G, w)) < 1e-6);
        // Push the Euler rate forward through G = E tan(|E|/2)/|E|.
        const Vec3 E = n * th;
        const Vec3 dE = rhs_euler_vector(E, w);
        auto to_g = [](const Vec3 &e) { return e * (std::tan(norm(e) / 2) / norm(e)); };
        auto central = [&](double s) { return (to_g(E + dE * s) - to_g(E - dE * s)) / (2 * s); };
        const Vec3 pushed = (central(h / 2) * 4.0 - central(h)) / 3.0;
        CHECK(max_abs(pushed - rhs_gibbs(G, w)) < 1e-8 * (1 + dot(G, G)));
    }
}

TEST_CASE("axis/angle rate") {
    const auto par = rhs_axis_angle(axes::k, 1.0, {0, 0, 3});
    CHECK(max_abs(par.dn) < 1e-15);
    CHECK(par.dtheta == 3.0);
    CHECK(rhs_axis_angle(axes::k, 1.0, {2, 0, 0}).dtheta == 0.0);
    CHECK(rhs_axis_angle(axes::k, 1.0, {0, 0, -2}).dtheta == -2.0);
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 n = random_unit(rng);
        const auto r = rhs_axis_angle(n, uniform(rng, 0.1, two_pi - 0.1), random_vec(rng, 2.0));
        CHECK(std::abs(dot(n, r.dn)) < 1e-14);
    }
    CHECK(code_of([] { rhs_axis_angle(axes::k, two_pi, axes::i); }) == ErrorCode::boundary_singularity);
    CHECK(code_of([] { rhs_axis_angle(axes::k, 0.0, axes::i); }) == ErrorCode::boundary_singularity);
}

TEST_CASE("Euler vector run returns after 4 pi") {
    // A step close to 1e-3 that divides 4 pi, so the last sample is at 4 pi.
    const double dt = 4 * pi / 12566;
    const auto tr = integrate(Representation::euler_vector, EulerVector{{pi / 2, 0, 0}}, OmegaModel::constant(axes::k),
                              0.0, 4 * pi, dt);
    CHECK(tr.size() == 12567);
    CHECK(tr.size() == grid_count(0.0, 4 * pi, dt));
    CHECK(grid_count(0.0, 4 * pi, 1e-3) == 12567);
    CHECK(max_abs(tr.euler(tr.size() - 1) - Vec3{pi / 2, 0, 0}) < 1e-6);
}

TEST_CASE("zero omega freezes every representation") {
    const AxisAngle init{normalized(Vec3{1, -1, 2}), 1.1};
    for (auto rep : {Representation::euler_vector, Representation::quaternion, Representation::gibbs_vector,
                     Representation::axis_angle}) {
        const auto tr = integrate(rep, init, OmegaModel::constant({}), 0.0, 1.0, 0.1);
        for (std::size_t k = 1; k < tr.size(); ++k)
            for (std::size_t c = 0; c < tr.width(); ++c) CHECK(tr.state(k)[c] == tr.state(0)[c]);
    }
}

TEST_CASE("reruns are bit identical") {
    const auto a = integrate(Representation::euler_vector, EulerVector{{0.5, 0.5, 0.5}}, OmegaModel::rotating_plane(40),
                             0.0, 5.0, 1e-2);
    const auto b = integrate(Representation::euler_vector, EulerVector{{0.5, 0.5, 0.5}}, OmegaModel::rotating_plane(40),
                             0.0, 5.0, 1e-2);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t c = 0; c < 3; ++c) CHECK(a.state(k)[c] == b.state(k)[c]);
}

TEST_CASE("quaternion drift per step stays tiny before renormalisation") {
    IntegrateOptions opt;
    opt.renormalize_quaternion = false;
    const auto tr = integrate(Representation::quaternion, AxisAngle{normalized(Vec3{1, 2, 3}), 1.0},
                              OmegaModel::rotating_plane(40), 0.0, 10.0, 1e-3, opt);
    double worst = 0.0;
    for (std::size_t k = 1; k < tr.size(); ++k)
        worst = std::max(worst, std::abs(tr.quaternion(k).norm() - tr.quaternion(k - 1).norm()));
    CHECK(worst <= 1e-12);
    const auto rn = integrate(Representation::quaternion, AxisAngle{normalized(Vec3{1, 2, 3}), 1.0},
                              OmegaModel::rotating_plane(40), 0.0, 10.0, 1e-3);
    for (std::size_t k = 0; k < rn.size(); k += 97) CHECK(std::abs(rn.quaternion(k).norm() - 1) <= 1e-15);
}

TEST_CASE("Gibbs integration aborts on overflow") {
    const auto tr = integrate(Representation::gibbs_vector, AxisAngle{axes::k, 1.0}, OmegaModel::constant(axes::k), 0.0,
                              5.0, 1e-2);
    CHECK(tr.meta().aborted);
    CHECK(tr.meta().abort_code == ErrorCode::gibbs_overflow);
    CHECK(tr.meta().abort_time == doctest::Approx(pi - 1.0).epsilon(1e-2));
}

TEST_CASE("axis/angle integration aborts at the boundary") {
    const auto tr = integrate(Representation::axis_angle, AxisAngle{axes::i, two_pi - 0.5}, OmegaModel::constant(axes::i),
                              0.0, 1.0, 0.25);
    CHECK(tr.meta().aborted);
    CHECK(tr.meta().abort_code == ErrorCode::boundary_singularity);
}

TEST_CASE("Euler vector integration bridges a step landing on 2 pi") {
    // Two steps of 0.25 from 2 pi - 0.5 hit the boundary exactly.
    const EulerVector e0{{0, 0, two_pi - 0.5}};
    const auto tr = integrate(Representation::euler_vector, e0, OmegaModel::constant(axes::k), 0.0, 1.0, 0.25);
    CHECK_FALSE(tr.meta().aborted);
    CHECK(tr.meta().bridge_steps > 0);
    // Bridged steps carry quaternion RK4 error at this coarse step.
    CHECK(std::abs(tr.euler(tr.size() - 1).z - (two_pi + 0.5)) < 1e-6);
    IntegrateOptions off;
    off.euler_bridge = false;
    const auto ab = integrate(Representation::euler_vector, e0, OmegaModel::constant(axes::k), 0.0, 1.0, 0.25, off);
    CHECK(ab.meta().aborted);
    CHECK(ab.meta().abort_code == ErrorCode::boundary_singularity);
}

TEST_CASE("modified Gibbs integration is rejected") {
    CHECK(code_of([] {
              integrate(Representation::modified_gibbs, AxisAngle{}, OmegaModel::constant(axes::k), 0, 1, 0.1);
          }) == ErrorCode::invalid_argument);
}

TEST_CASE("matrix and quaternion integration agree") {
    const auto omega = OmegaModel::rotating_plane(40);
    const AxisAngle init{normalized(Vec3{1, 1, 1}), 1.0};
    const auto q = integrate(Representation::quaternion, init, omega, 0.0, 20.0, 1e-3);
    const auto R = integrate_rotation_matrix(matrix_from_axis_angle(init), omega, 0.0, 20.0, 1e-3);
    REQUIRE(R.size() == q.size());
    for (std::size_t k = 0; k < q.size(); k += 500) CHECK(frobenius_distance(q.matrix(k), R[k]) < 1e-9);
}

TEST_CASE("continuation keeps theta in step with omega along n") {
    const auto omega = OmegaModel::rotating_plane(40);
    const double dt = 1e-3;
    const auto q = integrate(Representation::quaternion, EulerVector{Vec3{1, 1, 1} / std::sqrt(3.0)}, omega, 0.0, 30.0,
                             dt);
    ContinuationOptions opt;
    opt.initial_theta = 1.0;
    const auto aa = continue_axis_angle(q, omega, opt);
    REQUIRE(aa.size() == q.size());
    for (std::size_t k = 1; k + 1 < aa.size(); ++k) {
        const auto s = aa.axis_angle(k);
        CHECK(std::abs(norm(s.n) - 1) < 1e-12);
        const double rate = (aa.axis_angle(k + 1).theta - aa.axis_angle(k - 1).theta) / (2 * dt);
        CHECK(std::abs(rate - dot(omega.eval(aa.time(k)), s.n)) <= 10 * dt * dt);
        CHECK(std::abs(aa.axis_angle(k + 1).theta - s.theta) <= dt * (1 + 1e-6));
    }
}

TEST_CASE("continuation with a sign change in omega drives theta negative") {
    std::vector<double> ts;
    std::vector<Vec3> ws;
    for (int k = 0; k <= 800; ++k) {
        const double t = -0.5 + 0.01 * k;
        ts.push_back(t);
        ws.push_back({0, 0, 1 - t / 2});
    }
    const auto omega = OmegaModel::tabulated(ts, ws);
    const auto q = integrate(Representation::quaternion, UnitQuaternion{1.0, {}}, omega, 0.0, 7.0, 1e-3);
    const auto aa = continue_axis_angle(q, omega);
    const auto &rec = aa.meta().continuation;
    REQUIRE(rec);
    double min_theta = 0.0;
    for (std::size_t k = 0; k < aa.size(); ++k) {
        const auto s = aa.axis_angle(k);
        CHECK(max_abs(s.n - axes::k) < 1e-12);
        const double t = aa.time(k);
        CHECK(std::abs(s.theta - (t - t * t / 4)) < 1e-9);
        min_theta = std::min(min_theta, s.theta);
    }
    CHECK(min_theta < -5.0);
    REQUIRE(rec->zero_times.size() == 2);
    CHECK(rec->zero_times[1] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(rec->parity_used[1] == 0);
    CHECK(rec->branches_after.back() == -1);
}

TEST_CASE("continuation rejects a zero where omega vanishes to high order") {
    // Starting at the identity with omega = 0: no derivative picks a direction.
    const auto omega = OmegaModel::constant({});
    const auto q = integrate(Representation::quaternion, UnitQuaternion{1.0, {}}, omega, 0.0, 0.5, 1e-3);
    CHECK(code_of([&] { continue_axis_angle(q, omega); }) == ErrorCode::parity_undetermined);
}

TEST_CASE("continuation needs a quaternion trajectory") {
    const auto e = integrate(Representation::euler_vector, EulerVector{{0.1, 0, 0}}, OmegaModel::constant(axes::k), 0,
                             1, 0.1);
    CHECK(code_of([&] { continue_axis_angle(e, OmegaModel::constant(axes::k)); }) == ErrorCode::invalid_argument);
}
