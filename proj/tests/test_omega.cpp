#include "doctest.h"
#include "support.hpp"

#include "esl/error.hpp"
#include "esl/omega.hpp"

#include <filesystem>
#include <fstream>

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
} // namespace

TEST_CASE("constant and rotating-plane models") {
    const auto c = OmegaModel::constant({0, 0, 2});
    CHECK(c.eval(17.0) == Vec3{0, 0, 2});
    const auto r = OmegaModel::rotating_plane(40.0);
    const double alpha = two_pi / 40.0;
    CHECK(max_abs(r.eval(3.0) - Vec3{std::cos(3 * alpha), std::sin(3 * alpha), 0}) < 1e-15);
    CHECK(max_abs(r.eval(43.0) - r.eval(3.0)) < 1e-12);
}

TEST_CASE("spec strings parse and describe themselves") {
    for (const std::string s : {"const:1,2,3", "rotplane:40", "rotplane:3.14,2", "pathological"}) {
        const auto m = OmegaModel::from_spec(s);
        const auto again = OmegaModel::from_spec(m.describe());
        CHECK(again.describe() == m.describe());
        CHECK(again.eval(0.7) == m.eval(0.7));
    }
    CHECK(OmegaModel::from_spec("rotplane:40").describe() == "rotplane:40");
    CHECK(max_abs(OmegaModel::from_spec("rotplane:40,2").eval(0.0) - Vec3{2, 0, 0}) < 1e-15);
    for (const std::string s : {"", "const:1,2", "rotplane:", "rotplane:-1", "spiral:3", "const:a,b,c"})
        CHECK(code_of([&] { OmegaModel::from_spec(s); }) == ErrorCode::invalid_argument);
}

TEST_CASE("pathological model") {
    const auto p = OmegaModel::pathological();
    CHECK(p.eval(0.0) == Vec3{});
    const double t = 0.3;
    const Vec3 expected = 3 * t * t * Vec3{std::sin(1 / t), std::cos(1 / t), 0} +
                          t * Vec3{-std::cos(1 / t), std::sin(1 / t), 0};
    CHECK(max_abs(p.eval(t) - expected) < 1e-15);
    CHECK(code_of([&] { p.eval(-0.1); }) == ErrorCode::out_of_range);
    CHECK(code_of([&] { omega_derivatives(p, 0.0, 1); }) == ErrorCode::not_differentiable);
    for (double t1 : {0.05, 0.5, 2.0}) {
        const Vec3 I = integrated_omega(p, 0.0, t1);
        const Vec3 exact = t1 * t1 * t1 * Vec3{std::sin(1 / t1), std::cos(1 / t1), 0};
        CHECK(max_abs(I - exact) < 1e-10);
        // Independent check: the integral differentiates back to omega.
        const double h = 1e-6 * t1;
        const Vec3 dI = (integrated_omega(p, 0.0, t1 + h) - integrated_omega(p, 0.0, t1 - h)) / (2 * h);
        CHECK(max_abs(dI - p.eval(t1)) < 1e-6);
        // |omega| = t sqrt(1 + 9 t^2) integrates to ((1 + 9t^2)^(3/2) - 1) / 27.
        CHECK(std::abs(arc_time(p, 0.0, t1) - (std::pow(1 + 9 * t1 * t1, 1.5) - 1) / 27) < 1e-10);
    }
    CHECK(code_of([&] { integrated_omega(p, -1.0, 1.0); }) == ErrorCode::out_of_range);
}

TEST_CASE("analytic derivatives match finite differences") {
    const auto r = OmegaModel::rotating_plane(7.0, 1.5);
    const auto d = omega_derivatives(r, 1.1, 4);
    REQUIRE(d.size() == 5);
    const double h = 1e-5;
    for (int j = 1; j <= 4; ++j) {
        const auto up = omega_derivatives(r, 1.1 + h, j - 1)[j - 1];
        const auto dn = omega_derivatives(r, 1.1 - h, j - 1)[j - 1];
        CHECK(max_abs((up - dn) / (2 * h) - d[j]) < 1e-7);
    }
    const auto p = OmegaModel::pathological();
    const auto pd = omega_derivatives(p, 0.7, 1);
    CHECK(max_abs((p.eval(0.7 + h) - p.eval(0.7 - h)) / (2 * h) - pd[1]) < 1e-6);
}

TEST_CASE("tabulated model interpolates and guards its range") {
    std::vector<double> ts;
    std::vector<Vec3> ws;
    for (int k = 0; k <= 400; ++k) {
        const double t = 0.01 * k;
        ts.push_back(t);
        ws.push_back({std::sin(t), t * t, 1.0});
    }
    const auto tab = OmegaModel::tabulated(ts, ws);
    CHECK(max_abs(tab.eval(1.234) - Vec3{std::sin(1.234), 1.234 * 1.234, 1.0}) < 1e-7);
    CHECK(code_of([&] { tab.eval(4.01); }) == ErrorCode::out_of_range);
    CHECK(code_of([&] { tab.eval(-0.01); }) == ErrorCode::out_of_range);
    const auto d = omega_derivatives(tab, 2.0, 2);
    CHECK(max_abs(d[1] - Vec3{std::cos(2.0), 4.0, 0}) < 1e-5);
    CHECK(max_abs(d[2] - Vec3{-std::sin(2.0), 2.0, 0}) < 1e-3);
}

TEST_CASE("reversed model replays backwards") {
    const auto r = OmegaModel::rotating_plane(10.0);
    const auto rev = OmegaModel::reversed(r, 3.0);
    CHECK(max_abs(rev.eval(1.0) + r.eval(2.0)) < 1e-15);
    const auto d = omega_derivatives(rev, 1.0, 2);
    const auto dr = omega_derivatives(r, 2.0, 2);
    CHECK(max_abs(d[1] - dr[1]) < 1e-12);
    CHECK(max_abs(d[2] + dr[2]) < 1e-12);
}

TEST_CASE("arc time is increasing and exact for constant speed") {
    const auto r = OmegaModel::rotating_plane(40.0, 2.0);
    CHECK(arc_time(r, 0.0, 5.0) == doctest::Approx(10.0).epsilon(1e-12));
    const auto p = OmegaModel::pathological();
    double prev = 0.0;
    for (double t = 0.1; t < 2.0; t += 0.1) {
        const double a = arc_time(p, 0.0, t);
        CHECK(a > prev);
        prev = a;
    }
}

TEST_CASE("tabulated CSV loading") {
    const auto dir = std::filesystem::temp_directory_path() / "esl_omega_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "w.csv");
        out << "t,wx,wy,wz\n";
        for (int k = 0; k < 10; ++k) out << k * 0.1 << ",0,0," << 1 + k * 0.1 << '\n';
    }
    const auto m = OmegaModel::from_spec("csv:" + (dir / "w.csv").string());
    CHECK(m.eval(0.45).z == doctest::Approx(1.45).epsilon(1e-12));
    {
        std::ofstream out(dir / "bad.csv");
        out << "t,x,y\n0,1,2\n";
    }
    CHECK(code_of([&] { load_tabulated_csv(dir / "bad.csv"); }) == ErrorCode::schema_mismatch);
    CHECK(code_of([&] { load_tabulated_csv(dir / "missing.csv"); }) == ErrorCode::io_error);
    std::filesystem::remove_all(dir);
}
