// The CSV files are the interface to the plotting side; these tests pin
// every schema and check that each round-trips through the readers.
#include "doctest.h"

#include "esl/csv.hpp"
#include "esl/dynamics.hpp"
#include "esl/error.hpp"

#include <filesystem>
#include <fstream>

using namespace esl;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path = fs::temp_directory_path() / "esl_schema_test";
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};
} // namespace

TEST_CASE("trajectory column sets") {
    using V = std::vector<std::string>;
    CHECK(Trajectory::columns(Representation::euler_vector) == V{"ex", "ey", "ez"});
    CHECK(Trajectory::columns(Representation::quaternion) == V{"m0", "mx", "my", "mz"});
    CHECK(Trajectory::columns(Representation::gibbs_vector) == V{"gx", "gy", "gz"});
    CHECK(Trajectory::columns(Representation::axis_angle) == V{"nx", "ny", "nz", "theta"});
}

TEST_CASE("trajectory CSV round-trips exactly for each representation") {
    TempDir dir;
    const AxisAngle init{normalized(Vec3{1, 2, 3}), 0.9};
    for (auto rep : {Representation::euler_vector, Representation::quaternion, Representation::gibbs_vector,
                     Representation::axis_angle}) {
        const auto tr = integrate(rep, init, OmegaModel::rotating_plane(40), 0.0, 1.0, 0.01);
        const auto path = dir.path / (std::string(to_string(rep)) + ".csv");
        tr.write_csv(path);
        const auto table = read_csv(path);
        CHECK(table.header.front() == "t");
        CHECK(table.rows.size() == tr.size());
        const auto back = Trajectory::read_csv(path);
        CHECK(back.representation() == rep);
        REQUIRE(back.size() == tr.size());
        for (std::size_t k = 0; k < tr.size(); ++k) {
            CHECK(back.time(k) == tr.time(k));
            for (std::size_t c = 0; c < tr.width(); ++c) CHECK(back.state(k)[c] == tr.state(k)[c]);
        }
    }
}

TEST_CASE("malformed trajectory files are schema mismatches") {
    TempDir dir;
    auto code = [](const fs::path &p) {
        try {
            Trajectory::read_csv(p);
        } catch (const Error &e) {
            return e.code();
        }
        return ErrorCode::invalid_argument;
    };
    auto write = [&](const std::string &name, const std::string &body) {
        std::ofstream(dir.path / name) << body;
        return dir.path / name;
    };
    CHECK(code(write("cols.csv", "t,ax,ay\n0,1,2\n0.1,1,2\n")) == ErrorCode::schema_mismatch);
    CHECK(code(write("short.csv", "t,ex,ey,ez\n0,1,2,3\n")) == ErrorCode::schema_mismatch);
    CHECK(code(write("grid.csv", "t,ex,ey,ez\n0,1,2,3\n0.1,1,2,3\n0.3,1,2,3\n")) == ErrorCode::schema_mismatch);
    CHECK(code(write("ragged.csv", "t,ex,ey,ez\n0,1,2,3\n0.1,1,2\n")) == ErrorCode::schema_mismatch);
    CHECK(code(write("text.csv", "t,ex,ey,ez\n0,1,2,x\n0.1,1,2,3\n")) == ErrorCode::schema_mismatch);
    CHECK(code(write("empty.csv", "")) == ErrorCode::schema_mismatch);
    CHECK(code(dir.path / "absent.csv") == ErrorCode::io_error);
}

TEST_CASE("doubles survive formatting") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, pi})
        CHECK(std::stod(format_double(v)) == v);
}
