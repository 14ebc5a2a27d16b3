#include "esl/trajectory.hpp"

#include "esl/csv.hpp"

#include <cmath>
#include <fstream>

namespace esl {

std::size_t grid_count(double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= t0)) throw Error(ErrorCode::invalid_argument, "need dt > 0 and t_end >= t0");
    const double q = (t_end - t0) / dt;
    return static_cast<std::size_t>(std::floor(q + 1e-9)) + 1;
}

Trajectory::Trajectory(Representation rep, TrajectoryMeta meta)
    : rep_(rep), width_(width(rep)), meta_(std::move(meta)) {}

std::vector<std::string> Trajectory::columns(Representation rep) {
    switch (rep) {
    case Representation::euler_vector: return {"ex", "ey", "ez"};
    case Representation::quaternion: return {"m0", "mx", "my", "mz"};
    case Representation::gibbs_vector: return {"gx", "gy", "gz"};
    case Representation::axis_angle: return {"nx", "ny", "nz", "theta"};
    case Representation::modified_gibbs: return {"mx", "my", "mz"};
    }
    return {};
}

std::size_t Trajectory::width(Representation rep) { return columns(rep).size(); }

void Trajectory::push_back(double t, std::span<const double> state) {
    if (state.size() != width_) throw Error(ErrorCode::invalid_argument, "state width mismatch");
    times_.push_back(t);
    data_.insert(data_.end(), state.begin(), state.end());
}

void Trajectory::reserve(std::size_t n) {
    times_.reserve(n);
    data_.reserve(n * width_);
}

std::vector<double> Trajectory::component(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = data_[k * width_ + c];
    return out;
}

std::vector<double> Trajectory::norms() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) {
        double s = 0.0;
        for (double v : state(k)) s += v * v;
        out[k] = std::sqrt(s);
    }
    return out;
}

Vec3 Trajectory::euler(std::size_t k) const {
    const auto s = state(k);
    return {s[0], s[1], s[2]};
}

UnitQuaternion Trajectory::quaternion(std::size_t k) const {
    const auto s = state(k);
    return {s[0], {s[1], s[2], s[3]}};
}

Vec3 Trajectory::gibbs(std::size_t k) const { return euler(k); }

AxisAngle Trajectory::axis_angle(std::size_t k) const {
    const auto s = state(k);
    return {{s[0], s[1], s[2]}, s[3]};
}

RotationMatrix Trajectory::matrix(std::size_t k) const {
    switch (rep_) {
    case Representation::euler_vector: return matrix_from_euler_vector(euler(k));
    case Representation::quaternion: return matrix_from_quaternion(quaternion(k));
    case Representation::gibbs_vector: return matrix_from_gibbs(gibbs(k));
    case Representation::axis_angle: return matrix_from_axis_angle(axis_angle(k));
    case Representation::modified_gibbs: {
        const Vec3 m = euler(k);
        return matrix_from_quaternion({std::sqrt(std::max(0.0, 1.0 - dot(m, m))), m});
    }
    }
    throw Error(ErrorCode::invalid_argument, "unknown representation");
}

void Trajectory::write_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    std::vector<std::string> header{"t"};
    for (auto &c : columns(rep_)) header.push_back(c);
    write_csv_header(out, header);
    std::vector<double> row(width_ + 1);
    for (std::size_t k = 0; k < size(); ++k) {
        row[0] = times_[k];
        const auto s = state(k);
        std::copy(s.begin(), s.end(), row.begin() + 1);
        write_csv_row(out, row);
    }
    if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

Trajectory Trajectory::read_csv(const std::filesystem::path &path) {
    const CsvTable table = esl::read_csv(path);
    if (table.header.empty() || table.header[0] != "t")
        throw Error(ErrorCode::schema_mismatch, path.string() + ": first column must be t");
    const std::vector<std::string> cols(table.header.begin() + 1, table.header.end());
    std::optional<Representation> rep;
    for (auto r : {Representation::euler_vector, Representation::quaternion, Representation::gibbs_vector,
                   Representation::axis_angle})
        if (columns(r) == cols) rep = r;
    if (!rep) throw Error(ErrorCode::schema_mismatch, path.string() + ": not a trajectory CSV");
    if (table.rows.size() < 2) throw Error(ErrorCode::schema_mismatch, path.string() + ": fewer than 2 samples");

    TrajectoryMeta meta;
    meta.t0 = table.rows.front()[0];
    meta.t_end = table.rows.back()[0];
    meta.dt = (meta.t_end - meta.t0) / static_cast<double>(table.rows.size() - 1);
    Trajectory traj(*rep, meta);
    traj.reserve(table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto &row = table.rows[k];
        const double expected = meta.t0 + static_cast<double>(k) * meta.dt;
        if (std::abs(row[0] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            throw Error(ErrorCode::schema_mismatch, path.string() + ": time grid is not uniform");
        traj.push_back(row[0], std::span<const double>(row).subspan(1));
    }
    return traj;
}

} // namespace esl
