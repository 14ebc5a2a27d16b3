// Time-stamped state sequences produced by the integrators.
#pragma once

#include "esl/error.hpp"
#include "esl/rotation.hpp"
#include "esl/vec3.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace esl {

/// Branch bookkeeping for a continued axis/angle trajectory.
struct ContinuationRecord {
    int initial_branch = 0;
    /// Branch l with 2*pi*l <= theta <= 2*pi*(l+1) at the end of the run.
    int branch = 0;
    std::vector<double> zero_times;
    /// Order of the first non-vanishing derivative of omega at each zero.
    std::vector<int> parity_used;
    /// Axis assigned at each zero (the common one-sided limit).
    std::vector<Vec3> limit_axes;
    /// Branch in force after each zero.
    std::vector<int> branches_after;
};

struct TrajectoryMeta {
    std::string omega;
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    bool aborted = false;
    double abort_time = 0.0;
    ErrorCode abort_code = ErrorCode::invalid_argument;
    std::string abort_reason;
    /// Euler steps taken through the quaternion form near |E| = 2*pi*k.
    std::size_t bridge_steps = 0;
    /// Sum and maximum over steps of | |q| - 1 | before renormalisation.
    double norm_drift_total = 0.0;
    double norm_drift_max = 0.0;
    std::optional<ContinuationRecord> continuation;
};

class Trajectory {
public:
    Trajectory(Representation rep, TrajectoryMeta meta);

    Representation representation() const { return rep_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    double time(std::size_t k) const { return times_[k]; }
    const std::vector<double> &times() const { return times_; }
    std::span<const double> state(std::size_t k) const { return {data_.data() + k * width_, width_}; }
    /// Column c of every sample.
    std::vector<double> component(std::size_t c) const;
    /// Euclidean norm of every sample's state vector.
    std::vector<double> norms() const;

    const TrajectoryMeta &meta() const { return meta_; }
    TrajectoryMeta &meta() { return meta_; }

    void push_back(double t, std::span<const double> state);
    void reserve(std::size_t n);

    /// Column names after `t` for this representation.
    static std::vector<std::string> columns(Representation rep);
    static std::size_t width(Representation rep);

    /// Writes `t,<columns>` with 17 significant digits.
    void write_csv(const std::filesystem::path &path) const;
    /// Reads a CSV written by write_csv; the representation is inferred from
    /// the header. The time grid must be uniform.
    static Trajectory read_csv(const std::filesystem::path &path);

    // Typed views.
    Vec3 euler(std::size_t k) const;
    UnitQuaternion quaternion(std::size_t k) const;
    Vec3 gibbs(std::size_t k) const;
    AxisAngle axis_angle(std::size_t k) const;
    /// Rotation matrix of sample k for any representation.
    RotationMatrix matrix(std::size_t k) const;

private:
    Representation rep_;
    std::size_t width_;
    std::vector<double> times_;
    std::vector<double> data_;
    TrajectoryMeta meta_;
};

/// Number of grid points floor((t_end - t0)/dt) + 1, tolerant of rounding in
/// the quotient.
std::size_t grid_count(double t0, double t_end, double dt);

} // namespace esl
