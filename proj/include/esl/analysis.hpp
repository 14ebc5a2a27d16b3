// Dynamical-systems diagnostics on trajectories: strobe sections, Lyapunov
// spectra, power spectra with peak picking, and recurrence matrices.
#pragma once

#include "esl/dynamics.hpp"
#include "esl/omega.hpp"
#include "esl/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace esl {

struct StrobeSeries {
    double period = 0.0;
    double offset = 0.0;
    std::vector<double> times;
    /// One state vector per strobe time, in the trajectory's coordinates.
    std::vector<std::vector<double>> points;
};

/// Samples at t0 + offset + k*period for every such time inside the
/// trajectory, by linear interpolation. Throws period_too_small when
/// period < 2*dt.
StrobeSeries strobe(const Trajectory &traj, double period, double offset = 0.0);

struct GapStats {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

/// Statistics of each point's distance to its nearest neighbour.
GapStats nearest_neighbor_gaps(const std::vector<std::vector<double>> &points);

struct LyapunovEstimate {
    /// Descending, in 1/time.
    std::vector<double> exponents;
    /// Running estimates after each re-orthonormalisation.
    std::vector<std::size_t> history_steps;
    std::vector<std::vector<double>> history;
    std::size_t steps = 0;
};

/// y' = f(t, y) written into dy.
using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

struct LyapunovSystem {
    VectorField f;
    std::vector<double> y0;
    /// Number of exponents; defaults to the state dimension.
    std::size_t count = 0;
    /// Called after every step; may modify the state (for example to
    /// renormalise it).
    std::function<void(std::span<double> y)> project_state;
    /// Normal of the constraint surface at y. Perturbations are kept
    /// orthogonal to it.
    std::function<std::vector<double>(std::span<const double> y)> constraint_normal;
};

/// Benettin's method: the state and a frame of perturbations evolve together
/// under RK4, the perturbations through a central-difference Jacobian
/// (h = 1e-6, relative for components above 1), and the frame is
/// re-orthonormalised every renorm_interval steps.
LyapunovEstimate lyapunov_spectrum(const LyapunovSystem &sys, double t0, std::size_t steps, double dt,
                                   std::size_t renorm_interval = 10);

/// Lyapunov spectrum of one of the rotation ODEs. The quaternion form is
/// linearised on the tangent space of the unit sphere and gives three
/// exponents. Throws trajectory_aborted on a singularity.
LyapunovEstimate lyapunov_spectrum(Representation rep, const OmegaModel &omega, const AnyRotation &initial,
                                   std::size_t steps, double dt, std::size_t renorm_interval = 10);

/// x' = diag(0.1, -0.2) x, whose exponents are exactly 0.1 and -0.2.
LyapunovEstimate lyapunov_self_test(std::size_t steps = 10000, double dt = 0.01);

enum class Window { hann, none };

std::string_view to_string(Window w);
Window window_from_string(std::string_view name);

struct Spectrum {
    std::vector<double> freqs;
    /// One-sided periodogram. With no window it sums to the variance of the
    /// mean-removed series; with a window it is scaled by the window's power.
    std::vector<double> power;
    /// Power of a unit-amplitude sinusoid centred on a bin; 0 dB.
    double reference_power = 0.5;
    Window window = Window::hann;
    double dt = 0.0;

    double db(std::size_t k) const;
};

/// Throws series_too_short when fewer than 64 samples are given.
Spectrum power_spectrum(std::span<const double> series, double dt, Window window = Window::hann);

struct Peak {
    double freq = 0.0;
    double power = 0.0;
    double prominence_db = 0.0;
    std::size_t bin = 0;
};

/// Local maxima (excluding DC) whose topographic prominence in dB is at least
/// min_prominence_db, strongest first.
std::vector<Peak> detect_peaks(const Spectrum &spec, double min_prominence_db, std::size_t max_peaks);

struct RecurrenceMatrix {
    double epsilon = 0.0;
    std::size_t stride = 1;
    std::size_t n = 0;
    std::vector<std::uint8_t> bits;

    bool at(std::size_t i, std::size_t j) const { return bits[i * n + j] != 0; }
};

/// Throws too_many_samples when the strided sample count exceeds this.
inline constexpr std::size_t max_recurrence_samples = 5000;

/// R_ij = 1 iff |x_i - x_j| <= epsilon for strided samples.
RecurrenceMatrix recurrence(const Trajectory &traj, double epsilon, std::size_t stride = 1);

/// Fraction of set entries on each diagonal i - j = lag, lag = 0..n-1.
std::vector<double> diagonal_recurrence_rate(const RecurrenceMatrix &r);

/// Lags (> 0) where the diagonal rate is a local maximum of at least
/// min_rate.
std::vector<std::size_t> band_lags(const RecurrenceMatrix &r, double min_rate);

} // namespace esl
