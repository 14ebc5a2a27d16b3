// Error reporting for the Euler spinor library.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace esl {

enum class ErrorCode {
    invalid_argument,
    gibbs_singularity,
    axis_undefined,
    out_of_range,
    not_differentiable,
    boundary_singularity,
    gibbs_overflow,
    parity_undetermined,
    parallel_axis,
    theta_out_of_range,
    period_too_small,
    trajectory_aborted,
    series_too_short,
    too_many_samples,
    schema_mismatch,
    io_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace esl
