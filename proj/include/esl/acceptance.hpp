// Acceptance checks shared by `esl verify` and the acceptance test binary.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace esl {

struct CheckResult {
    std::string name;
    bool pass = false;
    /// Headline measured quantity and the tolerance it was held to.
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    /// Tightens (below 1) or loosens (above 1) every numeric tolerance; the
    /// runtime limits are fixed. Must be positive.
    double tol_scale = 1.0;
    /// Run only the named check.
    std::optional<std::string> only;
};

std::vector<std::string> acceptance_check_names();

/// Throws Error(invalid_argument) when `only` names no check or the scale is
/// not positive.
std::vector<CheckResult> run_acceptance(const VerifyOptions &options = {});

/// One line per check: name, PASS/FAIL, value, tolerance, seconds, detail.
void print_report(std::ostream &os, const std::vector<CheckResult> &results);

} // namespace esl
