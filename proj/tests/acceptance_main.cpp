// Runs the acceptance checks and prints one line per check.
#include "esl/acceptance.hpp"

#include <algorithm>
#include <iostream>

int main() {
    const auto results = esl::run_acceptance();
    esl::print_report(std::cout, results);
    return std::all_of(results.begin(), results.end(), [](const esl::CheckResult &r) { return r.pass; }) ? 0 : 1;
}
