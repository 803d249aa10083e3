// Named verification suites behind the `verify` command: each check returns
// a pass/fail with the measured quantity, so reports stay machine-readable.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fjp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst residual / deviation for the check
    double threshold = 0.0;
    std::string detail;
};

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 7;
    int max_threads = 0;
    // test hook: perturbs the reversion gate's formula side by this amount;
    // any nonzero value must fail the gate
    double mutate_flow_coeff = 0.0;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opt);

}  // namespace fjp
