#pragma once

// Runtime comparison of the derivative kernels: analytic closed forms vs
// the augmented block exponential vs central finite differences, per
// control, for both the rotation-matrix and quaternion paths.  Reports
// microseconds per 1000 calls plus the cross-method ratios that are
// meaningful across hosts.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pulsekit {

struct BenchOptions {
    int calls = 1000;   // kernel invocations per timed run
    int reps = 5;       // timed runs; the minimum is reported
    std::uint64_t seed = 7;
};

struct BenchRow {
    std::string group;    // "PP (cartesian)", "UR (polar)", ...
    std::string method;   // "analytical", "exponential", "finite differences"
    std::string control;  // "theta_x", "alpha", ...
    double us_per_batch = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    int calls = 0;
    // Smallest per-control speedup of the analytic kernel over the block
    // exponential, and the worst-case analytic/FD ratio (either direction).
    double min_speedup_vs_expm = 0.0;
    double max_ratio_vs_fd = 0.0;
};

BenchReport run_bench(const BenchOptions& options);
void print_bench(std::ostream& os, const BenchReport& report);

}  // namespace pulsekit
