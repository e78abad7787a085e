#pragma once

// Three-way agreement suite between the analytic derivative kernels, the
// augmented block-exponential oracle, and central finite differences, run
// over seeded random instances for every control basis and constraint.
// Backs the `gradcheck` CLI subcommand and the acceptance tests.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pulsekit/geom.hpp"

namespace pulsekit {

struct GradcheckOptions {
    std::uint64_t seed = 20240601;
    int kernel_draws = 200;   // random parameter draws per basis
    int cost_draws = 12;      // random shapes per basis for the cost-level check
    double expm_bound = 1e-10;  // entrywise, analytic vs block exponential
    double fd_rel_bound = 1e-7;  // relative, analytic vs finite differences
    double fd_abs_floor = 1e-8;  // absolute floor for near-zero components
    std::string basis_filter;    // empty = all; otherwise a basis name or
                                 // "cartesian"/"polar" family prefix
    /// Test hook: perturb an analytic Cartesian dR matrix before the
    /// comparison (fault-injection fixture); production leaves this unset.
    std::function<void(Rotation3&, int /*control*/)> analytic_fault;
};

struct GradcheckRow {
    std::string label;           // basis (+ constraint) under test
    bool expm_checked = false;
    double max_vs_expm = 0.0;    // worst entrywise deviation vs the oracle
    double max_vs_fd = 0.0;      // worst relative deviation vs central FD
    double max_cost_fd = 0.0;    // worst cost-gradient deviation vs FD
    bool pass = true;
    std::string worst_entry;     // e.g. "dR_xx/dtheta_x" for the worst case
    std::string note;
};

struct GradcheckReport {
    std::vector<GradcheckRow> rows;
    bool pass = true;
};

GradcheckReport run_gradcheck(const GradcheckOptions& options);
void print_gradcheck(std::ostream& os, const GradcheckReport& report);

}  // namespace pulsekit
