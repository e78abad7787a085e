#pragma once

// Quasi-Newton maximization of the grid-averaged quality factor over the
// stored pulse controls: limited-memory BFGS (two-loop recursion) with a
// strong Wolfe line search, minimizing f = 1 - phi_bar (point-to-point)
// or f = 1 - |phi_bar| (universal rotation).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pulsekit/core.hpp"
#include "pulsekit/gradients.hpp"

namespace pulsekit {

enum class Termination { Converged, MaxIterations, LineSearchFailure };

std::string termination_name(Termination t);

struct OptimizationResult {
    PulseShape shape;                // best shape found
    std::vector<double> trajectory;  // phi_bar after each accepted step,
                                     // index 0 = initial point; non-decreasing
    double quality = 0.0;            // phi_bar (PP) or |phi_bar| (UR)
    double signed_phi = 0.0;         // signed phi_bar at the final point
    int iterations = 0;              // accepted steps
    double wall_time_s = 0.0;
    Termination termination = Termination::MaxIterations;
    std::uint64_t seed = 0;
};

/// Draw an initial shape from the problem template.  RandomPhase puts
/// every digit at half the initialization amplitude with a uniform random
/// phase; RandomSmall draws every control from N(0, (0.1 amp)^2).
/// Deterministic for a fixed seed.
PulseShape init_shape(const OptimizationProblem& problem, InitStrategy strategy,
                      std::uint64_t seed);

OptimizationResult optimize(const OptimizationProblem& problem, const PulseShape& initial,
                            int threads = 1);

struct MultistartResult {
    OptimizationResult best;
    std::vector<OptimizationResult> all;  // one entry per seed, in seed order
};

/// Run one optimization per seed from fresh random initializations and
/// keep the best final quality.
MultistartResult multistart(const OptimizationProblem& problem,
                            const std::vector<std::uint64_t>& seeds, int threads = 1);

/// Generic L-BFGS driver exposed for testing; minimizes f(x) given a
/// combined value/gradient callback.
struct LbfgsReport {
    std::vector<double> x;
    double f = 0.0;
    std::vector<double> g;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;
    std::vector<double> f_history;  // f after each accepted step, [0] = initial
};

using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

LbfgsReport lbfgs_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                           const OptimizerOptions& options);

}  // namespace pulsekit
