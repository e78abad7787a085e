#pragma once

// Differentiable tanh limiters for transverse pulse amplitudes.  The
// optimizer works on unrestricted auxiliary amplitudes; the limiter maps
// them to physically admissible ones and provides the exact Jacobian
// action needed to pull cost gradients back into auxiliary space.
//
// Three flavours:
//   Amplitude -- per-digit cap  |amp_red| < theta_max
//   Power     -- mean(amp^2) over the shape < p_max_avg
//   Energy    -- sum(amp^2) over the shape < e_theta_max

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pulsekit {

enum class ConstraintKind { Amplitude, Power, Energy };

struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::Amplitude;
    // Amplitude: per-digit caps in radians (size 1 = uniform cap).
    std::vector<double> theta_max;
    // Power: limit on mean(theta_xy^2) [rad^2].
    double p_max_avg = 0.0;
    // Energy: limit on sum(theta_xy^2) [rad^2].
    double e_theta_max = 0.0;

    static ConstraintSpec amplitude(double cap) { return {ConstraintKind::Amplitude, {cap}, 0, 0}; }
    static ConstraintSpec amplitude(std::vector<double> caps) {
        return {ConstraintKind::Amplitude, std::move(caps), 0, 0};
    }
    static ConstraintSpec power(double p_max) { return {ConstraintKind::Power, {}, p_max, 0}; }
    static ConstraintSpec energy(double e_max) { return {ConstraintKind::Energy, {}, 0, e_max}; }

    double cap_for_digit(std::size_t j) const {
        return theta_max.size() == 1 ? theta_max[0] : theta_max.at(j);
    }
    void validate(std::size_t n_digits) const;
};

struct AmpClampResult {
    double theta_red;  // limited amplitude, |theta_red| < theta_max
    double slope;      // d theta_red / d theta_xy = sech^2(theta_xy/theta_max)
};

/// Per-digit limiter theta_red = theta_max * tanh(theta_xy / theta_max).
AmpClampResult amp_clamp(double theta_xy, double theta_max);

/// State of a shape-global (power/energy) or per-digit (amplitude) clamp,
/// holding everything needed to chain gradients back to auxiliary space.
struct ClampState {
    ConstraintKind kind = ConstraintKind::Amplitude;
    std::vector<double> reduced;  // clamped amplitudes, same length as input
    // Amplitude: per-digit slopes.  Power/Energy: uniform scale s plus the
    // rank-one coefficient of the Jacobian J = s*I + coeff * theta theta^T.
    std::vector<double> slopes;
    std::vector<double> theta;  // copy of the auxiliary input (power/energy)
    double scale = 1.0;
    double rank1_coeff = 0.0;

    /// Pull a gradient w.r.t. reduced amplitudes back to auxiliary space.
    /// O(N), never materializes the N x N Jacobian.
    std::vector<double> apply_jacobian(std::span<const double> grad_reduced) const;
};

/// Apply the clamp described by `spec` to the whole amplitude vector.
ClampState clamp_shape(const ConstraintSpec& spec, std::span<const double> theta_xy);

/// Shape-global mean-square power limiter (see ClampState for the Jacobian).
ClampState power_clamp(std::span<const double> theta_xy, double p_max_avg);

/// Shape-global sum-square energy limiter; identical machinery to
/// power_clamp without the 1/N in the activity measure.
ClampState energy_clamp(std::span<const double> theta_xy, double e_theta_max);

}  // namespace pulsekit
