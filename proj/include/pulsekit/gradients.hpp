#pragma once

// Analytical derivative kernels for every control set and the assembly of
// exact cost gradients per digit, averaged over the offset/B1 grid.
//
// Derivatives are assembled from the same singularity-free scalar set as
// the propagators.  With u the rotation vector and e_c a Cartesian unit
// vector,
//
//   dR/du_c = -f1 u_c I + g1 u_c [u]_x + f1 [e_c]_x
//             + g2 u_c u u^T + f2 (e_c u^T + u e_c^T)
//   dQ/du_c = (h e_c + kq u_c u,  -h u_c / 2)
//
// and the polar controls follow by the chain rule through
// u = (p cos(alpha), p sin(alpha), theta_z):
//
//   d/d alpha    = -u_y d/du_x + u_x d/du_y
//   d/d theta_xy = cos(alpha) d/du_x + sin(alpha) d/du_y
//   d/d theta_z  = d/du_z
//
// This reproduces the closed-form component tables entry by entry while
// staying finite for theta -> 0 and theta_xy -> 0.

#include <array>

#include "pulsekit/constraints.hpp"
#include "pulsekit/core.hpp"
#include "pulsekit/rotkernel.hpp"

namespace pulsekit {

enum class RotControl { X = 0, Y = 1, Z = 2 };
enum class PolarControl { Alpha = 0, Amplitude = 1, Z = 2 };

/// Derivative matrices of the rotation propagator, one per active control.
struct RotationDerivatives {
    std::array<Rotation3, 3> d;
    int count = 3;
};

/// Derivative 4-vectors of the propagator quaternion.
struct QuaternionDerivatives {
    std::array<Quaternion, 3> d;
    int count = 3;
};

/// dR w.r.t. (theta_x, theta_y, theta_z).
RotationDerivatives d_rotation_cartesian(const RotationParams& p);
/// dR w.r.t. (alpha, theta_xy, theta_z).
RotationDerivatives d_rotation_polar(const RotationParams& p);
/// dQ w.r.t. (theta_x, theta_y, theta_z) or (alpha, theta_xy, theta_z).
QuaternionDerivatives d_quaternion(const RotationParams& p, bool polar);

/// Single-control kernels (what a per-derivative benchmark times).
Rotation3 d_rotation_cartesian_single(const RotationParams& p, RotControl c);
Rotation3 d_rotation_polar_single(const RotationParams& p, PolarControl c);
Quaternion d_quaternion_cartesian_single(const RotationParams& p, RotControl c);
Quaternion d_quaternion_polar_single(const RotationParams& p, PolarControl c);

/// Per-digit cost derivatives in the stored control basis, flattened
/// digit-major (length = N * basis arity).
struct GradientRecord {
    std::vector<double> values;
    int arity = 0;

    std::size_t digits() const {
        return arity == 0 ? 0 : values.size() / static_cast<std::size_t>(arity);
    }
    double& at(std::size_t digit, int control) {
        return values[digit * static_cast<std::size_t>(arity) + static_cast<std::size_t>(control)];
    }
    double at(std::size_t digit, int control) const {
        return values[digit * static_cast<std::size_t>(arity) + static_cast<std::size_t>(control)];
    }
};

/// Exact gradient of <lambda_f|rho_N> with respect to the stored controls
/// of `shape` at one grid point (B1 chain and, for reduced bases, the
/// constraint chain included).  One forward plus one backward pass.
std::pair<double, GradientRecord> gradient_pp(const PulseShape& shape, const Vec3& rho0,
                                              const Vec3& lambda_f, double omega_off,
                                              double b1_scale,
                                              const ConstraintSpec* constraint = nullptr);

/// Exact gradient of <q_f|Q_N...Q_1> (signed) at one grid point.
std::pair<double, GradientRecord> gradient_ur(const PulseShape& shape, const Quaternion& q_f,
                                              double omega_off, double b1_scale,
                                              const ConstraintSpec* constraint = nullptr);

struct GridEvaluation {
    double phi_bar = 0.0;  // signed average cost over the grid
    GradientRecord grad;   // averaged gradient in stored-control space
};

/// Arithmetic mean of per-grid-point costs and gradients, accumulated in
/// fixed offset-major order; `threads` > 1 parallelizes across grid cells
/// with the same deterministic reduction.
GridEvaluation grid_average(const OptimizationProblem& problem, const PulseShape& shape,
                            int threads = 1);

}  // namespace pulsekit
