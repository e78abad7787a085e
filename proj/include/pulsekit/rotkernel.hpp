#pragma once

// Propagator construction and state propagation for a single spin-1/2.
//
// Everything is expressed through the unnormalized rotation vector
// u = (theta_x, theta_y, theta_z) and a set of even, entire scalar
// functions of the total angle, so no code path divides by theta or
// theta_xy.  The rotation matrix is
//
//   R = cos(t) I + f1(t) [u]_x + f2(t) u u^T
//
// with f1 = sin(t)/t and f2 = (1-cos(t))/t^2, which reproduces the
// component form R_hk = cos^2(t/2) + (2 n_h^2 - 1) sin^2(t/2) on the
// diagonal and 2 n_h n_k sin^2(t/2) - eps_hkl n_l sin(t) off it.  The
// quaternion is (A,B,C,D) = (u * sin(t/2)/t, cos(t/2)).

#include <vector>

#include "pulsekit/core.hpp"
#include "pulsekit/geom.hpp"

namespace pulsekit {

/// Shared per-digit trig values; g1, g2 and kq additionally feed the
/// derivative kernels.  All six are entire functions of theta and are
/// evaluated by series below theta = 1e-4.
struct AxisAngleScalars {
    double cos_t;   // cos(theta)
    double f1;      // sin(t)/t
    double f2;      // (1-cos t)/t^2
    double g1;      // (t cos t - sin t)/t^3        = f1'(t)/t
    double g2;      // (t sin t - 2(1-cos t))/t^4   = f2'(t)/t
    double cos_h;   // cos(t/2)
    double h;       // sin(t/2)/t
    double kq;      // (t cos(t/2)/2 - sin(t/2))/t^3 = h'(t)/t
};

AxisAngleScalars axis_angle_scalars(double theta);

Rotation3 rotation_from_params(const RotationParams& p);
Quaternion quaternion_from_params(const RotationParams& p);

/// Forward states, backward co-states and memoized per-digit data for a
/// point-to-point cost evaluation.  rho[j] = R_j ... R_1 rho0 and
/// lambda[j] = R_{j+1}^T ... R_N^T lambda_f, so <lambda[j]|rho[j]> is the
/// same number for every j and the gradient of digit j contracts
/// lambda[j+1] with rho[j] through dR_{j+1} (0-based arrays).
struct PropagationCachePP {
    std::vector<RotationParams> params;     // size N
    std::vector<AxisAngleScalars> scalars;  // size N
    std::vector<Vec3> rho;                  // size N+1, rho[0] = rho0
    std::vector<Vec3> lambda;               // size N+1, lambda[N] = lambda_f
};

/// Quaternion prefix/suffix products for a universal-rotation cost.
/// prefix[j] = Q_j ... Q_1 (prefix[0] = identity) and
/// suffix[j] = conj(Q_{j+1}) ... conj(Q_N) * q_f (suffix[N] = q_f), so
/// <suffix[j] | prefix[j]> equals the cost for every split point j.
struct PropagationCacheUR {
    std::vector<RotationParams> params;     // size N
    std::vector<AxisAngleScalars> scalars;  // size N
    std::vector<Quaternion> prefix;         // size N+1
    std::vector<Quaternion> suffix;         // size N+1
};

PropagationCachePP propagate_pp(const PulseShape& shape, const Vec3& rho0,
                                const Vec3& lambda_f, double omega_off, double b1_scale,
                                const ConstraintSpec* constraint = nullptr);

PropagationCacheUR propagate_ur(const PulseShape& shape, const Quaternion& q_f,
                                double omega_off, double b1_scale,
                                const ConstraintSpec* constraint = nullptr);

/// Build caches directly from precomputed per-digit rotations.
PropagationCachePP propagate_pp(const std::vector<RotationParams>& params, const Vec3& rho0,
                                const Vec3& lambda_f);
PropagationCacheUR propagate_ur(const std::vector<RotationParams>& params,
                                const Quaternion& q_f);

/// <lambda_f | rho_N>, in [-1, 1] for unit inputs.
double cost_pp(const PropagationCachePP& cache);

/// 4-vector overlap <q_f | Q_N ... Q_1>, in [-1, 1]; the user-facing
/// quality factor is its absolute value since +-Q describe one rotation.
double cost_ur(const PropagationCacheUR& cache);

}  // namespace pulsekit
