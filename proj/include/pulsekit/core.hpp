#pragma once

// Domain types shared by every module: control bases, shaped pulses,
// per-digit axis/angle data, offset/B1 grids and optimization targets.
// All types are immutable values after construction and safe to share
// across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pulsekit/constraints.hpp"
#include "pulsekit/geom.hpp"

namespace pulsekit {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Below this total rotation angle the axis is conventionally (0,0,1);
/// kernels use series forms so nothing downstream divides by theta.
inline constexpr double kAxisEpsilon = 1e-9;

enum class BasisKind {
    CartesianXY,            // (theta_x, theta_y)
    CartesianXYZ,           // (theta_x, theta_y, theta_z)
    PolarAmpPhase,          // (theta_xy, alpha)
    PolarAmpPhaseZ,         // (theta_xy, alpha, theta_z)
    PolarReducedAmpPhase,   // (aux amplitude, alpha), tanh-limited
    PolarReducedAmpPhaseZ,  // (aux amplitude, alpha, theta_z), tanh-limited
    PhaseOnly,              // (alpha), fixed transverse amplitude
};

struct ControlBasis {
    BasisKind kind = BasisKind::CartesianXY;
    double theta_xy_const = 0.0;  // fixed amplitude [rad] for PhaseOnly

    int arity() const;
    bool is_cartesian() const {
        return kind == BasisKind::CartesianXY || kind == BasisKind::CartesianXYZ;
    }
    bool is_reduced() const {
        return kind == BasisKind::PolarReducedAmpPhase ||
               kind == BasisKind::PolarReducedAmpPhaseZ;
    }
    bool has_z_control() const {
        return kind == BasisKind::CartesianXYZ || kind == BasisKind::PolarAmpPhaseZ ||
               kind == BasisKind::PolarReducedAmpPhaseZ;
    }
    /// Index of the amplitude control within a digit, or -1 if none.
    int amplitude_index() const;
    void validate() const;

    std::string name() const;
    static ControlBasis parse(const std::string& name, double theta_xy_const = 0.0);
};

/// One piecewise-constant segment of a shaped pulse.
struct Digit {
    std::vector<double> controls;
    double dt = 0.0;  // seconds, > 0
};

struct PulseShape {
    std::vector<Digit> digits;
    ControlBasis basis;

    std::size_t size() const { return digits.size(); }
    double duration() const;
    void validate() const;  // throws std::invalid_argument on contract breaks

    /// Transverse amplitude controls of all digits (auxiliary values for
    /// reduced bases, the fixed constant for PhaseOnly).
    std::vector<double> amplitudes() const;
};

/// Physical rotation of one digit at one grid point: the dimensionless
/// rotation vector (theta_x, theta_y, theta_z) with the offset term folded
/// into theta_z, the total angle, the unit axis, and the polar form.
struct RotationParams {
    double theta_x = 0, theta_y = 0, theta_z = 0;
    double theta = 0;             // sqrt(tx^2+ty^2+tz^2) >= 0
    double n_x = 0, n_y = 0, n_z = 1;
    double theta_xy = 0;          // transverse amplitude; may be negative
                                  // for auxiliary shapes mid-optimization
    double alpha = 0;             // transverse phase [rad]
};

RotationParams params_from_rotation_vector(double tx, double ty, double tz);

/// Build the physical rotation of `digit` at offset omega_off [rad/s] and
/// B1 scale `b1_scale`.  The scale multiplies the transverse amplitude
/// only; reduced bases pass the stored amplitude through `constraint`
/// first (Power/Energy specs treat the digit as a length-1 shape).
RotationParams digit_to_rotation_params(const Digit& digit, const ControlBasis& basis,
                                        double omega_off, double b1_scale,
                                        const ConstraintSpec* constraint = nullptr);

/// Shape-level conversion; this is the only correct entry point for
/// shape-global (power/energy) constraints.
std::vector<RotationParams> shape_to_rotation_params(const PulseShape& shape,
                                                     double omega_off, double b1_scale,
                                                     const ConstraintSpec* constraint = nullptr);

/// Offset/B1 robustness grid: n_off offsets linearly spaced across
/// +-bandwidth/2 and n_rf B1 scales linearly spaced across 1 +- tolerance.
struct GridSpec {
    int n_off = 1;
    double bandwidth_hz = 0.0;
    int n_rf = 1;
    double b1_tolerance = 0.0;

    std::vector<double> offsets_hz() const;
    std::vector<double> b1_scales() const;
    int cells() const { return n_off * n_rf; }
    void validate() const;
};

enum class TargetKind { PointToPoint, UniversalRotation };

struct Target {
    TargetKind kind = TargetKind::PointToPoint;
    Vec3 rho0{0, 0, 1};      // PP initial state (unit)
    Vec3 lambda_f{0, -1, 0}; // PP final state (unit)
    Quaternion q_f;          // UR target propagator (unit)

    static Target point_to_point(const Vec3& rho0, const Vec3& lambda_f);
    static Target universal_rotation(const Quaternion& q_f);
    void validate() const;
};

enum class InitStrategy { RandomPhase, RandomSmall, FromFile };

struct OptimizerOptions {
    int max_iterations = 2000;
    double grad_tolerance = 1e-8;  // inf-norm threshold on grad(1 - phi)
    int lbfgs_memory = 10;
    std::uint64_t seed = 1;
    InitStrategy init_strategy = InitStrategy::RandomPhase;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;

    void validate() const;
};

struct OptimizationProblem {
    PulseShape shape_template;
    GridSpec grid;
    Target target;
    std::optional<ConstraintSpec> constraint;
    OptimizerOptions options;
    /// Amplitude scale used by initialization strategies [rad]; for reduced
    /// bases this defaults to the constraint cap.
    double init_amplitude = 0.0;

    void validate() const;
};

}  // namespace pulsekit
