#include "pulsekit/core.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsekit {

int ControlBasis::arity() const {
    switch (kind) {
        case BasisKind::CartesianXY: return 2;
        case BasisKind::CartesianXYZ: return 3;
        case BasisKind::PolarAmpPhase: return 2;
        case BasisKind::PolarAmpPhaseZ: return 3;
        case BasisKind::PolarReducedAmpPhase: return 2;
        case BasisKind::PolarReducedAmpPhaseZ: return 3;
        case BasisKind::PhaseOnly: return 1;
    }
    return 0;
}

int ControlBasis::amplitude_index() const {
    switch (kind) {
        case BasisKind::PolarAmpPhase:
        case BasisKind::PolarAmpPhaseZ:
        case BasisKind::PolarReducedAmpPhase:
        case BasisKind::PolarReducedAmpPhaseZ:
            return 0;
        default:
            return -1;
    }
}

void ControlBasis::validate() const {
    if (kind == BasisKind::PhaseOnly && !(theta_xy_const > 0))
        throw std::invalid_argument("phase_only basis needs theta_xy_const > 0");
}

std::string ControlBasis::name() const {
    switch (kind) {
        case BasisKind::CartesianXY: return "cartesian_xy";
        case BasisKind::CartesianXYZ: return "cartesian_xyz";
        case BasisKind::PolarAmpPhase: return "polar_amp_phase";
        case BasisKind::PolarAmpPhaseZ: return "polar_amp_phase_z";
        case BasisKind::PolarReducedAmpPhase: return "polar_reduced_amp_phase";
        case BasisKind::PolarReducedAmpPhaseZ: return "polar_reduced_amp_phase_z";
        case BasisKind::PhaseOnly: return "phase_only";
    }
    return "?";
}

ControlBasis ControlBasis::parse(const std::string& name, double theta_xy_const) {
    ControlBasis b;
    b.theta_xy_const = theta_xy_const;
    if (name == "cartesian_xy") b.kind = BasisKind::CartesianXY;
    else if (name == "cartesian_xyz") b.kind = BasisKind::CartesianXYZ;
    else if (name == "polar_amp_phase") b.kind = BasisKind::PolarAmpPhase;
    else if (name == "polar_amp_phase_z") b.kind = BasisKind::PolarAmpPhaseZ;
    else if (name == "polar_reduced_amp_phase") b.kind = BasisKind::PolarReducedAmpPhase;
    else if (name == "polar_reduced_amp_phase_z") b.kind = BasisKind::PolarReducedAmpPhaseZ;
    else if (name == "phase_only") b.kind = BasisKind::PhaseOnly;
    else throw std::invalid_argument("unknown control basis '" + name + "'");
    return b;
}

double PulseShape::duration() const {
    double t = 0;
    for (const auto& d : digits) t += d.dt;
    return t;
}

void PulseShape::validate() const {
    basis.validate();
    if (digits.empty()) throw std::invalid_argument("pulse shape needs at least one digit");
    const std::size_t arity = static_cast<std::size_t>(basis.arity());
    for (const auto& d : digits) {
        if (d.controls.size() != arity)
            throw std::invalid_argument("digit control count does not match basis arity");
        if (!(d.dt > 0)) throw std::invalid_argument("digit duration must be > 0");
    }
}

std::vector<double> PulseShape::amplitudes() const {
    std::vector<double> amps(digits.size());
    if (basis.kind == BasisKind::PhaseOnly) {
        std::fill(amps.begin(), amps.end(), basis.theta_xy_const);
    } else if (basis.is_cartesian()) {
        for (std::size_t j = 0; j < digits.size(); ++j)
            amps[j] = std::hypot(digits[j].controls[0], digits[j].controls[1]);
    } else {
        for (std::size_t j = 0; j < digits.size(); ++j) amps[j] = digits[j].controls[0];
    }
    return amps;
}

RotationParams params_from_rotation_vector(double tx, double ty, double tz) {
    RotationParams p;
    p.theta_x = tx;
    p.theta_y = ty;
    p.theta_z = tz;
    p.theta = std::sqrt(tx * tx + ty * ty + tz * tz);
    p.theta_xy = std::hypot(tx, ty);
    p.alpha = (tx == 0.0 && ty == 0.0) ? 0.0 : std::atan2(ty, tx);
    if (p.theta > kAxisEpsilon) {
        p.n_x = tx / p.theta;
        p.n_y = ty / p.theta;
        p.n_z = tz / p.theta;
    } else {
        p.n_x = 0;
        p.n_y = 0;
        p.n_z = 1;
    }
    return p;
}

namespace {

RotationParams params_from_polar(double theta_xy, double alpha, double tz) {
    RotationParams p;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    p.theta_x = theta_xy * ca;
    p.theta_y = theta_xy * sa;
    p.theta_z = tz;
    p.theta_xy = theta_xy;
    p.alpha = alpha;
    p.theta = std::sqrt(theta_xy * theta_xy + tz * tz);
    if (p.theta > kAxisEpsilon) {
        p.n_x = p.theta_x / p.theta;
        p.n_y = p.theta_y / p.theta;
        p.n_z = tz / p.theta;
    } else {
        p.n_x = 0;
        p.n_y = 0;
        p.n_z = 1;
    }
    return p;
}

}  // namespace

RotationParams digit_to_rotation_params(const Digit& digit, const ControlBasis& basis,
                                        double omega_off, double b1_scale,
                                        const ConstraintSpec* constraint) {
    if (digit.controls.size() != static_cast<std::size_t>(basis.arity()))
        throw std::invalid_argument("digit control count does not match basis arity");
    const double tz_off = omega_off * digit.dt;
    switch (basis.kind) {
        case BasisKind::CartesianXY:
            return params_from_rotation_vector(b1_scale * digit.controls[0],
                                               b1_scale * digit.controls[1], tz_off);
        case BasisKind::CartesianXYZ:
            return params_from_rotation_vector(b1_scale * digit.controls[0],
                                               b1_scale * digit.controls[1],
                                               digit.controls[2] + tz_off);
        case BasisKind::PolarAmpPhase:
            return params_from_polar(b1_scale * digit.controls[0], digit.controls[1], tz_off);
        case BasisKind::PolarAmpPhaseZ:
            return params_from_polar(b1_scale * digit.controls[0], digit.controls[1],
                                     digit.controls[2] + tz_off);
        case BasisKind::PolarReducedAmpPhase:
        case BasisKind::PolarReducedAmpPhaseZ: {
            if (constraint == nullptr)
                throw std::invalid_argument("reduced basis requires a constraint");
            const double aux = digit.controls[0];
            const auto st = clamp_shape(*constraint, std::span<const double>(&aux, 1));
            const double tz = basis.kind == BasisKind::PolarReducedAmpPhaseZ
                                  ? digit.controls[2] + tz_off
                                  : tz_off;
            return params_from_polar(b1_scale * st.reduced[0], digit.controls[1], tz);
        }
        case BasisKind::PhaseOnly:
            return params_from_polar(b1_scale * basis.theta_xy_const, digit.controls[0], tz_off);
    }
    throw std::logic_error("unreachable basis kind");
}

std::vector<RotationParams> shape_to_rotation_params(const PulseShape& shape,
                                                     double omega_off, double b1_scale,
                                                     const ConstraintSpec* constraint) {
    shape.validate();
    const std::size_t n = shape.size();
    std::vector<RotationParams> out;
    out.reserve(n);
    if (shape.basis.is_reduced()) {
        if (constraint == nullptr)
            throw std::invalid_argument("reduced basis requires a constraint");
        std::vector<double> aux(n);
        for (std::size_t j = 0; j < n; ++j) aux[j] = shape.digits[j].controls[0];
        const auto st = clamp_shape(*constraint, aux);
        const bool has_z = shape.basis.kind == BasisKind::PolarReducedAmpPhaseZ;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& d = shape.digits[j];
            const double tz = (has_z ? d.controls[2] : 0.0) + omega_off * d.dt;
            out.push_back(params_from_polar(b1_scale * st.reduced[j], d.controls[1], tz));
        }
        return out;
    }
    for (const auto& d : shape.digits)
        out.push_back(digit_to_rotation_params(d, shape.basis, omega_off, b1_scale, constraint));
    return out;
}

std::vector<double> GridSpec::offsets_hz() const {
    std::vector<double> v(static_cast<std::size_t>(n_off));
    if (n_off == 1) {
        v[0] = 0.0;
        return v;
    }
    const double half = bandwidth_hz / 2.0;
    for (int i = 0; i < n_off; ++i)
        v[static_cast<std::size_t>(i)] = -half + bandwidth_hz * i / (n_off - 1);
    return v;
}

std::vector<double> GridSpec::b1_scales() const {
    std::vector<double> v(static_cast<std::size_t>(n_rf));
    if (n_rf == 1) {
        v[0] = 1.0;
        return v;
    }
    for (int l = 0; l < n_rf; ++l)
        v[static_cast<std::size_t>(l)] = 1.0 - b1_tolerance + 2.0 * b1_tolerance * l / (n_rf - 1);
    return v;
}

void GridSpec::validate() const {
    if (n_off < 1) throw std::invalid_argument("n_off must be >= 1");
    if (n_rf < 1) throw std::invalid_argument("n_rf must be >= 1");
    if (bandwidth_hz < 0) throw std::invalid_argument("bandwidth_hz must be >= 0");
    if (b1_tolerance < 0 || b1_tolerance >= 1)
        throw std::invalid_argument("b1_tolerance must be in [0, 1)");
}

Target Target::point_to_point(const Vec3& rho0, const Vec3& lambda_f) {
    Target t;
    t.kind = TargetKind::PointToPoint;
    t.rho0 = rho0;
    t.lambda_f = lambda_f;
    t.validate();
    return t;
}

Target Target::universal_rotation(const Quaternion& q_f) {
    Target t;
    t.kind = TargetKind::UniversalRotation;
    t.q_f = q_f;
    t.validate();
    return t;
}

void Target::validate() const {
    constexpr double tol = 1e-9;
    if (kind == TargetKind::PointToPoint) {
        if (std::abs(norm(rho0) - 1.0) > tol || std::abs(norm(lambda_f) - 1.0) > tol)
            throw std::invalid_argument("PP target states must be unit vectors");
    } else {
        if (std::abs(q_f.norm() - 1.0) > tol)
            throw std::invalid_argument("UR target must be a unit quaternion");
    }
}

void OptimizerOptions::validate() const {
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    if (!(grad_tolerance > 0)) throw std::invalid_argument("grad_tolerance must be > 0");
    if (lbfgs_memory < 1) throw std::invalid_argument("lbfgs_memory must be >= 1");
    if (!(wolfe_c1 > 0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1))
        throw std::invalid_argument("need 0 < wolfe_c1 < wolfe_c2 < 1");
}

void OptimizationProblem::validate() const {
    shape_template.validate();
    grid.validate();
    target.validate();
    options.validate();
    if (shape_template.basis.is_reduced()) {
        if (!constraint.has_value())
            throw std::invalid_argument("reduced basis requires a constraint");
        constraint->validate(shape_template.size());
    }
    if (constraint.has_value() && !shape_template.basis.is_reduced())
        throw std::invalid_argument("constraints apply to reduced amplitude bases only");
}

}  // namespace pulsekit
