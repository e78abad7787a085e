#include "pulsekit/gradients.hpp"

#include <cmath>
#include <stdexcept>

#include "pulsekit/parallel.hpp"

namespace pulsekit {
namespace {

// dR/du_c assembled from the shared scalar set.
Rotation3 d_rotation_du(const RotationParams& p, const AxisAngleScalars& s, int c) {
    const Vec3 u{p.theta_x, p.theta_y, p.theta_z};
    const double uc = u[static_cast<std::size_t>(c)];
    const double a = -s.f1 * uc;   // coefficient of I
    const double b = s.g1 * uc;    // coefficient of [u]_x
    const double e = s.g2 * uc;    // coefficient of u u^T
    Rotation3 m;
    // a I + b [u]_x + e u u^T
    m.m = {a + e * u[0] * u[0], -b * u[2] + e * u[0] * u[1], b * u[1] + e * u[0] * u[2],
           b * u[2] + e * u[0] * u[1], a + e * u[1] * u[1], -b * u[0] + e * u[1] * u[2],
           -b * u[1] + e * u[0] * u[2], b * u[0] + e * u[1] * u[2], a + e * u[2] * u[2]};
    // + f1 [e_c]_x
    const int i1 = (c + 1) % 3, i2 = (c + 2) % 3;
    m(i1, i2) -= s.f1;
    m(i2, i1) += s.f1;
    // + f2 (e_c u^T + u e_c^T)
    for (int k = 0; k < 3; ++k) {
        m(c, k) += s.f2 * u[static_cast<std::size_t>(k)];
        m(k, c) += s.f2 * u[static_cast<std::size_t>(k)];
    }
    return m;
}

Quaternion d_quaternion_du(const RotationParams& p, const AxisAngleScalars& s, int c) {
    const Vec3 u{p.theta_x, p.theta_y, p.theta_z};
    const double uc = u[static_cast<std::size_t>(c)];
    Quaternion q;
    q.a = s.kq * uc * u[0];
    q.b = s.kq * uc * u[1];
    q.c = s.kq * uc * u[2];
    if (c == 0) q.a += s.h;
    if (c == 1) q.b += s.h;
    if (c == 2) q.c += s.h;
    q.d = -0.5 * s.h * uc;
    return q;
}

Rotation3 combine(const Rotation3& mx, double wx, const Rotation3& my, double wy) {
    Rotation3 r;
    for (int i = 0; i < 9; ++i) r.m[static_cast<std::size_t>(i)] =
        wx * mx.m[static_cast<std::size_t>(i)] + wy * my.m[static_cast<std::size_t>(i)];
    return r;
}

Quaternion combine(const Quaternion& qx, double wx, const Quaternion& qy, double wy) {
    return {wx * qx.a + wy * qy.a, wx * qx.b + wy * qy.b,
            wx * qx.c + wy * qy.c, wx * qx.d + wy * qy.d};
}

// d Phi / d u_c for all three Cartesian directions of one digit: the
// contraction lambda^T (dR/du_c) rho expanded over the five structural
// terms of dR, sharing the dot products between controls.
Vec3 pp_digit_gamma(const RotationParams& p, const AxisAngleScalars& s, const Vec3& lambda,
                    const Vec3& rho) {
    const Vec3 u{p.theta_x, p.theta_y, p.theta_z};
    const double lr = dot(lambda, rho);
    const double l_uxr = dot(lambda, cross(u, rho));
    const double lu = dot(lambda, u);
    const double ur = dot(u, rho);
    const Vec3 rxl = cross(rho, lambda);
    Vec3 g;
    for (int c = 0; c < 3; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        g[ci] = u[ci] * (-s.f1 * lr + s.g1 * l_uxr + s.g2 * lu * ur) + s.f1 * rxl[ci] +
                s.f2 * (lambda[ci] * ur + rho[ci] * lu);
    }
    return g;
}

// d Phi / d u_c for the quaternion path: <P | (dQ/du_c) * X>.
Vec3 ur_digit_gamma(const RotationParams& p, const AxisAngleScalars& s, const Quaternion& suf,
                    const Quaternion& pre) {
    Vec3 g;
    for (int c = 0; c < 3; ++c) {
        const Quaternion dq = d_quaternion_du(p, s, c);
        g[static_cast<std::size_t>(c)] = dot(suf, quaternion_multiply(dq, pre));
    }
    return g;
}

// Map d Phi / d u_c of one digit onto the stored controls (B1 chain
// included; the constraint chain is applied afterwards on the amplitude
// block).  Writes into rec.at(j, *).
void map_digit_gamma(const ControlBasis& basis, const RotationParams& p, double b1_scale,
                     const Vec3& gamma, GradientRecord& rec, std::size_t j) {
    const double gx = gamma[0], gy = gamma[1], gz = gamma[2];
    switch (basis.kind) {
        case BasisKind::CartesianXY:
            rec.at(j, 0) = b1_scale * gx;
            rec.at(j, 1) = b1_scale * gy;
            break;
        case BasisKind::CartesianXYZ:
            rec.at(j, 0) = b1_scale * gx;
            rec.at(j, 1) = b1_scale * gy;
            rec.at(j, 2) = gz;
            break;
        case BasisKind::PolarAmpPhase:
        case BasisKind::PolarReducedAmpPhase:
            rec.at(j, 0) = b1_scale * (std::cos(p.alpha) * gx + std::sin(p.alpha) * gy);
            rec.at(j, 1) = -p.theta_y * gx + p.theta_x * gy;
            break;
        case BasisKind::PolarAmpPhaseZ:
        case BasisKind::PolarReducedAmpPhaseZ:
            rec.at(j, 0) = b1_scale * (std::cos(p.alpha) * gx + std::sin(p.alpha) * gy);
            rec.at(j, 1) = -p.theta_y * gx + p.theta_x * gy;
            rec.at(j, 2) = gz;
            break;
        case BasisKind::PhaseOnly:
            rec.at(j, 0) = -p.theta_y * gx + p.theta_x * gy;
            break;
    }
}

// Pull the amplitude block of a reduced-basis gradient back through the
// clamp Jacobian; other controls pass through unchanged.
void chain_constraint(const ControlBasis& basis, const ClampState& clamp, GradientRecord& rec) {
    if (!basis.is_reduced()) return;
    const std::size_t n = rec.digits();
    std::vector<double> amp_grad(n);
    for (std::size_t j = 0; j < n; ++j) amp_grad[j] = rec.at(j, 0);
    const auto chained = clamp.apply_jacobian(amp_grad);
    for (std::size_t j = 0; j < n; ++j) rec.at(j, 0) = chained[j];
}

struct CellResult {
    double phi = 0;
    GradientRecord grad;
};

// Evaluate cost and reduced-space gradient of one grid cell from
// pre-clamped amplitudes.
CellResult evaluate_cell(const PulseShape& shape, const Target& target,
                         const std::vector<double>* reduced_amps, double omega_off,
                         double b1_scale) {
    const std::size_t n = shape.size();
    const auto& basis = shape.basis;
    CellResult out;
    out.grad.arity = basis.arity();
    out.grad.values.assign(n * static_cast<std::size_t>(basis.arity()), 0.0);

    std::vector<RotationParams> params(n);
    const bool has_z = basis.has_z_control();
    for (std::size_t j = 0; j < n; ++j) {
        const auto& d = shape.digits[j];
        if (basis.is_cartesian()) {
            params[j] = params_from_rotation_vector(
                b1_scale * d.controls[0], b1_scale * d.controls[1],
                (has_z ? d.controls[2] : 0.0) + omega_off * d.dt);
        } else {
            const double amp = basis.kind == BasisKind::PhaseOnly ? basis.theta_xy_const
                               : reduced_amps != nullptr          ? (*reduced_amps)[j]
                                                                  : d.controls[0];
            const double alpha =
                basis.kind == BasisKind::PhaseOnly ? d.controls[0] : d.controls[1];
            const double tz = (has_z ? d.controls[2] : 0.0) + omega_off * d.dt;
            RotationParams p;
            const double ca = std::cos(alpha), sa = std::sin(alpha);
            const double pa = b1_scale * amp;
            p.theta_x = pa * ca;
            p.theta_y = pa * sa;
            p.theta_z = tz;
            p.theta_xy = pa;
            p.alpha = alpha;
            p.theta = std::sqrt(pa * pa + tz * tz);
            if (p.theta > kAxisEpsilon) {
                p.n_x = p.theta_x / p.theta;
                p.n_y = p.theta_y / p.theta;
                p.n_z = p.theta_z / p.theta;
            } else {
                p.n_x = p.n_y = 0;
                p.n_z = 1;
            }
            params[j] = p;
        }
    }

    if (target.kind == TargetKind::PointToPoint) {
        const auto cache = propagate_pp(params, target.rho0, target.lambda_f);
        out.phi = cost_pp(cache);
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 g = pp_digit_gamma(params[j], cache.scalars[j], cache.lambda[j + 1],
                                          cache.rho[j]);
            map_digit_gamma(basis, params[j], b1_scale, g, out.grad, j);
        }
    } else {
        const auto cache = propagate_ur(params, target.q_f);
        out.phi = cost_ur(cache);
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 g = ur_digit_gamma(params[j], cache.scalars[j], cache.suffix[j + 1],
                                          cache.prefix[j]);
            map_digit_gamma(basis, params[j], b1_scale, g, out.grad, j);
        }
    }
    return out;
}

std::pair<double, GradientRecord> gradient_single(const PulseShape& shape, const Target& target,
                                                  double omega_off, double b1_scale,
                                                  const ConstraintSpec* constraint) {
    shape.validate();
    if (shape.basis.is_reduced() && constraint == nullptr)
        throw std::invalid_argument("reduced basis requires a constraint");
    std::vector<double> reduced;
    ClampState clamp;
    const std::vector<double>* reduced_ptr = nullptr;
    if (shape.basis.is_reduced()) {
        clamp = clamp_shape(*constraint, shape.amplitudes());
        reduced = clamp.reduced;
        reduced_ptr = &reduced;
    }
    auto cell = evaluate_cell(shape, target, reduced_ptr, omega_off, b1_scale);
    if (shape.basis.is_reduced()) chain_constraint(shape.basis, clamp, cell.grad);
    return {cell.phi, std::move(cell.grad)};
}

}  // namespace

RotationDerivatives d_rotation_cartesian(const RotationParams& p) {
    const auto s = axis_angle_scalars(p.theta);
    RotationDerivatives out;
    for (int c = 0; c < 3; ++c) out.d[static_cast<std::size_t>(c)] = d_rotation_du(p, s, c);
    return out;
}

RotationDerivatives d_rotation_polar(const RotationParams& p) {
    const auto s = axis_angle_scalars(p.theta);
    const Rotation3 mx = d_rotation_du(p, s, 0);
    const Rotation3 my = d_rotation_du(p, s, 1);
    RotationDerivatives out;
    out.d[0] = combine(mx, -p.theta_y, my, p.theta_x);
    out.d[1] = combine(mx, std::cos(p.alpha), my, std::sin(p.alpha));
    out.d[2] = d_rotation_du(p, s, 2);
    return out;
}

QuaternionDerivatives d_quaternion(const RotationParams& p, bool polar) {
    const auto s = axis_angle_scalars(p.theta);
    QuaternionDerivatives out;
    if (!polar) {
        for (int c = 0; c < 3; ++c) out.d[static_cast<std::size_t>(c)] = d_quaternion_du(p, s, c);
        return out;
    }
    const Quaternion qx = d_quaternion_du(p, s, 0);
    const Quaternion qy = d_quaternion_du(p, s, 1);
    out.d[0] = combine(qx, -p.theta_y, qy, p.theta_x);
    out.d[1] = combine(qx, std::cos(p.alpha), qy, std::sin(p.alpha));
    out.d[2] = d_quaternion_du(p, s, 2);
    return out;
}

Rotation3 d_rotation_cartesian_single(const RotationParams& p, RotControl c) {
    const auto s = axis_angle_scalars(p.theta);
    return d_rotation_du(p, s, static_cast<int>(c));
}

Rotation3 d_rotation_polar_single(const RotationParams& p, PolarControl c) {
    const auto s = axis_angle_scalars(p.theta);
    switch (c) {
        case PolarControl::Alpha:
            return combine(d_rotation_du(p, s, 0), -p.theta_y, d_rotation_du(p, s, 1), p.theta_x);
        case PolarControl::Amplitude:
            return combine(d_rotation_du(p, s, 0), std::cos(p.alpha), d_rotation_du(p, s, 1),
                           std::sin(p.alpha));
        case PolarControl::Z:
        default:
            return d_rotation_du(p, s, 2);
    }
}

Quaternion d_quaternion_cartesian_single(const RotationParams& p, RotControl c) {
    const auto s = axis_angle_scalars(p.theta);
    return d_quaternion_du(p, s, static_cast<int>(c));
}

Quaternion d_quaternion_polar_single(const RotationParams& p, PolarControl c) {
    const auto s = axis_angle_scalars(p.theta);
    switch (c) {
        case PolarControl::Alpha:
            return combine(d_quaternion_du(p, s, 0), -p.theta_y, d_quaternion_du(p, s, 1),
                           p.theta_x);
        case PolarControl::Amplitude:
            return combine(d_quaternion_du(p, s, 0), std::cos(p.alpha), d_quaternion_du(p, s, 1),
                           std::sin(p.alpha));
        case PolarControl::Z:
        default:
            return d_quaternion_du(p, s, 2);
    }
}

std::pair<double, GradientRecord> gradient_pp(const PulseShape& shape, const Vec3& rho0,
                                              const Vec3& lambda_f, double omega_off,
                                              double b1_scale,
                                              const ConstraintSpec* constraint) {
    return gradient_single(shape, Target::point_to_point(rho0, lambda_f), omega_off, b1_scale,
                           constraint);
}

std::pair<double, GradientRecord> gradient_ur(const PulseShape& shape, const Quaternion& q_f,
                                              double omega_off, double b1_scale,
                                              const ConstraintSpec* constraint) {
    return gradient_single(shape, Target::universal_rotation(q_f), omega_off, b1_scale,
                           constraint);
}

GridEvaluation grid_average(const OptimizationProblem& problem, const PulseShape& shape,
                            int threads) {
    shape.validate();
    const auto& basis = shape.basis;
    const auto offsets = problem.grid.offsets_hz();
    const auto scales = problem.grid.b1_scales();
    const std::size_t n_cells = offsets.size() * scales.size();

    // The clamp depends on stored controls only: apply it once per
    // evaluation and share the reduced amplitudes across all grid cells.
    std::vector<double> reduced;
    ClampState clamp;
    const std::vector<double>* reduced_ptr = nullptr;
    if (basis.is_reduced()) {
        if (!problem.constraint.has_value())
            throw std::invalid_argument("reduced basis requires a constraint");
        clamp = clamp_shape(*problem.constraint, shape.amplitudes());
        reduced = clamp.reduced;
        reduced_ptr = &reduced;
    }

    std::vector<CellResult> cells(n_cells);
    parallel_for(n_cells, threads, [&](std::size_t idx) {
        const std::size_t i = idx / scales.size();  // offset-major
        const std::size_t l = idx % scales.size();
        cells[idx] = evaluate_cell(shape, problem.target, reduced_ptr,
                                   kTwoPi * offsets[i], scales[l]);
    });

    GridEvaluation out;
    out.grad.arity = basis.arity();
    out.grad.values.assign(shape.size() * static_cast<std::size_t>(basis.arity()), 0.0);
    for (std::size_t idx = 0; idx < n_cells; ++idx) {  // fixed-order reduction
        out.phi_bar += cells[idx].phi;
        for (std::size_t k = 0; k < out.grad.values.size(); ++k)
            out.grad.values[k] += cells[idx].grad.values[k];
    }
    const double inv = 1.0 / static_cast<double>(n_cells);
    out.phi_bar *= inv;
    for (auto& v : out.grad.values) v *= inv;
    if (basis.is_reduced()) chain_constraint(basis, clamp, out.grad);
    return out;
}

}  // namespace pulsekit
