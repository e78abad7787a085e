#include "pulsekit/gradcheck.hpp"

#include <cmath>
#include <ostream>

#include "pulsekit/core.hpp"
#include "pulsekit/gradients.hpp"
#include "pulsekit/oracles.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/rotkernel.hpp"

namespace pulsekit {
namespace {

const char* kAxisName[3] = {"x", "y", "z"};
const char* kPolarName[3] = {"alpha", "theta_xy", "theta_z"};
const char* kQuatComp[4] = {"A", "B", "C", "D"};

struct Tracker {
    double worst = 0.0;
    std::string entry;

    void feed(double dev, const std::string& name) {
        if (dev > worst) {
            worst = dev;
            entry = name;
        }
    }
};

RotationParams random_params(Rng& rng, bool small_theta) {
    double tx = rng.uniform(-3, 3), ty = rng.uniform(-3, 3), tz = rng.uniform(-3, 3);
    if (small_theta) {
        const double scale = std::pow(10.0, rng.uniform(-8, -5));
        tx *= scale;
        ty *= scale;
        tz *= scale;
    }
    return params_from_rotation_vector(tx, ty, tz);
}

RotationParams random_polar_params(Rng& rng, int flavor) {
    double amp = rng.uniform(0.0, 3.0);
    if (flavor == 1) amp = rng.uniform(0.0, 1.0) * 1e-6;           // tiny amplitude
    if (flavor == 2) amp = -rng.uniform(0.0, 2.0);                 // signed amplitude
    const double alpha = rng.uniform(-3.2, 3.2);
    double tz = rng.uniform(-3, 3);
    if (flavor == 3) tz = rng.uniform(-1, 1) * 1e-7;               // tiny total angle
    if (flavor == 3) amp = rng.uniform(0.0, 1.0) * 1e-7;
    RotationParams p;
    p.theta_xy = amp;
    p.alpha = alpha;
    p.theta_x = amp * std::cos(alpha);
    p.theta_y = amp * std::sin(alpha);
    p.theta_z = tz;
    p.theta = std::sqrt(amp * amp + tz * tz);
    if (p.theta > kAxisEpsilon) {
        p.n_x = p.theta_x / p.theta;
        p.n_y = p.theta_y / p.theta;
        p.n_z = p.theta_z / p.theta;
    }
    return p;
}

double matrix_scale(const Rotation3& a, const Rotation3& b) {
    double m = 0;
    for (int i = 0; i < 9; ++i)
        m = std::max({m, std::abs(a.m[static_cast<std::size_t>(i)]),
                      std::abs(b.m[static_cast<std::size_t>(i)])});
    return m;
}

// Relative deviation with an absolute floor folded into the denominator.
double rel_dev(double delta, double scale, double floor_scale) {
    return delta / std::max(scale, floor_scale);
}

void check_rot_pair(const Rotation3& analytic, const Rotation3& reference, double floor_scale,
                    const char* dname, const char* control, Tracker& tr) {
    const double scale = std::max(matrix_scale(analytic, reference), floor_scale);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double dev = std::abs(analytic(r, c) - reference(r, c)) / scale;
            tr.feed(dev, std::string("dR_") + kAxisName[r] + kAxisName[c] + "/d" + dname +
                             "_" + control);
        }
}

void check_quat_pair(const Quaternion& analytic, const Quaternion& reference, double floor_scale,
                     const char* dname, const char* control, Tracker& tr) {
    const Vec4 a = analytic.as_vec4(), b = reference.as_vec4();
    double scale = floor_scale;
    for (int i = 0; i < 4; ++i) scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    for (int i = 0; i < 4; ++i)
        tr.feed(std::abs(a[i] - b[i]) / scale,
                std::string("dQ_") + kQuatComp[i] + "/d" + dname + "_" + control);
}

Rotation3 fd_rotation_cartesian(const RotationParams& p, int c, double h) {
    Vec3 u{p.theta_x, p.theta_y, p.theta_z};
    auto eval = [&](double x) {
        Vec3 v = u;
        v[static_cast<std::size_t>(c)] = x;
        return rotation_from_params(params_from_rotation_vector(v[0], v[1], v[2]));
    };
    return oracles::finite_difference(eval, u[static_cast<std::size_t>(c)], h);
}

Quaternion fd_quaternion_cartesian(const RotationParams& p, int c, double h) {
    Vec3 u{p.theta_x, p.theta_y, p.theta_z};
    auto eval = [&](double x) {
        Vec3 v = u;
        v[static_cast<std::size_t>(c)] = x;
        return quaternion_from_params(params_from_rotation_vector(v[0], v[1], v[2]));
    };
    return oracles::finite_difference(eval, u[static_cast<std::size_t>(c)], h);
}

RotationParams polar_point(double amp, double alpha, double tz) {
    RotationParams p;
    p.theta_xy = amp;
    p.alpha = alpha;
    p.theta_x = amp * std::cos(alpha);
    p.theta_y = amp * std::sin(alpha);
    p.theta_z = tz;
    p.theta = std::sqrt(amp * amp + tz * tz);
    if (p.theta > kAxisEpsilon) {
        p.n_x = p.theta_x / p.theta;
        p.n_y = p.theta_y / p.theta;
        p.n_z = p.theta_z / p.theta;
    }
    return p;
}

Rotation3 fd_rotation_polar(const RotationParams& p, int c, double h) {
    const double base[3] = {p.alpha, p.theta_xy, p.theta_z};
    auto eval = [&](double x) {
        double v[3] = {base[0], base[1], base[2]};
        v[c] = x;
        return rotation_from_params(polar_point(v[1], v[0], v[2]));
    };
    return oracles::finite_difference(eval, base[c], h);
}

Quaternion fd_quaternion_polar(const RotationParams& p, int c, double h) {
    const double base[3] = {p.alpha, p.theta_xy, p.theta_z};
    auto eval = [&](double x) {
        double v[3] = {base[0], base[1], base[2]};
        v[c] = x;
        return quaternion_from_params(polar_point(v[1], v[0], v[2]));
    };
    return oracles::finite_difference(eval, base[c], h);
}

PulseShape random_shape(Rng& rng, const ControlBasis& basis, std::size_t n) {
    PulseShape s;
    s.basis = basis;
    s.digits.resize(n);
    for (auto& d : s.digits) {
        d.dt = 1.0;  // work directly in rotation-angle units
        switch (basis.kind) {
            case BasisKind::CartesianXY:
                d.controls = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
                break;
            case BasisKind::CartesianXYZ:
                d.controls = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                              rng.uniform(-1, 1)};
                break;
            case BasisKind::PolarAmpPhase:
                d.controls = {rng.uniform(0, 1.5), rng.uniform(0, kTwoPi)};
                break;
            case BasisKind::PolarAmpPhaseZ:
                d.controls = {rng.uniform(0, 1.5), rng.uniform(0, kTwoPi), rng.uniform(-1, 1)};
                break;
            case BasisKind::PolarReducedAmpPhase:
                d.controls = {rng.uniform(-1.5, 1.5), rng.uniform(0, kTwoPi)};
                break;
            case BasisKind::PolarReducedAmpPhaseZ:
                d.controls = {rng.uniform(-1.5, 1.5), rng.uniform(0, kTwoPi),
                              rng.uniform(-1, 1)};
                break;
            case BasisKind::PhaseOnly:
                d.controls = {rng.uniform(0, kTwoPi)};
                break;
        }
    }
    return s;
}

// Compare the analytic cost gradient against central differences of the
// cost itself, stepping the stored controls.
void check_cost_gradient(Rng& rng, const ControlBasis& basis, const ConstraintSpec* constraint,
                         bool ur_target, int draws, double floor_scale, Tracker& tr) {
    static const std::size_t sizes[3] = {1, 6, 16};
    for (int i = 0; i < draws; ++i) {
        const PulseShape shape = random_shape(rng, basis, sizes[i % 3]);
        const double omega_off = rng.uniform(-0.8, 0.8);  // dt = 1
        const double scale = rng.uniform(0.85, 1.15);
        const Vec3 rho0{0, 0, 1};
        const Vec3 lambda_f{0, -1, 0};
        Quaternion q_f{0.5, -0.5, 0.5, 0.5};

        GradientRecord grad;
        if (ur_target)
            grad = gradient_ur(shape, q_f, omega_off, scale, constraint).second;
        else
            grad = gradient_pp(shape, rho0, lambda_f, omega_off, scale, constraint).second;

        auto cost_at = [&](PulseShape s) {
            if (ur_target) return cost_ur(propagate_ur(s, q_f, omega_off, scale, constraint));
            return cost_pp(propagate_pp(s, rho0, lambda_f, omega_off, scale, constraint));
        };

        const int arity = basis.arity();
        for (std::size_t j = 0; j < shape.size(); ++j)
            for (int k = 0; k < arity; ++k) {
                const double x0 = shape.digits[j].controls[static_cast<std::size_t>(k)];
                auto eval = [&](double x) {
                    PulseShape s = shape;
                    s.digits[j].controls[static_cast<std::size_t>(k)] = x;
                    return cost_at(std::move(s));
                };
                const double fd =
                    oracles::finite_difference(eval, x0, 1e-5 * std::max(1.0, std::abs(x0)));
                const double ga = grad.at(j, k);
                const double dev =
                    rel_dev(std::abs(ga - fd), std::max(std::abs(ga), std::abs(fd)),
                            floor_scale);
                tr.feed(dev, "digit " + std::to_string(j) + " control " + std::to_string(k));
            }
    }
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
    GradcheckReport report;
    const double fd_floor = options.fd_abs_floor / options.fd_rel_bound;

    struct BasisCase {
        ControlBasis basis;
        const char* constraint;  // nullptr, "amplitude", "power", "energy"
    };
    std::vector<BasisCase> cases;
    for (const char* name :
         {"cartesian_xy", "cartesian_xyz", "polar_amp_phase", "polar_amp_phase_z",
          "phase_only"})
        cases.push_back({ControlBasis::parse(name, name == std::string("phase_only") ? 0.9 : 0.0),
                         nullptr});
    for (const char* name : {"polar_reduced_amp_phase", "polar_reduced_amp_phase_z"})
        for (const char* ck : {"amplitude", "power", "energy"})
            cases.push_back({ControlBasis::parse(name), ck});

    for (const auto& bc : cases) {
        std::string label = bc.basis.name();
        if (bc.constraint != nullptr) label += std::string(" + ") + bc.constraint;
        if (!options.basis_filter.empty() &&
            label.find(options.basis_filter) == std::string::npos)
            continue;

        GradcheckRow row;
        row.label = label;
        Rng rng(options.seed ^ std::hash<std::string>{}(label));

        Tracker expm_tr, fd_tr, cost_tr;
        const bool cartesian = bc.basis.is_cartesian();

        if (bc.constraint == nullptr) {
            // Kernel-level checks are per control family and do not depend
            // on the constraint, so reduced rows skip straight to the
            // cost-level check.
            for (int i = 0; i < options.kernel_draws; ++i) {
                if (cartesian) {
                    const RotationParams p = random_params(rng, i % 10 == 0);
                    auto dr = d_rotation_cartesian(p);
                    if (options.analytic_fault)
                        for (int c = 0; c < 3; ++c)
                            options.analytic_fault(dr.d[static_cast<std::size_t>(c)], c);
                    const auto dq = d_quaternion(p, false);
                    for (int c = 0; c < 3; ++c) {
                        check_rot_pair(dr.d[static_cast<std::size_t>(c)],
                                       oracles::augmented_gradient_rot(p, c), 1.0, "theta",
                                       kAxisName[c], expm_tr);
                        check_quat_pair(dq.d[static_cast<std::size_t>(c)],
                                        oracles::augmented_gradient_su2_quat(p, c), 1.0,
                                        "theta", kAxisName[c], expm_tr);
                        check_rot_pair(dr.d[static_cast<std::size_t>(c)],
                                       fd_rotation_cartesian(p, c, 1e-6), fd_floor, "theta",
                                       kAxisName[c], fd_tr);
                        check_quat_pair(dq.d[static_cast<std::size_t>(c)],
                                        fd_quaternion_cartesian(p, c, 1e-6), fd_floor, "theta",
                                        kAxisName[c], fd_tr);
                    }
                } else {
                    const RotationParams p = random_polar_params(rng, i % 4);
                    const auto dr = d_rotation_polar(p);
                    const auto dq = d_quaternion(p, true);
                    for (int c = 0; c < 3; ++c) {
                        check_rot_pair(dr.d[static_cast<std::size_t>(c)],
                                       fd_rotation_polar(p, c, 1e-6), fd_floor, "",
                                       kPolarName[c], fd_tr);
                        check_quat_pair(dq.d[static_cast<std::size_t>(c)],
                                        fd_quaternion_polar(p, c, 1e-6), fd_floor, "",
                                        kPolarName[c], fd_tr);
                    }
                }
            }
            row.expm_checked = cartesian;
            if (!cartesian)
                row.note = "block-exponential oracle skipped: no generator exists for "
                           "polar controls";
        } else {
            row.note = "kernel checks covered by the polar rows";
        }

        ConstraintSpec spec;
        const ConstraintSpec* spec_ptr = nullptr;
        if (bc.constraint != nullptr) {
            if (bc.constraint == std::string("amplitude")) spec = ConstraintSpec::amplitude(1.0);
            if (bc.constraint == std::string("power")) spec = ConstraintSpec::power(0.7);
            if (bc.constraint == std::string("energy")) spec = ConstraintSpec::energy(6.0);
            spec_ptr = &spec;
        }
        check_cost_gradient(rng, bc.basis, spec_ptr, false, options.cost_draws, fd_floor,
                            cost_tr);
        check_cost_gradient(rng, bc.basis, spec_ptr, true, options.cost_draws, fd_floor,
                            cost_tr);

        row.max_vs_expm = expm_tr.worst;
        row.max_vs_fd = fd_tr.worst;
        row.max_cost_fd = cost_tr.worst;
        row.pass = (!row.expm_checked || expm_tr.worst < options.expm_bound) &&
                   fd_tr.worst < options.fd_rel_bound && cost_tr.worst < options.fd_rel_bound;
        if (!row.pass) {
            if (row.expm_checked && expm_tr.worst >= options.expm_bound)
                row.worst_entry = expm_tr.entry;
            else if (fd_tr.worst >= options.fd_rel_bound)
                row.worst_entry = fd_tr.entry;
            else
                row.worst_entry = cost_tr.entry;
            report.pass = false;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void print_gradcheck(std::ostream& os, const GradcheckReport& report) {
    os << "gradient verification (analytic vs block exponential vs finite differences)\n";
    for (const auto& row : report.rows) {
        os << (row.pass ? "  [ok]   " : "  [FAIL] ") << row.label << "\n";
        if (row.expm_checked)
            os << "          max |analytic - exponential| = " << row.max_vs_expm << "\n";
        os << "          max kernel dev vs FD           = " << row.max_vs_fd << "\n";
        os << "          max cost-gradient dev vs FD    = " << row.max_cost_fd << "\n";
        if (!row.note.empty()) os << "          note: " << row.note << "\n";
        if (!row.pass) os << "          worst entry: " << row.worst_entry << "\n";
    }
    os << (report.pass ? "all gradient checks passed\n" : "GRADIENT CHECKS FAILED\n");
}

}  // namespace pulsekit
