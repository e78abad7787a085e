#include "pulsekit/bench.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "pulsekit/core.hpp"
#include "pulsekit/gradients.hpp"
#include "pulsekit/oracles.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/rotkernel.hpp"

namespace pulsekit {
namespace {

volatile double g_sink = 0.0;  // defeats dead-code elimination

double checksum(const Rotation3& m) {
    double s = 0;
    for (double v : m.m) s += v;
    return s;
}

double checksum(const Quaternion& q) { return q.a + q.b + q.c + q.d; }

RotationParams rebuild_cartesian(const Vec3& u) {
    return params_from_rotation_vector(u[0], u[1], u[2]);
}

RotationParams rebuild_polar(double alpha, double amp, double tz) {
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

template <typename Fn>
double time_batch(int calls, int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double acc = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < calls; ++i) acc += fn(i);
        const auto t1 = std::chrono::steady_clock::now();
        g_sink = g_sink + acc;
        best = std::min(best, std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    return best;
}

}  // namespace

BenchReport run_bench(const BenchOptions& options) {
    BenchReport rep;
    rep.calls = options.calls;

    Rng rng(options.seed);
    const int pool_n = 512;
    std::vector<RotationParams> pool(pool_n);
    for (auto& p : pool)
        p = params_from_rotation_vector(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5),
                                        rng.uniform(-2.5, 2.5));

    const char* cart_names[3] = {"theta_x", "theta_y", "theta_z"};
    const char* polar_names[3] = {"alpha", "theta_xy", "theta_z"};
    const double fd_h = 1e-6;
    double t_analytic_min_pp = 1e300, t_analytic_min_ur = 1e300;
    double worst_speedup = 1e300, worst_fd_ratio = 0.0;

    auto push = [&](const char* group, const char* method, const char* control, double us) {
        rep.rows.push_back({group, method, control, us});
    };

    for (int c = 0; c < 3; ++c) {
        const auto rc = static_cast<RotControl>(c);
        const double t_an = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(d_rotation_cartesian_single(pool[i % pool_n], rc));
        });
        push("PP (cartesian)", "analytical", cart_names[c], t_an);
        t_analytic_min_pp = std::min(t_analytic_min_pp, t_an);

        const double t_ex = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(oracles::augmented_gradient_rot(pool[i % pool_n], c));
        });
        push("PP (cartesian)", "exponential", cart_names[c], t_ex);

        const double t_fd = time_batch(options.calls, options.reps, [&](int i) {
            const auto& p = pool[i % pool_n];
            Vec3 u{p.theta_x, p.theta_y, p.theta_z};
            Vec3 up = u, um = u;
            up[static_cast<std::size_t>(c)] += fd_h;
            um[static_cast<std::size_t>(c)] -= fd_h;
            const Rotation3 rp = rotation_from_params(rebuild_cartesian(up));
            const Rotation3 rm = rotation_from_params(rebuild_cartesian(um));
            return checksum((rp - rm) * (0.5 / fd_h));
        });
        push("PP (cartesian)", "finite differences", cart_names[c], t_fd);

        worst_speedup = std::min(worst_speedup, t_ex / t_an);
        worst_fd_ratio = std::max({worst_fd_ratio, t_an / t_fd, t_fd / t_an});
    }

    for (int c = 0; c < 3; ++c) {
        const auto rc = static_cast<RotControl>(c);
        const double t_an = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(d_quaternion_cartesian_single(pool[i % pool_n], rc));
        });
        push("UR (cartesian)", "analytical", cart_names[c], t_an);
        t_analytic_min_ur = std::min(t_analytic_min_ur, t_an);

        const double t_ex = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(oracles::augmented_gradient_su2_quat(pool[i % pool_n], c));
        });
        push("UR (cartesian)", "exponential", cart_names[c], t_ex);

        const double t_fd = time_batch(options.calls, options.reps, [&](int i) {
            const auto& p = pool[i % pool_n];
            Vec3 u{p.theta_x, p.theta_y, p.theta_z};
            Vec3 up = u, um = u;
            up[static_cast<std::size_t>(c)] += fd_h;
            um[static_cast<std::size_t>(c)] -= fd_h;
            const Quaternion qp = quaternion_from_params(rebuild_cartesian(up));
            const Quaternion qm = quaternion_from_params(rebuild_cartesian(um));
            return checksum((qp - qm) * (0.5 / fd_h));
        });
        push("UR (cartesian)", "finite differences", cart_names[c], t_fd);

        worst_speedup = std::min(worst_speedup, t_ex / t_an);
        worst_fd_ratio = std::max({worst_fd_ratio, t_an / t_fd, t_fd / t_an});
    }

    // Polar controls: no generator exists for alpha/theta_xy, so only the
    // analytic and FD methods appear.
    for (int c = 0; c < 3; ++c) {
        const auto pc = static_cast<PolarControl>(c);
        const double t_an = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(d_rotation_polar_single(pool[i % pool_n], pc));
        });
        push("PP (polar)", "analytical", polar_names[c], t_an);

        const double t_fd = time_batch(options.calls, options.reps, [&](int i) {
            const auto& p = pool[i % pool_n];
            double v[3] = {p.alpha, p.theta_xy, p.theta_z};
            double vp = v[c] + fd_h, vm = v[c] - fd_h;
            double a[3] = {v[0], v[1], v[2]}, b[3] = {v[0], v[1], v[2]};
            a[c] = vp;
            b[c] = vm;
            const Rotation3 rp = rotation_from_params(rebuild_polar(a[0], a[1], a[2]));
            const Rotation3 rm = rotation_from_params(rebuild_polar(b[0], b[1], b[2]));
            return checksum((rp - rm) * (0.5 / fd_h));
        });
        push("PP (polar)", "finite differences", polar_names[c], t_fd);
        worst_fd_ratio = std::max({worst_fd_ratio, t_an / t_fd, t_fd / t_an});
    }

    for (int c = 0; c < 3; ++c) {
        const auto pc = static_cast<PolarControl>(c);
        const double t_an = time_batch(options.calls, options.reps, [&](int i) {
            return checksum(d_quaternion_polar_single(pool[i % pool_n], pc));
        });
        push("UR (polar)", "analytical", polar_names[c], t_an);

        const double t_fd = time_batch(options.calls, options.reps, [&](int i) {
            const auto& p = pool[i % pool_n];
            double v[3] = {p.alpha, p.theta_xy, p.theta_z};
            double a[3] = {v[0], v[1], v[2]}, b[3] = {v[0], v[1], v[2]};
            a[c] = v[c] + fd_h;
            b[c] = v[c] - fd_h;
            const Quaternion qp = quaternion_from_params(rebuild_polar(a[0], a[1], a[2]));
            const Quaternion qm = quaternion_from_params(rebuild_polar(b[0], b[1], b[2]));
            return checksum((qp - qm) * (0.5 / fd_h));
        });
        push("UR (polar)", "finite differences", polar_names[c], t_fd);
        worst_fd_ratio = std::max({worst_fd_ratio, t_an / t_fd, t_fd / t_an});
    }

    rep.min_speedup_vs_expm = worst_speedup;
    rep.max_ratio_vs_fd = worst_fd_ratio;
    return rep;
}

void print_bench(std::ostream& os, const BenchReport& report) {
    os << "derivative kernel runtimes, microseconds per " << report.calls << " calls\n";
    std::string group;
    std::string method;
    for (const auto& row : report.rows) {
        if (row.group != group) {
            group = row.group;
            method.clear();
            os << "\n" << group << "\n";
        }
        if (row.method != method) {
            method = row.method;
            os << "  " << method << "\n";
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "    d/d%-9s %12.1f us\n", row.control.c_str(),
                      row.us_per_batch);
        os << buf;
    }
    os << "\nmin speedup analytic vs exponential: " << report.min_speedup_vs_expm << "x\n";
    os << "max runtime ratio analytic vs finite differences (either direction): "
       << report.max_ratio_vs_fd << "x\n";
}

}  // namespace pulsekit
