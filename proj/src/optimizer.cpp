#include "pulsekit/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "pulsekit/rng.hpp"

namespace pulsekit {
namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct LineSearchOutcome {
    bool ok = false;
    double alpha = 0, f = 0;
    std::vector<double> x, g;
};

// Strong Wolfe line search: bracketing stage followed by zoom with
// bisection, per the standard quasi-Newton construction.
LineSearchOutcome wolfe_search(const ObjectiveFn& objective, const std::vector<double>& x0,
                               double f0, const std::vector<double>& g0,
                               const std::vector<double>& dir, double c1, double c2) {
    LineSearchOutcome out;
    const double dphi0 = vdot(g0, dir);
    if (!(dphi0 < 0)) return out;

    const std::size_t n = x0.size();
    std::vector<double> xa(n), ga(n);
    auto eval = [&](double a, double& fa, double& dphia) {
        for (std::size_t i = 0; i < n; ++i) xa[i] = x0[i] + a * dir[i];
        fa = objective(xa, ga);
        dphia = vdot(ga, dir);
    };

    auto accept = [&](double a, double fa) {
        out.ok = true;
        out.alpha = a;
        out.f = fa;
        out.x = xa;
        out.g = ga;
    };

    double lo = 0, f_lo = f0, hi = 0;
    bool bracketed = false;

    double a = 1.0, a_prev = 0.0, f_prev = f0;
    for (int i = 0; i < 30 && !bracketed; ++i) {
        double fa, dphia;
        eval(a, fa, dphia);
        if (!std::isfinite(fa)) {  // overshot; shrink back
            lo = a_prev;
            f_lo = f_prev;
            hi = a;
            bracketed = true;
            break;
        }
        if (fa > f0 + c1 * a * dphi0 || (i > 0 && fa >= f_prev)) {
            lo = a_prev;
            f_lo = f_prev;
            hi = a;
            bracketed = true;
            break;
        }
        if (std::abs(dphia) <= -c2 * dphi0) {
            accept(a, fa);
            return out;
        }
        if (dphia >= 0) {
            lo = a;
            f_lo = fa;
            hi = a_prev;
            bracketed = true;
            break;
        }
        a_prev = a;
        f_prev = fa;
        a *= 2.0;
        if (a > 1e12) return out;
    }
    if (!bracketed) return out;

    for (int i = 0; i < 60; ++i) {
        if (std::abs(hi - lo) < 1e-14 * std::max(1.0, std::abs(lo))) break;
        const double mid = 0.5 * (lo + hi);
        double fa, dphia;
        eval(mid, fa, dphia);
        if (!std::isfinite(fa) || fa > f0 + c1 * mid * dphi0 || fa >= f_lo) {
            hi = mid;
        } else {
            if (std::abs(dphia) <= -c2 * dphi0) {
                accept(mid, fa);
                return out;
            }
            if (dphia * (hi - lo) >= 0) hi = lo;
            lo = mid;
            f_lo = fa;
        }
    }
    // Interval collapsed without satisfying the curvature condition;
    // fall back to the best sufficient-decrease point if there is one.
    if (lo > 0 && f_lo < f0 + c1 * lo * dphi0) {
        double fa, dphia;
        eval(lo, fa, dphia);
        accept(lo, fa);
    }
    return out;
}

}  // namespace

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIterations: return "max_iterations";
        case Termination::LineSearchFailure: return "line_search_failure";
    }
    return "?";
}

LbfgsReport lbfgs_minimize(const ObjectiveFn& objective, std::vector<double> x,
                           const OptimizerOptions& options) {
    options.validate();
    const std::size_t n = x.size();

    LbfgsReport rep;
    std::vector<double> g(n);
    double f = objective(x, g);
    rep.f_history.push_back(f);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> mem;

    std::vector<double> d(n), q(n);
    std::vector<double> alpha_buf;

    auto finish = [&](Termination t) {
        rep.x = std::move(x);
        rep.f = f;
        rep.g = std::move(g);
        rep.termination = t;
        return rep;
    };

    if (inf_norm(g) < options.grad_tolerance) return finish(Termination::Converged);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        // Two-loop recursion for d = -H g.
        q = g;
        alpha_buf.assign(mem.size(), 0.0);
        for (std::size_t i = mem.size(); i-- > 0;) {
            const auto& p = mem[i];
            const double a = p.rho * vdot(p.s, q);
            alpha_buf[i] = a;
            for (std::size_t k = 0; k < n; ++k) q[k] -= a * p.y[k];
        }
        if (!mem.empty()) {
            const auto& last = mem.back();
            const double gamma = vdot(last.s, last.y) / vdot(last.y, last.y);
            for (auto& v : q) v *= gamma;
        } else {
            // First step: scale so the linear model predicts a unit
            // decrease; this keeps the iterate sequence invariant under a
            // uniform rescaling of the control variables.
            const double gg = vdot(q, q);
            if (gg > 0)
                for (auto& v : q) v /= gg;
        }
        for (std::size_t i = 0; i < mem.size(); ++i) {
            const auto& p = mem[i];
            const double b = p.rho * vdot(p.y, q);
            for (std::size_t k = 0; k < n; ++k) q[k] += (alpha_buf[i] - b) * p.s[k];
        }
        for (std::size_t k = 0; k < n; ++k) d[k] = -q[k];

        if (vdot(g, d) >= 0) {  // not a descent direction; restart from steepest
            mem.clear();
            const double gg = vdot(g, g);
            for (std::size_t k = 0; k < n; ++k) d[k] = -g[k] / (gg > 0 ? gg : 1.0);
        }

        auto ls = wolfe_search(objective, x, f, g, d, options.wolfe_c1, options.wolfe_c2);
        if (!ls.ok) return finish(Termination::LineSearchFailure);

        Pair p;
        p.s.resize(n);
        p.y.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            p.s[k] = ls.x[k] - x[k];
            p.y[k] = ls.g[k] - g[k];
        }
        const double sy = vdot(p.s, p.y);
        if (sy > 1e-10 * std::sqrt(vdot(p.s, p.s)) * std::sqrt(vdot(p.y, p.y))) {
            p.rho = 1.0 / sy;
            mem.push_back(std::move(p));
            if (static_cast<int>(mem.size()) > options.lbfgs_memory) mem.pop_front();
        }

        x = std::move(ls.x);
        f = ls.f;
        g = std::move(ls.g);
        rep.iterations += 1;
        rep.f_history.push_back(f);
        if (inf_norm(g) < options.grad_tolerance) return finish(Termination::Converged);
    }
    return finish(Termination::MaxIterations);
}

PulseShape init_shape(const OptimizationProblem& problem, InitStrategy strategy,
                      std::uint64_t seed) {
    const PulseShape& tmpl = problem.shape_template;
    tmpl.validate();
    if (strategy == InitStrategy::FromFile)
        throw std::invalid_argument("FromFile initialization is resolved by the caller");
    double amp = problem.init_amplitude;
    if (amp <= 0 && problem.constraint.has_value() &&
        problem.constraint->kind == ConstraintKind::Amplitude)
        amp = problem.constraint->theta_max[0];
    if (amp <= 0 && tmpl.basis.kind == BasisKind::PhaseOnly) amp = tmpl.basis.theta_xy_const;
    if (amp <= 0) throw std::invalid_argument("initialization amplitude is not set");

    Rng rng(seed);
    PulseShape shape = tmpl;
    for (auto& digit : shape.digits) {
        switch (strategy) {
            case InitStrategy::RandomPhase: {
                const double phase = rng.uniform(0.0, kTwoPi);
                switch (shape.basis.kind) {
                    case BasisKind::CartesianXY:
                        digit.controls = {0.5 * amp * std::cos(phase),
                                          0.5 * amp * std::sin(phase)};
                        break;
                    case BasisKind::CartesianXYZ:
                        digit.controls = {0.5 * amp * std::cos(phase),
                                          0.5 * amp * std::sin(phase), 0.0};
                        break;
                    case BasisKind::PolarAmpPhase:
                    case BasisKind::PolarReducedAmpPhase:
                        digit.controls = {0.5 * amp, phase};
                        break;
                    case BasisKind::PolarAmpPhaseZ:
                    case BasisKind::PolarReducedAmpPhaseZ:
                        digit.controls = {0.5 * amp, phase, 0.0};
                        break;
                    case BasisKind::PhaseOnly:
                        digit.controls = {phase};
                        break;
                }
                break;
            }
            case InitStrategy::RandomSmall: {
                for (auto& c : digit.controls) c = 0.1 * amp * rng.normal();
                break;
            }
            case InitStrategy::FromFile:
                break;
        }
    }
    return shape;
}

namespace {

std::vector<double> flatten(const PulseShape& shape) {
    std::vector<double> x;
    x.reserve(shape.size() * static_cast<std::size_t>(shape.basis.arity()));
    for (const auto& d : shape.digits)
        for (double c : d.controls) x.push_back(c);
    return x;
}

void unflatten(const std::vector<double>& x, PulseShape& shape) {
    std::size_t k = 0;
    for (auto& d : shape.digits)
        for (auto& c : d.controls) c = x[k++];
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& problem, const PulseShape& initial,
                            int threads) {
    problem.validate();
    initial.validate();
    if (initial.basis.kind != problem.shape_template.basis.kind ||
        initial.size() != problem.shape_template.size())
        throw std::invalid_argument("initial shape does not match the problem template");

    const bool ur = problem.target.kind == TargetKind::UniversalRotation;
    PulseShape work = initial;

    ObjectiveFn objective = [&](const std::vector<double>& x, std::vector<double>& grad) {
        unflatten(x, work);
        const GridEvaluation ev = grid_average(problem, work, threads);
        grad.resize(ev.grad.values.size());
        if (ur) {
            const double sign = ev.phi_bar < 0 ? -1.0 : 1.0;
            for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = -sign * ev.grad.values[k];
            return 1.0 - std::abs(ev.phi_bar);
        }
        for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = -ev.grad.values[k];
        return 1.0 - ev.phi_bar;
    };

    const auto t0 = std::chrono::steady_clock::now();
    LbfgsReport rep = lbfgs_minimize(objective, flatten(initial), problem.options);
    const auto t1 = std::chrono::steady_clock::now();

    OptimizationResult res;
    res.shape = initial;
    unflatten(rep.x, res.shape);
    res.trajectory.reserve(rep.f_history.size());
    for (double fv : rep.f_history) res.trajectory.push_back(1.0 - fv);
    res.quality = 1.0 - rep.f;
    res.signed_phi = grid_average(problem, res.shape, threads).phi_bar;
    res.iterations = rep.iterations;
    res.termination = rep.termination;
    res.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    res.seed = problem.options.seed;
    return res;
}

MultistartResult multistart(const OptimizationProblem& problem,
                            const std::vector<std::uint64_t>& seeds, int threads) {
    if (seeds.empty()) throw std::invalid_argument("multistart needs at least one seed");
    MultistartResult out;
    bool first = true;
    for (const auto seed : seeds) {
        OptimizationProblem p = problem;
        p.options.seed = seed;
        const PulseShape start = init_shape(p, p.options.init_strategy, seed);
        OptimizationResult r = optimize(p, start, threads);
        r.seed = seed;
        if (first || r.quality > out.best.quality) {
            out.best = r;
            first = false;
        }
        out.all.push_back(std::move(r));
    }
    return out;
}

}  // namespace pulsekit
