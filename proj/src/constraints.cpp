#include "pulsekit/constraints.hpp"

#include <cmath>

namespace pulsekit {
namespace {

// tanh(r)/r, accurate through r = 0.
double tanh_over(double r) {
    if (std::abs(r) < 1e-4) {
        const double t = r * r;
        return 1.0 - t / 3.0 + 2.0 * t * t / 15.0;
    }
    return std::tanh(r) / r;
}

// (sech^2(r) - tanh(r)/r) / r^2, accurate through r = 0.
double jacobian_kernel(double r) {
    if (std::abs(r) < 1e-4) {
        const double t = r * r;
        return -2.0 / 3.0 + 8.0 * t / 15.0 - 34.0 * t * t / 105.0;
    }
    const double th = std::tanh(r);
    return ((1.0 - th * th) - th / r) / (r * r);
}

// Shared power/energy machinery: both are theta_red = theta * tanh(r)/r
// with r^2 = activity / limit, where activity is mean(theta^2) (power)
// or sum(theta^2) (energy).  The Jacobian in either case is
//   J = s*I + (sech^2(r) - s)/sum(theta^2) * theta theta^T,  s = tanh(r)/r.
ClampState global_clamp(ConstraintKind kind, std::span<const double> theta_xy,
                        double activity_over_sumsq, double sum_sq, double limit) {
    ClampState st;
    st.kind = kind;
    st.theta.assign(theta_xy.begin(), theta_xy.end());
    st.reduced.resize(theta_xy.size());
    if (sum_sq == 0.0) {
        // All-zero input: the clamp is the identity with identity Jacobian.
        st.scale = 1.0;
        st.rank1_coeff = 0.0;
        std::fill(st.reduced.begin(), st.reduced.end(), 0.0);
        return st;
    }
    const double r = std::sqrt(activity_over_sumsq * sum_sq / limit);
    st.scale = tanh_over(r);
    // (sech^2 r - s)/sum_sq = kernel(r) * r^2 / sum_sq = kernel(r) * activity_ratio / limit
    st.rank1_coeff = jacobian_kernel(r) * activity_over_sumsq / limit;
    for (std::size_t j = 0; j < theta_xy.size(); ++j)
        st.reduced[j] = theta_xy[j] * st.scale;
    return st;
}

}  // namespace

void ConstraintSpec::validate(std::size_t n_digits) const {
    switch (kind) {
        case ConstraintKind::Amplitude:
            if (theta_max.empty())
                throw std::invalid_argument("amplitude constraint needs at least one cap");
            if (theta_max.size() != 1 && theta_max.size() != n_digits)
                throw std::invalid_argument("amplitude cap list must have 1 or N entries");
            for (double c : theta_max)
                if (!(c > 0)) throw std::invalid_argument("amplitude cap must be > 0");
            break;
        case ConstraintKind::Power:
            if (!(p_max_avg > 0)) throw std::invalid_argument("power limit must be > 0");
            break;
        case ConstraintKind::Energy:
            if (!(e_theta_max > 0)) throw std::invalid_argument("energy limit must be > 0");
            break;
    }
}

AmpClampResult amp_clamp(double theta_xy, double theta_max) {
    const double t = std::tanh(theta_xy / theta_max);
    return {theta_max * t, 1.0 - t * t};
}

ClampState power_clamp(std::span<const double> theta_xy, double p_max_avg) {
    double sum_sq = 0;
    for (double v : theta_xy) sum_sq += v * v;
    const double n = static_cast<double>(theta_xy.size());
    return global_clamp(ConstraintKind::Power, theta_xy, 1.0 / n, sum_sq, p_max_avg);
}

ClampState energy_clamp(std::span<const double> theta_xy, double e_theta_max) {
    double sum_sq = 0;
    for (double v : theta_xy) sum_sq += v * v;
    return global_clamp(ConstraintKind::Energy, theta_xy, 1.0, sum_sq, e_theta_max);
}

ClampState clamp_shape(const ConstraintSpec& spec, std::span<const double> theta_xy) {
    spec.validate(theta_xy.size());
    switch (spec.kind) {
        case ConstraintKind::Power:
            return power_clamp(theta_xy, spec.p_max_avg);
        case ConstraintKind::Energy:
            return energy_clamp(theta_xy, spec.e_theta_max);
        case ConstraintKind::Amplitude:
        default: {
            ClampState st;
            st.kind = ConstraintKind::Amplitude;
            st.reduced.resize(theta_xy.size());
            st.slopes.resize(theta_xy.size());
            for (std::size_t j = 0; j < theta_xy.size(); ++j) {
                const auto r = amp_clamp(theta_xy[j], spec.cap_for_digit(j));
                st.reduced[j] = r.theta_red;
                st.slopes[j] = r.slope;
            }
            return st;
        }
    }
}

std::vector<double> ClampState::apply_jacobian(std::span<const double> grad_reduced) const {
    std::vector<double> out(grad_reduced.size());
    if (kind == ConstraintKind::Amplitude) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = slopes[j] * grad_reduced[j];
        return out;
    }
    // J is symmetric, so J^T g = s*g + coeff * theta * (theta . g).
    double proj = 0;
    for (std::size_t j = 0; j < out.size(); ++j) proj += theta[j] * grad_reduced[j];
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = scale * grad_reduced[j] + rank1_coeff * theta[j] * proj;
    return out;
}

}  // namespace pulsekit
