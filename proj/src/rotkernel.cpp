#include "pulsekit/rotkernel.hpp"

#include <cmath>

namespace pulsekit {

AxisAngleScalars axis_angle_scalars(double theta) {
    AxisAngleScalars s{};
    const double t = theta;
    const double t2 = t * t;
    if (t < 1e-4) {
        // Series in t^2; truncation error < 1e-32 at the branch point.
        s.f1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        s.f2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        s.g1 = -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
        s.g2 = -1.0 / 12.0 + t2 / 180.0 - t2 * t2 / 6720.0;
        s.h = 0.5 - t2 / 48.0 + t2 * t2 / 3840.0;
        s.kq = -1.0 / 24.0 + t2 / 960.0 - t2 * t2 / 107520.0;
        s.cos_t = std::cos(t);
        s.cos_h = std::cos(0.5 * t);
        return s;
    }
    const double st = std::sin(t);
    const double ct = std::cos(t);
    const double sh = std::sin(0.5 * t);
    const double ch = std::cos(0.5 * t);
    const double t3 = t2 * t;
    s.cos_t = ct;
    s.f1 = st / t;
    s.f2 = 2.0 * sh * sh / t2;  // avoids the 1-cos cancellation
    s.g1 = (t * ct - st) / t3;
    s.g2 = (t * st - 2.0 * (1.0 - ct)) / (t3 * t);
    s.cos_h = ch;
    s.h = sh / t;
    s.kq = (0.5 * t * ch - sh) / t3;
    return s;
}

Rotation3 rotation_from_params(const RotationParams& p) {
    const auto s = axis_angle_scalars(p.theta);
    const double ux = p.theta_x, uy = p.theta_y, uz = p.theta_z;
    Rotation3 r;
    r.m = {s.cos_t + s.f2 * ux * ux, -s.f1 * uz + s.f2 * ux * uy, s.f1 * uy + s.f2 * ux * uz,
           s.f1 * uz + s.f2 * ux * uy, s.cos_t + s.f2 * uy * uy, -s.f1 * ux + s.f2 * uy * uz,
           -s.f1 * uy + s.f2 * ux * uz, s.f1 * ux + s.f2 * uy * uz, s.cos_t + s.f2 * uz * uz};
    return r;
}

Quaternion quaternion_from_params(const RotationParams& p) {
    const auto s = axis_angle_scalars(p.theta);
    return {s.h * p.theta_x, s.h * p.theta_y, s.h * p.theta_z, s.cos_h};
}

PropagationCachePP propagate_pp(const std::vector<RotationParams>& params, const Vec3& rho0,
                                const Vec3& lambda_f) {
    const std::size_t n = params.size();
    PropagationCachePP cache;
    cache.params = params;
    cache.scalars.resize(n);
    cache.rho.resize(n + 1);
    cache.lambda.resize(n + 1);
    std::vector<Rotation3> rots(n);
    for (std::size_t j = 0; j < n; ++j) {
        cache.scalars[j] = axis_angle_scalars(params[j].theta);
        rots[j] = rotation_from_params(params[j]);
    }
    cache.rho[0] = rho0;
    for (std::size_t j = 0; j < n; ++j) cache.rho[j + 1] = rots[j].apply(cache.rho[j]);
    cache.lambda[n] = lambda_f;
    for (std::size_t j = n; j-- > 0;)
        cache.lambda[j] = rots[j].apply_transposed(cache.lambda[j + 1]);
    return cache;
}

PropagationCachePP propagate_pp(const PulseShape& shape, const Vec3& rho0,
                                const Vec3& lambda_f, double omega_off, double b1_scale,
                                const ConstraintSpec* constraint) {
    return propagate_pp(shape_to_rotation_params(shape, omega_off, b1_scale, constraint),
                        rho0, lambda_f);
}

PropagationCacheUR propagate_ur(const std::vector<RotationParams>& params,
                                const Quaternion& q_f) {
    const std::size_t n = params.size();
    PropagationCacheUR cache;
    cache.params = params;
    cache.scalars.resize(n);
    cache.prefix.resize(n + 1);
    cache.suffix.resize(n + 1);
    std::vector<Quaternion> quats(n);
    for (std::size_t j = 0; j < n; ++j) {
        cache.scalars[j] = axis_angle_scalars(params[j].theta);
        quats[j] = quaternion_from_params(params[j]);
    }
    cache.prefix[0] = Quaternion::identity();
    for (std::size_t j = 0; j < n; ++j)
        cache.prefix[j + 1] = quaternion_multiply(quats[j], cache.prefix[j]);
    cache.suffix[n] = q_f;
    for (std::size_t j = n; j-- > 0;)
        cache.suffix[j] = quaternion_multiply(quats[j].conjugate(), cache.suffix[j + 1]);
    return cache;
}

PropagationCacheUR propagate_ur(const PulseShape& shape, const Quaternion& q_f,
                                double omega_off, double b1_scale,
                                const ConstraintSpec* constraint) {
    return propagate_ur(shape_to_rotation_params(shape, omega_off, b1_scale, constraint), q_f);
}

double cost_pp(const PropagationCachePP& cache) {
    return dot(cache.lambda.back(), cache.rho.back());
}

double cost_ur(const PropagationCacheUR& cache) {
    return dot(cache.suffix.back(), cache.prefix.back());
}

}  // namespace pulsekit
