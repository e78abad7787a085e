#include <doctest.h>

#include <cmath>

#include "pulsekit/oracles.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/rotkernel.hpp"
#include "support/reference.hpp"

using namespace pulsekit;
using testsupport::random_params;

namespace {

double ortho_defect(const Rotation3& r) {
    double worst = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += r(k, i) * r(k, j);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double det3(const Rotation3& r) {
    return r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
           r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
           r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
}

}  // namespace

TEST_CASE("scalar kernel functions are continuous across the series branch") {
    for (double t : {1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)}) {
        const auto s = axis_angle_scalars(t);
        CHECK(s.f1 == doctest::Approx(std::sin(t) / t).epsilon(1e-14));
        CHECK(s.f2 == doctest::Approx((1 - std::cos(t)) / (t * t)).epsilon(1e-10));
        CHECK(s.g1 == doctest::Approx(-1.0 / 3.0).epsilon(1e-8));
        CHECK(s.g2 == doctest::Approx(-1.0 / 12.0).epsilon(1e-8));
        CHECK(s.h == doctest::Approx(std::sin(t / 2) / t).epsilon(1e-14));
        CHECK(s.kq == doctest::Approx(-1.0 / 24.0).epsilon(1e-8));
    }
}

TEST_CASE("rotation matrix: identity, 180 degrees about x, oracle agreement") {
    const auto id = rotation_from_params(params_from_rotation_vector(0, 0, 0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(id(i, j) == (i == j ? 1.0 : 0.0));

    const double pi = kTwoPi / 2;
    const auto flip = rotation_from_params(params_from_rotation_vector(pi, 0, 0));
    CHECK(flip(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(flip(1, 1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(flip(2, 2) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(flip(0, 1)) < 1e-15);

    // theta = 1 about (1,1,1)/sqrt(3) against the matrix exponential.
    const double c = 1.0 / std::sqrt(3.0);
    const auto p = params_from_rotation_vector(c, c, c);
    const auto r = rotation_from_params(p);
    oracles::RealMatrix gen(3);
    gen += oracles::so3_generator(0) * p.theta_x;
    gen += oracles::so3_generator(1) * p.theta_y;
    gen += oracles::so3_generator(2) * p.theta_z;
    const auto e = oracles::expm(gen);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(r(i, j) - e(i, j)) < 1e-12);
}

TEST_CASE("rotation matrices stay orthogonal with unit determinant") {
    Rng rng(21);
    for (int i = 0; i < 100000; ++i) {
        const auto p = i % 7 == 0
                           ? params_from_rotation_vector(rng.uniform(-1, 1) * 1e-7,
                                                         rng.uniform(-1, 1) * 1e-7,
                                                         rng.uniform(-1, 1) * 1e-7)
                           : random_params(rng);
        const auto r = rotation_from_params(p);
        CHECK(ortho_defect(r) < 1e-12);
        CHECK(std::abs(det3(r) - 1.0) < 1e-12);
    }
}

TEST_CASE("quaternion construction: identity, half turns, matrix consistency") {
    const auto id = quaternion_from_params(params_from_rotation_vector(0, 0, 0));
    CHECK(id.a == 0.0);
    CHECK(id.d == 1.0);

    const double pi = kTwoPi / 2;
    const auto qz = quaternion_from_params(params_from_rotation_vector(0, 0, pi));
    CHECK(std::abs(qz.c - 1.0) < 1e-15);
    CHECK(std::abs(qz.d) < 1e-15);

    const auto p = params_from_rotation_vector(pi / 2, 0, 0);
    const auto qx = quaternion_from_params(p);
    CHECK(qx.a == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(qx.d == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    const auto via_q = rotation_of(qx);
    const auto direct = rotation_from_params(p);
    CHECK(testsupport::max_abs_diff(via_q, direct) < 1e-12);
}

TEST_CASE("quaternion product: identity element and double x flip") {
    Rng rng(31);
    const Quaternion q1{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                        rng.uniform(-1, 1)};
    const auto same = quaternion_multiply(Quaternion::identity(), q1);
    CHECK(testsupport::max_abs_diff(same, q1) == 0.0);

    const Quaternion x180{1, 0, 0, 0};
    const auto twice = quaternion_multiply(x180, x180);
    CHECK(twice.a == 0.0);
    CHECK(twice.d == -1.0);  // a full turn is minus the identity
}

TEST_CASE("quaternion-rotation homomorphism on random pairs") {
    Rng rng(32);
    for (int i = 0; i < 10000; ++i) {
        const auto q2 = quaternion_from_params(random_params(rng));
        const auto q1 = quaternion_from_params(random_params(rng));
        const auto lhs = rotation_of(quaternion_multiply(q2, q1));
        const auto rhs = rotation_of(q2) * rotation_of(q1);
        CHECK(testsupport::max_abs_diff(lhs, rhs) < 1e-12);
        CHECK(std::abs(quaternion_multiply(q2, q1).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("norm drift over products of length 100") {
    Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        Quaternion acc = Quaternion::identity();
        Rotation3 racc = Rotation3::identity();
        for (int i = 0; i < 100; ++i) {
            const auto q = quaternion_from_params(random_params(rng));
            acc = quaternion_multiply(q, acc);
            racc = rotation_of(q) * racc;
        }
        CHECK(std::abs(acc.norm() - 1.0) < 1e-10);
        CHECK(testsupport::max_abs_diff(rotation_of(acc), racc) < 1e-10);
    }
}

TEST_CASE("point-to-point propagation: 90 x pulse and free precession senses") {
    PulseShape s;
    s.basis = {BasisKind::CartesianXY};
    s.digits = {{{kTwoPi / 4, 0.0}, 1.0}};
    auto cache = propagate_pp(s, {0, 0, 1}, {0, -1, 0}, 0.0, 1.0);
    CHECK(std::abs(cache.rho[1][0]) < 1e-15);
    CHECK(cache.rho[1][1] == doctest::Approx(-1.0).epsilon(1e-15));  // z goes to -y
    CHECK(std::abs(cache.rho[1][2]) < 1e-15);
    CHECK(cost_pp(cache) == doctest::Approx(1.0).epsilon(1e-14));

    // Zero amplitude with an offset: x precesses toward y.
    PulseShape free_ev;
    free_ev.basis = {BasisKind::CartesianXY};
    const double phi = 0.3;
    for (int i = 0; i < 5; ++i) free_ev.digits.push_back({{0.0, 0.0}, 1.0});
    auto c2 = propagate_pp(free_ev, {1, 0, 0}, {1, 0, 0}, phi, 1.0);
    CHECK(c2.rho[5][0] == doctest::Approx(std::cos(5 * phi)).epsilon(1e-13));
    CHECK(c2.rho[5][1] == doctest::Approx(std::sin(5 * phi)).epsilon(1e-13));
}

TEST_CASE("propagation matches an independent matrix product") {
    Rng rng(41);
    const auto shape = testsupport::random_shape(rng, {BasisKind::CartesianXY}, 10);
    const double off = 0.4, scale = 1.05;
    const auto cache = propagate_pp(shape, {0, 0, 1}, {0, -1, 0}, off, scale);

    Rotation3 total = Rotation3::identity();
    for (const auto& p : shape_to_rotation_params(shape, off, scale))
        total = rotation_from_params(p) * total;
    const Vec3 direct = total.apply({0, 0, 1});
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(direct[static_cast<std::size_t>(k)] -
                       cache.rho[10][static_cast<std::size_t>(k)]) < 1e-13);
}

TEST_CASE("forward and backward caches stay unit length and telescope") {
    Rng rng(42);
    const auto shape = testsupport::random_shape(rng, {BasisKind::CartesianXYZ}, 12);
    const auto cache = propagate_pp(shape, {0, 0, 1}, {1, 0, 0}, 0.7, 0.93);
    const double overlap = cost_pp(cache);
    for (std::size_t j = 0; j <= 12; ++j) {
        CHECK(std::abs(norm(cache.rho[j]) - 1.0) < 1e-12);
        CHECK(std::abs(norm(cache.lambda[j]) - 1.0) < 1e-12);
        CHECK(dot(cache.lambda[j], cache.rho[j]) == doctest::Approx(overlap).epsilon(1e-12));
    }
}

TEST_CASE("universal rotation caches: identity, planted target, split consistency") {
    PulseShape zero;
    zero.basis = {BasisKind::CartesianXY};
    zero.digits = {{{0.0, 0.0}, 1.0}};
    CHECK(cost_ur(propagate_ur(zero, Quaternion::identity(), 0.0, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-15));

    PulseShape x90;
    x90.basis = {BasisKind::CartesianXY};
    x90.digits = {{{kTwoPi / 4, 0.0}, 1.0}};
    const Quaternion target{std::sqrt(0.5), 0, 0, std::sqrt(0.5)};
    CHECK(cost_ur(propagate_ur(x90, target, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));

    Rng rng(51);
    const auto shape = testsupport::random_shape(rng, {BasisKind::PolarAmpPhase}, 9);
    const Quaternion q_f{0.5, 0.5, -0.5, 0.5};
    const auto cache = propagate_ur(shape, q_f, 0.25, 1.1);
    const double phi = cost_ur(cache);
    for (std::size_t j = 0; j <= 9; ++j)
        CHECK(dot(cache.suffix[j], cache.prefix[j]) == doctest::Approx(phi).epsilon(1e-12));
}

TEST_CASE("opposite-sign propagator quaternions carry quality one") {
    Rng rng(52);
    const auto shape = testsupport::random_shape(rng, {BasisKind::CartesianXY}, 6);
    auto cache = propagate_ur(shape, Quaternion::identity(), 0.0, 1.0);
    const Quaternion total = cache.prefix.back();
    const Quaternion minus{-total.a, -total.b, -total.c, -total.d};
    const auto flipped = propagate_ur(shape, minus, 0.0, 1.0);
    CHECK(cost_ur(flipped) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(cost_ur(flipped)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perpendicular state overlap is zero") {
    PulseShape zero;
    zero.basis = {BasisKind::CartesianXY};
    zero.digits = {{{0.0, 0.0}, 1.0}};
    const auto cache = propagate_pp(zero, {0, 0, 1}, {1, 0, 0}, 0.0, 1.0);
    CHECK(std::abs(cost_pp(cache)) < 1e-15);
}
