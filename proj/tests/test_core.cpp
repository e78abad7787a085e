#include <doctest.h>

#include <cmath>

#include "pulsekit/core.hpp"
#include "pulsekit/rng.hpp"
#include "support/reference.hpp"

using namespace pulsekit;

namespace {

Digit make_digit(std::vector<double> controls, double dt) {
    Digit d;
    d.controls = std::move(controls);
    d.dt = dt;
    return d;
}

}  // namespace

TEST_CASE("basis arity and validation") {
    CHECK(ControlBasis{BasisKind::CartesianXY}.arity() == 2);
    CHECK(ControlBasis{BasisKind::CartesianXYZ}.arity() == 3);
    CHECK(ControlBasis{BasisKind::PolarAmpPhase}.arity() == 2);
    CHECK(ControlBasis{BasisKind::PolarReducedAmpPhaseZ}.arity() == 3);
    CHECK(ControlBasis{BasisKind::PhaseOnly}.arity() == 1);
    CHECK_THROWS_AS(ControlBasis{BasisKind::PhaseOnly}.validate(), std::invalid_argument);
    CHECK_NOTHROW((ControlBasis{BasisKind::PhaseOnly, 0.5}).validate());
    CHECK(ControlBasis::parse("polar_reduced_amp_phase").is_reduced());
    CHECK_THROWS_AS(ControlBasis::parse("nope"), std::invalid_argument);
}

TEST_CASE("a 5 kHz x pulse for 50 us is a 90 degree x rotation") {
    // Controls are stored as flip angles: theta_x = 2*pi*5000 Hz * 50 us.
    const double dt = 50e-6;
    const Digit d = make_digit({kTwoPi * 5000 * dt, 0.0}, dt);
    const auto p = digit_to_rotation_params(d, {BasisKind::CartesianXY}, 0.0, 1.0);
    CHECK(p.theta_x == doctest::Approx(kTwoPi / 4).epsilon(1e-15));
    CHECK(p.theta_y == 0.0);
    CHECK(p.theta_z == 0.0);
    CHECK(p.theta == doctest::Approx(kTwoPi / 4).epsilon(1e-15));
    CHECK(p.n_x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.n_y == 0.0);
    CHECK(p.n_z == 0.0);
}

TEST_CASE("zero controls give the zero-rotation axis convention") {
    const Digit d = make_digit({0.0, 0.0}, 1e-5);
    const auto p = digit_to_rotation_params(d, {BasisKind::CartesianXY}, 0.0, 1.0);
    CHECK(p.theta == 0.0);
    CHECK(p.n_x == 0.0);
    CHECK(p.n_y == 0.0);
    CHECK(p.n_z == 1.0);
}

TEST_CASE("polar digit with offset term, against the brute-force evaluator") {
    // theta_xy = 1, alpha = pi/3, offset contributes theta_z = 0.5.
    const double alpha = kTwoPi / 6;
    const Digit d = make_digit({1.0, alpha}, 1.0);
    const auto p = digit_to_rotation_params(d, {BasisKind::PolarAmpPhase}, 0.5, 1.0);
    const auto ref = testsupport::brute_force_geometry(1.0, alpha, 0.5);
    CHECK(p.theta == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(p.theta == doctest::Approx(ref.theta).epsilon(1e-15));
    CHECK(p.n_x == doctest::Approx(ref.n_x).epsilon(1e-14));
    CHECK(p.n_y == doctest::Approx(ref.n_y).epsilon(1e-14));
    CHECK(p.n_z == doctest::Approx(ref.n_z).epsilon(1e-14));
    CHECK(p.n_x == doctest::Approx(std::cos(alpha) / std::sqrt(1.25)).epsilon(1e-14));
    CHECK(p.n_z == doctest::Approx(0.5 / std::sqrt(1.25)).epsilon(1e-14));
}

TEST_CASE("cartesian-polar round trip preserves the transverse controls") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double tx = rng.uniform(-3, 3), ty = rng.uniform(-3, 3);
        const auto p = params_from_rotation_vector(tx, ty, rng.uniform(-3, 3));
        if (p.theta_xy <= 1e-9) continue;
        CHECK(std::abs(p.theta_xy * std::cos(p.alpha) - tx) < 1e-12);
        CHECK(std::abs(p.theta_xy * std::sin(p.alpha) - ty) < 1e-12);
    }
}

TEST_CASE("b1 scale touches only the transverse amplitude") {
    Rng rng(8);
    const ControlBasis xyz{BasisKind::CartesianXYZ};
    const ControlBasis paz{BasisKind::PolarAmpPhaseZ};
    for (int i = 0; i < 500; ++i) {
        const double s = rng.uniform(0.2, 2.0);
        const double off = rng.uniform(-2, 2);
        const Digit dc = make_digit(
            {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1)}, 1.0);
        const auto p1 = digit_to_rotation_params(dc, xyz, off, 1.0);
        const auto ps = digit_to_rotation_params(dc, xyz, off, s);
        CHECK(ps.theta_z == p1.theta_z);  // never scaled
        CHECK(ps.theta_x == doctest::Approx(s * p1.theta_x).epsilon(1e-14));
        CHECK(ps.theta_y == doctest::Approx(s * p1.theta_y).epsilon(1e-14));

        const Digit dp = make_digit(
            {rng.uniform(0, 2), rng.uniform(0, kTwoPi), rng.uniform(-1, 1)}, 1.0);
        const auto q1 = digit_to_rotation_params(dp, paz, off, 1.0);
        const auto qs = digit_to_rotation_params(dp, paz, off, s);
        CHECK(qs.theta_z == q1.theta_z);
        CHECK(qs.theta_xy == doctest::Approx(s * q1.theta_xy).epsilon(1e-14));
        CHECK(qs.alpha == q1.alpha);
    }
}

TEST_CASE("axis is unit length and theta non-negative for random digits") {
    Rng rng(9);
    for (int i = 0; i < 20000; ++i) {
        const auto p = testsupport::random_params(rng);
        CHECK(p.theta >= 0.0);
        const double n2 = p.n_x * p.n_x + p.n_y * p.n_y + p.n_z * p.n_z;
        CHECK(std::abs(n2 - 1.0) < 1e-12);
        CHECK(std::abs(p.theta * p.theta -
                       (p.theta_x * p.theta_x + p.theta_y * p.theta_y +
                        p.theta_z * p.theta_z)) <= 1e-12 * p.theta * p.theta);
    }
}

TEST_CASE("reduced amplitude passes through the clamp before the b1 scale") {
    const auto spec = ConstraintSpec::amplitude(0.8);
    const Digit d = make_digit({2.0, 0.3}, 1.0);
    const double s = 1.1;
    const auto p = digit_to_rotation_params(d, {BasisKind::PolarReducedAmpPhase}, 0.0, s, &spec);
    CHECK(p.theta_xy == doctest::Approx(s * 0.8 * std::tanh(2.0 / 0.8)).epsilon(1e-14));
    CHECK_THROWS_AS(digit_to_rotation_params(d, {BasisKind::PolarReducedAmpPhase}, 0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("digit arity mismatch is a contract violation") {
    const Digit d = make_digit({0.1}, 1.0);
    CHECK_THROWS_AS(digit_to_rotation_params(d, {BasisKind::CartesianXY}, 0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("grid axes are symmetric and handle singleton counts") {
    GridSpec g{11, 6000.0, 3, 0.1};
    const auto offs = g.offsets_hz();
    const auto scales = g.b1_scales();
    REQUIRE(offs.size() == 11);
    REQUIRE(scales.size() == 3);
    for (std::size_t i = 0; i < offs.size(); ++i)
        CHECK(offs[i] == doctest::Approx(-offs[offs.size() - 1 - i]).epsilon(1e-12));
    CHECK(offs[5] == 0.0);
    CHECK(scales[0] == doctest::Approx(0.9));
    CHECK(scales[1] == doctest::Approx(1.0));
    CHECK(scales[2] == doctest::Approx(1.1));

    GridSpec one{1, 6000.0, 1, 0.0};
    CHECK(one.offsets_hz() == std::vector<double>{0.0});
    CHECK(one.b1_scales() == std::vector<double>{1.0});

    GridSpec bad{0, 6000.0, 1, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("targets must be normalized") {
    CHECK_THROWS_AS(Target::point_to_point({0, 0, 2}, {0, -1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Target::universal_rotation({1, 1, 0, 0}), std::invalid_argument);
    CHECK_NOTHROW(Target::universal_rotation({0, 0, 0, 1}));
}

TEST_CASE("problem validation ties reduced bases to constraints") {
    OptimizationProblem prob;
    prob.shape_template.basis = ControlBasis{BasisKind::PolarReducedAmpPhase};
    prob.shape_template.digits = {make_digit({0.1, 0.2}, 1e-5)};
    prob.grid = {3, 1000.0, 1, 0.0};
    prob.target = Target::point_to_point({0, 0, 1}, {0, -1, 0});
    prob.init_amplitude = 0.5;
    CHECK_THROWS_AS(prob.validate(), std::invalid_argument);
    prob.constraint = ConstraintSpec::amplitude(0.5);
    CHECK_NOTHROW(prob.validate());
    prob.shape_template.basis = ControlBasis{BasisKind::PolarAmpPhase};
    CHECK_THROWS_AS(prob.validate(), std::invalid_argument);  // constraint w/o reduced basis
}
