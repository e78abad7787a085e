#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pulsekit/optimizer.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/rotkernel.hpp"
#include "pulsekit/simprofile.hpp"
#include "support/reference.hpp"

using namespace pulsekit;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("zero-amplitude shape leaves z magnetization everywhere") {
    PulseShape s;
    s.basis = {BasisKind::CartesianXY};
    s.digits.assign(5, Digit{{0.0, 0.0}, 1e-5});
    const auto t = simulate_profile(s, {0, 0, 1}, linspace(-5000, 5000, 21), {0.9, 1.0, 1.1});
    for (const auto& m : t.magnetization) CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hard quarter turn about x maps z to minus y on resonance") {
    PulseShape s;
    s.basis = {BasisKind::CartesianXY};
    s.digits = {Digit{{kTwoPi / 4, 0.0}, 1.0}};
    const auto t = simulate_profile(s, {0, 0, 1}, {0.0}, {1.0});
    CHECK(std::abs(t.magnetization[0][0]) < 1e-15);
    CHECK(t.magnetization[0][1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("per-cell magnetization stays unit length") {
    Rng rng(81);
    const auto s = testsupport::random_shape(rng, {BasisKind::PolarAmpPhaseZ}, 24);
    const auto t = simulate_profile(s, {0, 0, 1}, linspace(-0.2 / kTwoPi, 0.2 / kTwoPi, 15),
                                    linspace(0.8, 1.2, 5));
    for (const auto& m : t.magnetization)
        CHECK(std::abs(norm(m) - 1.0) < 1e-10);
}

TEST_CASE("propagator profile: planted cell reaches quality one") {
    Rng rng(82);
    const auto s = testsupport::random_shape(rng, {BasisKind::CartesianXY}, 7);
    const Quaternion q_f = propagate_ur(s, Quaternion::identity(), 0.0, 1.0).prefix.back();
    const auto t = simulate_ur_profile(s, q_f, {0.0}, {1.0});
    CHECK(t.quality[0] == doctest::Approx(1.0).epsilon(1e-12));

    PulseShape zero;
    zero.basis = {BasisKind::CartesianXY};
    zero.digits = {Digit{{0.0, 0.0}, 1.0}};
    const auto tz = simulate_ur_profile(zero, Quaternion::identity(), {0.0}, {1.0});
    CHECK(tz.quality[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("profile dump is offset-fastest with the documented header") {
    PulseShape s;
    s.basis = {BasisKind::CartesianXY};
    s.digits = {Digit{{0.0, 0.0}, 1.0}};
    const auto t = simulate_profile(s, {0, 0, 1}, {-100.0, 0.0, 100.0}, {0.9, 1.1});
    std::ostringstream os;
    write_profile(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "# offset_hz b1_scale Mx My Mz");
    std::vector<std::pair<double, double>> cells;
    while (std::getline(is, line)) {
        std::istringstream row(line);
        double off, b1;
        row >> off >> b1;
        cells.emplace_back(off, b1);
    }
    REQUIRE(cells.size() == 6);
    CHECK(cells[0] == std::pair{-100.0, 0.9});
    CHECK(cells[1] == std::pair{0.0, 0.9});
    CHECK(cells[2] == std::pair{100.0, 0.9});
    CHECK(cells[3] == std::pair{-100.0, 1.1});
}

TEST_CASE("optimized excitation band holds up on a denser evaluation grid") {
    // Optimize the 10 x 50us excitation problem, then look at the pulse on
    // evaluation grids that are finer than the training grid.
    OptimizationProblem prob;
    const double dt = 50e-6;
    prob.shape_template.basis = {BasisKind::CartesianXY};
    prob.shape_template.digits.assign(10, Digit{{0.0, 0.0}, dt});
    prob.grid = {11, 6000.0, 3, 0.1};
    prob.target = Target::point_to_point({0, 0, 1}, {0, -1, 0});
    prob.init_amplitude = kTwoPi * 5000.0 * dt;
    prob.options.max_iterations = 600;

    const auto ms = multistart(prob, {1, 2, 3});
    REQUIRE(ms.best.quality >= 0.99);

    auto band_average = [&](int n_off) {
        const auto offs = linspace(-3000.0, 3000.0, n_off);
        const auto t = simulate_profile(ms.best.shape, {0, 0, 1}, offs, {1.0});
        double acc = 0;
        for (const auto& m : t.magnetization) acc += -m[1];  // overlap with target -y
        return acc / static_cast<double>(t.cells());
    };
    const double q61 = band_average(61);    // 100 Hz spacing
    const double q121 = band_average(121);  // 50 Hz spacing
    CHECK(std::abs(q61 - q121) < 0.005);

    // Transverse magnetization across the trained band at nominal B1.
    const auto t = simulate_profile(ms.best.shape, {0, 0, 1}, linspace(-3000, 3000, 41), {1.0});
    for (const auto& m : t.magnetization)
        CHECK(std::hypot(m[0], m[1]) >= 0.98);
}
