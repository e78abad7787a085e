#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "pulsekit/config.hpp"
#include "support/reference.hpp"

using namespace pulsekit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pulsekit_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(PULSEKIT_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kTinyConfig = R"({
  "problem": {
    "type": "pp",
    "rho0": [0, 0, 1],
    "lambda_f": [0, -1, 0],
    "n_digits": 4,
    "dt_us": 50.0,
    "basis": "cartesian_xy",
    "max_amplitude_hz": 5000.0,
    "grid": {"n_offsets": 5, "bandwidth_hz": 4000.0, "n_b1": 1, "b1_tolerance": 0.0}
  },
  "optimizer": {"max_iterations": 150, "seed": 3, "starts": 2}
})";

}  // namespace

TEST_CASE("config parsing accepts the documented schema and rejects the rest") {
    const auto cfg = parse_config_text(kTinyConfig);
    REQUIRE(cfg.optimize.has_value());
    CHECK(cfg.optimize->problem.shape_template.size() == 4);
    CHECK(cfg.optimize->starts == 2);
    CHECK(cfg.optimize->problem.grid.n_off == 5);

    // Unknown key, anywhere, is an error.
    CHECK(testsupport::thrown_message([&] {
              parse_config_text(R"({"problem": {"type": "pp", "rho0": [0,0,1],
                "lambda_f": [0,-1,0], "n_digits": 1, "dt_us": 1, "basis": "cartesian_xy",
                "max_amplitude_hz": 1, "typo": 5,
                "grid": {"n_offsets": 1, "bandwidth_hz": 0, "n_b1": 1, "b1_tolerance": 0}}})");
          }).find("unknown key 'typo'") != std::string::npos);

    // Grid with zero offsets is a schema violation.
    CHECK(testsupport::thrown_message([&] {
              parse_config_text(R"({"problem": {"type": "pp", "rho0": [0,0,1],
                "lambda_f": [0,-1,0], "n_digits": 1, "dt_us": 1, "basis": "cartesian_xy",
                "max_amplitude_hz": 1,
                "grid": {"n_offsets": 0, "bandwidth_hz": 0, "n_b1": 1, "b1_tolerance": 0}}})");
          }).find("n_off") != std::string::npos);

    // Syntax errors carry a line number.
    CHECK(testsupport::thrown_message([&] { parse_config_text("{\n  \"problem\": [,\n}"); })
              .find(":2:") != std::string::npos);

    // Reduced bases demand a constraint.
    CHECK(testsupport::thrown_message([&] {
              parse_config_text(R"({"problem": {"type": "pp", "rho0": [0,0,1],
                "lambda_f": [0,-1,0], "n_digits": 1, "dt_us": 1,
                "basis": "polar_reduced_amp_phase", "max_amplitude_hz": 1,
                "grid": {"n_offsets": 1, "bandwidth_hz": 0, "n_b1": 1, "b1_tolerance": 0}}})");
          }).find("requires a constraint") != std::string::npos);
}

TEST_CASE("optimize subcommand writes shapes, report and trajectory") {
    TempDir tmp;
    std::ofstream(tmp.file("cfg.json")) << kTinyConfig;
    const std::string out = tmp.file("run1");
    REQUIRE(run("optimize --config " + tmp.file("cfg.json") + " --out " + out) == 0);
    CHECK(fs::exists(out + "/shape.json"));
    CHECK(fs::exists(out + "/shape.jcamp"));
    CHECK(fs::exists(out + "/report.json"));
    CHECK(fs::exists(out + "/trajectory.tsv"));

    // Determinism: identical config and seed give byte-identical shapes.
    const std::string out2 = tmp.file("run2");
    REQUIRE(run("optimize --config " + tmp.file("cfg.json") + " --out " + out2) == 0);
    CHECK(slurp(out + "/shape.json") == slurp(out2 + "/shape.json"));
    CHECK(slurp(out + "/shape.jcamp") == slurp(out2 + "/shape.jcamp"));

    // A different seed changes the result.
    const std::string out3 = tmp.file("run3");
    REQUIRE(run("optimize --config " + tmp.file("cfg.json") + " --out " + out3 + " --seed 9") ==
            0);
    CHECK(slurp(out + "/shape.json") != slurp(out3 + "/shape.json"));
}

TEST_CASE("optimize rejects invalid configs with exit code 1") {
    TempDir tmp;
    std::ofstream(tmp.file("bad.json"))
        << R"({"problem": {"type": "pp", "rho0": [0,0,1], "lambda_f": [0,-1,0],
              "n_digits": 1, "dt_us": 1, "basis": "cartesian_xy", "max_amplitude_hz": 1,
              "grid": {"n_offsets": 0, "bandwidth_hz": 0, "n_b1": 1, "b1_tolerance": 0}}})";
    CHECK(run("optimize --config " + tmp.file("bad.json")) == 1);
    CHECK(run("optimize --config " + tmp.file("missing.json")) == 1);
}

TEST_CASE("simulate subcommand consumes optimize output") {
    TempDir tmp;
    std::ofstream(tmp.file("cfg.json")) << kTinyConfig;
    const std::string out = tmp.file("run");
    REQUIRE(run("optimize --config " + tmp.file("cfg.json") + " --out " + out) == 0);

    std::ofstream(tmp.file("sim.json")) << R"({
      "simulate": {
        "shape_file": ")" << out << R"(/shape.json",
        "type": "pp",
        "rho0": [0, 0, 1],
        "grid": {"n_offsets": 9, "bandwidth_hz": 4000.0, "n_b1": 3, "b1_tolerance": 0.1}
      }
    })";
    const std::string simout = tmp.file("sim");
    REQUIRE(run("simulate --config " + tmp.file("sim.json") + " --out " + simout) == 0);
    const std::string profile = slurp(simout + "/profile.tsv");
    CHECK(profile.find("# offset_hz b1_scale Mx My Mz") == 0);
    CHECK(std::count(profile.begin(), profile.end(), '\n') == 28);  // header + 27 cells
}

TEST_CASE("gradcheck and bench subcommands run clean") {
    CHECK(run("gradcheck --draws 25") == 0);
    CHECK(run("bench --calls 50 --reps 1") == 0);
}
