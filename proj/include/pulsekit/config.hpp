#pragma once

// JSON run configuration: schema-validated before any computation starts,
// unknown keys rejected.  A config file can hold a "problem"/"optimizer"
// section (for `optimize`) and/or a "simulate" section.

#include <optional>
#include <stdexcept>
#include <string>

#include "pulsekit/core.hpp"

namespace pulsekit {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OptimizeJob {
    OptimizationProblem problem;
    int starts = 1;
    std::string init_file;  // used when init strategy is FromFile
};

/// Constraint limits as configured (in Hz); conversion to rotation-angle
/// units needs the digit duration.
struct ConstraintConfig {
    std::string type;      // "amplitude", "power" or "energy"
    double value_hz = 0.0;

    ConstraintSpec to_spec(double dt_seconds) const;
};

struct SimulateJob {
    std::string shape_file;
    std::string shape_format = "native";  // "native" or "jcamp"
    double jcamp_max_amplitude_hz = 0.0;
    double jcamp_dt_us = 0.0;
    TargetKind kind = TargetKind::PointToPoint;
    Vec3 rho0{0, 0, 1};
    Quaternion q_f;
    GridSpec grid;
    std::optional<ConstraintConfig> constraint;
};

struct RunConfig {
    std::optional<OptimizeJob> optimize;
    std::optional<SimulateJob> simulate;
};

/// Parse and validate a config file; throws ConfigError with a precise
/// location (line for syntax errors, key path for schema errors).
RunConfig load_config(const std::string& path);

/// Same, from a JSON string (used by tests).
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace pulsekit
