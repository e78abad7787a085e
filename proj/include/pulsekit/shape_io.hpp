#pragma once

// Shaped-pulse file I/O.
//
// Native format: a JSON document
//   { "dt_us": <number>, "basis": <string>, "digits": [[c0, c1, ...], ...] }
// (plus "theta_xy_const_rad" for the phase_only basis).  Doubles are
// written in shortest round-trip form, so write-then-read reproduces a
// shape bit for bit.  Requires uniform digit duration.
//
// JCAMP-style export: the amplitude-percent / phase-degree pair list that
// spectrometer toolchains consume,
//   ##TITLE=...
//   ##NPOINTS=<N>
//   ##XYPOINTS= (XY..XY)
//   <amplitude percent>, <phase degrees>     (6 decimals, one per digit)
//   ##END=
// Amplitudes are percent of the shape maximum, phases wrapped to
// [0, 360); negative amplitudes are folded to (|amp|, phase + 180) at
// export time.  Reading it back needs the lost absolute scale and digit
// duration as parameters.

#include <string>

#include "pulsekit/constraints.hpp"
#include "pulsekit/core.hpp"

namespace pulsekit {

/// Parse/validation failure with file position context.
struct ShapeIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_shape_native(const PulseShape& shape, const std::string& path);
PulseShape read_shape_native(const std::string& path);

/// Physical amplitude/phase view of a shape: constraint clamp applied,
/// negative amplitudes folded into the phase.  Cartesian controls are
/// converted to polar; z controls are preserved.
PulseShape to_physical_polar(const PulseShape& shape,
                             const ConstraintSpec* constraint = nullptr);

void write_shape_jcamp(const PulseShape& shape, const std::string& path,
                       const ConstraintSpec* constraint = nullptr,
                       const std::string& title = "pulsekit shape");

/// Rebuild a polar shape from a JCAMP-style file; `max_amplitude_rad`
/// restores the 100% level and `dt_seconds` the digit duration.
PulseShape read_shape_jcamp(const std::string& path, double max_amplitude_rad,
                            double dt_seconds);

}  // namespace pulsekit
