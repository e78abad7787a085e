#pragma once

// Evaluation of finished pulses over dense offset/B1 grids: final Bloch
// vectors for state-to-state pulses, propagator overlap magnitudes for
// universal rotations.  Output is plot-ready tab-separated text.

#include <iosfwd>
#include <vector>

#include "pulsekit/constraints.hpp"
#include "pulsekit/core.hpp"

namespace pulsekit {

struct ProfileTable {
    std::vector<double> offsets_hz;
    std::vector<double> b1_scales;
    bool is_state = true;          // true: Bloch vectors, false: quality
    std::vector<Vec3> magnetization;  // size cells(), offset-fastest
    std::vector<double> quality;      // size cells(), offset-fastest

    std::size_t cells() const { return offsets_hz.size() * b1_scales.size(); }
    /// Flat index of a cell; rows are emitted offset-fastest.
    std::size_t index(std::size_t i_off, std::size_t l_b1) const {
        return l_b1 * offsets_hz.size() + i_off;
    }
};

/// Propagate rho0 through the shape at every (offset, scale) cell and
/// record the final Bloch vector.
ProfileTable simulate_profile(const PulseShape& shape, const Vec3& rho0,
                              const std::vector<double>& offsets_hz,
                              const std::vector<double>& b1_scales,
                              const ConstraintSpec* constraint = nullptr, int threads = 1);

/// Per-cell overlap magnitude |<q_f | Q_total>|.
ProfileTable simulate_ur_profile(const PulseShape& shape, const Quaternion& q_f,
                                 const std::vector<double>& offsets_hz,
                                 const std::vector<double>& b1_scales,
                                 const ConstraintSpec* constraint = nullptr, int threads = 1);

/// Tab-separated dump: "# offset_hz b1_scale Mx My Mz" (or "quality"),
/// one row per cell, offset varying fastest.
void write_profile(std::ostream& os, const ProfileTable& table);

}  // namespace pulsekit
