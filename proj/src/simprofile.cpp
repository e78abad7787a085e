#include "pulsekit/simprofile.hpp"

#include <ostream>

#include "pulsekit/parallel.hpp"
#include "pulsekit/rotkernel.hpp"

namespace pulsekit {
namespace {

template <typename CellFn>
ProfileTable run_cells(const std::vector<double>& offsets_hz,
                       const std::vector<double>& b1_scales, bool is_state, int threads,
                       CellFn&& cell) {
    ProfileTable t;
    t.offsets_hz = offsets_hz;
    t.b1_scales = b1_scales;
    t.is_state = is_state;
    if (is_state)
        t.magnetization.resize(t.cells());
    else
        t.quality.resize(t.cells());
    parallel_for(t.cells(), threads, [&](std::size_t idx) {
        const std::size_t i_off = idx % offsets_hz.size();
        const std::size_t l_b1 = idx / offsets_hz.size();
        cell(t, idx, offsets_hz[i_off], b1_scales[l_b1]);
    });
    return t;
}

}  // namespace

ProfileTable simulate_profile(const PulseShape& shape, const Vec3& rho0,
                              const std::vector<double>& offsets_hz,
                              const std::vector<double>& b1_scales,
                              const ConstraintSpec* constraint, int threads) {
    shape.validate();
    return run_cells(offsets_hz, b1_scales, true, threads,
                     [&](ProfileTable& t, std::size_t idx, double off_hz, double scale) {
                         const auto params = shape_to_rotation_params(
                             shape, kTwoPi * off_hz, scale, constraint);
                         Vec3 rho = rho0;
                         for (const auto& p : params)
                             rho = rotation_from_params(p).apply(rho);
                         t.magnetization[idx] = rho;
                     });
}

ProfileTable simulate_ur_profile(const PulseShape& shape, const Quaternion& q_f,
                                 const std::vector<double>& offsets_hz,
                                 const std::vector<double>& b1_scales,
                                 const ConstraintSpec* constraint, int threads) {
    shape.validate();
    return run_cells(offsets_hz, b1_scales, false, threads,
                     [&](ProfileTable& t, std::size_t idx, double off_hz, double scale) {
                         const auto params = shape_to_rotation_params(
                             shape, kTwoPi * off_hz, scale, constraint);
                         Quaternion total = Quaternion::identity();
                         for (const auto& p : params)
                             total = quaternion_multiply(quaternion_from_params(p), total);
                         t.quality[idx] = std::abs(dot(q_f, total));
                     });
}

void write_profile(std::ostream& os, const ProfileTable& table) {
    os.precision(12);
    if (table.is_state)
        os << "# offset_hz b1_scale Mx My Mz\n";
    else
        os << "# offset_hz b1_scale quality\n";
    for (std::size_t l = 0; l < table.b1_scales.size(); ++l)
        for (std::size_t i = 0; i < table.offsets_hz.size(); ++i) {
            const std::size_t idx = table.index(i, l);
            os << table.offsets_hz[i] << '\t' << table.b1_scales[l];
            if (table.is_state) {
                const Vec3& m = table.magnetization[idx];
                os << '\t' << m[0] << '\t' << m[1] << '\t' << m[2] << '\n';
            } else {
                os << '\t' << table.quality[idx] << '\n';
            }
        }
}

}  // namespace pulsekit
