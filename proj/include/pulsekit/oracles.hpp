#pragma once

// Independent ground-truth derivative computations used for verification
// and benchmarking: a scaling-and-squaring Pade matrix exponential on
// small dense matrices, augmented block exponentials for the exact
// rotation/propagator derivatives, and central finite differences.
//
// Nothing in here calls the analytic kernels; the two paths must stay
// independent so their agreement means something.

#include <complex>
#include <vector>

#include "pulsekit/core.hpp"
#include "pulsekit/geom.hpp"

namespace pulsekit::oracles {

/// Dense square matrix, dimension decided at runtime (intended for n <= 8).
template <typename T>
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, T{}) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    int dim() const { return n_; }
    T& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    const T& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    DenseMatrix operator*(const DenseMatrix& other) const;
    DenseMatrix operator+(const DenseMatrix& other) const;
    DenseMatrix operator-(const DenseMatrix& other) const;
    DenseMatrix operator*(T scalar) const;
    DenseMatrix& operator+=(const DenseMatrix& other);

    double norm1() const;  // max absolute column sum

  private:
    int n_ = 0;
    std::vector<T> a_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<std::complex<double>>;

/// Matrix exponential by Pade approximation with scaling and squaring;
/// relative error below 1e-13 for 1-norms up to ~50.
RealMatrix expm(const RealMatrix& m);
ComplexMatrix expm(const ComplexMatrix& m);

/// Real antisymmetric generators K_x, K_y, K_z with exp(t K_c) equal to
/// the rotation propagator about axis c by angle t (free precession maps
/// x toward y).
RealMatrix so3_generator(int axis);

/// Spin-1/2 generators (half Pauli matrices).
ComplexMatrix su2_generator(int axis);

/// Exact dR/dtheta_c from the 6x6 block exponential
/// exp([[K.u, K_c],[0, K.u]]) whose upper-right block is the derivative.
Rotation3 augmented_gradient_rot(const RotationParams& p, int axis);

/// Exact dU/dtheta_c (2x2 complex) from the 4x4 block exponential with
/// diagonal blocks -i(sigma . u) and off-diagonal -i sigma_c.
ComplexMatrix augmented_gradient_su2(const RotationParams& p, int axis);

/// The same SU(2) derivative mapped to quaternion components through
/// U = D - i(A sx + B sy + C sz) with standard (unit) Pauli matrices.
Quaternion augmented_gradient_su2_quat(const RotationParams& p, int axis);

/// SU(2) propagator itself (for tangency checks against the derivative).
ComplexMatrix su2_propagator(const RotationParams& p);

/// Central difference (f(x+h) - f(x-h)) / 2h; default h = 1e-6 max(1,|x|).
/// Works for any value type with elementwise subtraction and scaling.
template <typename F>
auto finite_difference(F&& f, double x, double h = 0.0) {
    if (h <= 0.0) h = 1e-6 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) * (1.0 / (2.0 * h));
}

}  // namespace pulsekit::oracles
