#include "pulsekit/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsekit::oracles {

template <typename T>
DenseMatrix<T> DenseMatrix<T>::operator*(const DenseMatrix& other) const {
    DenseMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            const T aik = (*this)(i, k);
            if (aik == T{}) continue;
            for (int j = 0; j < n_; ++j) r(i, j) += aik * other(k, j);
        }
    return r;
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::operator+(const DenseMatrix& other) const {
    DenseMatrix r = *this;
    r += other;
    return r;
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::operator-(const DenseMatrix& other) const {
    DenseMatrix r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - other.a_[i];
    return r;
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::operator*(T scalar) const {
    DenseMatrix r = *this;
    for (auto& v : r.a_) v *= scalar;
    return r;
}

template <typename T>
DenseMatrix<T>& DenseMatrix<T>::operator+=(const DenseMatrix& other) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

template <typename T>
double DenseMatrix<T>::norm1() const {
    double best = 0;
    for (int j = 0; j < n_; ++j) {
        double col = 0;
        for (int i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
        best = std::max(best, col);
    }
    return best;
}

template class DenseMatrix<double>;
template class DenseMatrix<std::complex<double>>;

namespace {

// Solve A X = B in place by partial-pivot LU; A and B are overwritten.
template <typename T>
DenseMatrix<T> lu_solve(DenseMatrix<T> a, DenseMatrix<T> b) {
    const int n = a.dim();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > best) {
                best = std::abs(a(r, col));
                piv = r;
            }
        if (best == 0.0) throw std::runtime_error("singular matrix in expm solve");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(b(col, j), b(piv, j));
            }
        const T d = a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const T f = a(r, col) / d;
            if (f == T{}) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (int j = 0; j < n; ++j) b(r, j) -= f * b(col, j);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        const T d = a(col, col);
        for (int j = 0; j < n; ++j) b(col, j) /= d;
        for (int r = 0; r < col; ++r) {
            const T f = a(r, col);
            if (f == T{}) continue;
            for (int j = 0; j < n; ++j) b(r, j) -= f * b(col, j);
        }
    }
    return b;
}

template <typename T, std::size_t N>
void pade_uv(const DenseMatrix<T>& a, const std::array<double, N>& b, DenseMatrix<T>& u,
             DenseMatrix<T>& v) {
    // Even/odd polynomial split; assumes N <= 10 (degrees 3..9).
    const int n = a.dim();
    const DenseMatrix<T> a2 = a * a;
    std::vector<DenseMatrix<T>> pow;  // I, A2, A4, ...
    pow.push_back(DenseMatrix<T>::identity(n));
    for (std::size_t k = 2; k + 1 < N; k += 2) pow.push_back(pow.back() * a2);
    DenseMatrix<T> us(n), vs(n);
    for (std::size_t k = 0; k * 2 + 1 < N; ++k) us += pow[k] * T{b[2 * k + 1]};
    for (std::size_t k = 0; k * 2 < N; ++k) vs += pow[k] * T{b[2 * k]};
    u = a * us;
    v = vs;
}

template <typename T>
DenseMatrix<T> expm_impl(DenseMatrix<T> a) {
    // Degree thresholds for the (m,m) Pade approximants in double precision.
    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068e0;
    constexpr double theta13 = 5.371920351148152e0;

    const int n = a.dim();
    const double nrm = a.norm1();
    DenseMatrix<T> u(n), v(n);
    int squarings = 0;

    if (nrm <= theta9) {
        if (nrm <= theta3) {
            pade_uv(a, std::array<double, 4>{120, 60, 12, 1}, u, v);
        } else if (nrm <= theta5) {
            pade_uv(a, std::array<double, 6>{30240, 15120, 3360, 420, 30, 1}, u, v);
        } else if (nrm <= theta7) {
            pade_uv(a,
                    std::array<double, 8>{17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1},
                    u, v);
        } else {
            pade_uv(a,
                    std::array<double, 10>{17643225600., 8821612800., 2075673600., 302702400.,
                                           30270240., 2162160., 110880., 3960., 90., 1.},
                    u, v);
        }
    } else {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
        a = a * T{std::ldexp(1.0, -squarings)};
        const std::array<double, 14> b{6.4764752532480000e16, 3.2382376266240000e16,
                                       7.7717703038976000e15, 1.1873537964288000e15,
                                       1.2906019526400000e14, 1.0559470521600000e13,
                                       6.7044257280000000e11, 3.3522128640000000e10,
                                       1.3232419200000000e9,  4.0840800000000000e7,
                                       9.6096000000000000e5,  1.6380000000000000e4,
                                       1.8200000000000000e2,  1.0};
        const DenseMatrix<T> a2 = a * a;
        const DenseMatrix<T> a4 = a2 * a2;
        const DenseMatrix<T> a6 = a2 * a4;
        const DenseMatrix<T> id = DenseMatrix<T>::identity(n);
        DenseMatrix<T> w = a6 * T{b[13]} + a4 * T{b[11]} + a2 * T{b[9]};
        w = a6 * w;
        w += a6 * T{b[7]} + a4 * T{b[5]} + a2 * T{b[3]} + id * T{b[1]};
        u = a * w;
        DenseMatrix<T> z = a6 * T{b[12]} + a4 * T{b[10]} + a2 * T{b[8]};
        z = a6 * z;
        z += a6 * T{b[6]} + a4 * T{b[4]} + a2 * T{b[2]} + id * T{b[0]};
        v = z;
    }

    DenseMatrix<T> f = lu_solve(v - u, v + u);
    for (int k = 0; k < squarings; ++k) f = f * f;
    return f;
}

RealMatrix embed_block(const RealMatrix& diag, const RealMatrix& corner) {
    const int n = diag.dim();
    RealMatrix m(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m(i, j) = diag(i, j);
            m(n + i, n + j) = diag(i, j);
            m(i, n + j) = corner(i, j);
        }
    return m;
}

ComplexMatrix embed_block(const ComplexMatrix& diag, const ComplexMatrix& corner) {
    const int n = diag.dim();
    ComplexMatrix m(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m(i, j) = diag(i, j);
            m(n + i, n + j) = diag(i, j);
            m(i, n + j) = corner(i, j);
        }
    return m;
}

ComplexMatrix minus_i_sigma_dot(const RotationParams& p) {
    const std::complex<double> mi(0, -1);
    ComplexMatrix h =
        su2_generator(0) * std::complex<double>(p.theta_x) +
        su2_generator(1) * std::complex<double>(p.theta_y) +
        su2_generator(2) * std::complex<double>(p.theta_z);
    return h * mi;
}

}  // namespace

RealMatrix expm(const RealMatrix& m) { return expm_impl(m); }
ComplexMatrix expm(const ComplexMatrix& m) { return expm_impl(m); }

RealMatrix so3_generator(int axis) {
    RealMatrix k(3);
    switch (axis) {
        case 0: k(1, 2) = -1; k(2, 1) = 1; break;
        case 1: k(0, 2) = 1; k(2, 0) = -1; break;
        case 2: k(0, 1) = -1; k(1, 0) = 1; break;
        default: throw std::invalid_argument("axis must be 0, 1 or 2");
    }
    return k;
}

ComplexMatrix su2_generator(int axis) {
    ComplexMatrix s(2);
    switch (axis) {
        case 0: s(0, 1) = 0.5; s(1, 0) = 0.5; break;
        case 1: s(0, 1) = {0, -0.5}; s(1, 0) = {0, 0.5}; break;
        case 2: s(0, 0) = 0.5; s(1, 1) = -0.5; break;
        default: throw std::invalid_argument("axis must be 0, 1 or 2");
    }
    return s;
}

Rotation3 augmented_gradient_rot(const RotationParams& p, int axis) {
    RealMatrix gen(3);
    gen += so3_generator(0) * p.theta_x;
    gen += so3_generator(1) * p.theta_y;
    gen += so3_generator(2) * p.theta_z;
    const RealMatrix big = expm(embed_block(gen, so3_generator(axis)));
    Rotation3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = big(i, 3 + j);
    return out;
}

ComplexMatrix augmented_gradient_su2(const RotationParams& p, int axis) {
    const std::complex<double> mi(0, -1);
    const ComplexMatrix big =
        expm(embed_block(minus_i_sigma_dot(p), su2_generator(axis) * mi));
    ComplexMatrix du(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) du(i, j) = big(i, 2 + j);
    return du;
}

ComplexMatrix su2_propagator(const RotationParams& p) {
    return expm(minus_i_sigma_dot(p));
}

Quaternion augmented_gradient_su2_quat(const RotationParams& p, int axis) {
    const ComplexMatrix du = augmented_gradient_su2(p, axis);
    Quaternion q;
    q.a = -0.5 * (du(0, 1).imag() + du(1, 0).imag());
    q.b = 0.5 * (du(1, 0).real() - du(0, 1).real());
    q.c = 0.5 * (du(1, 1).imag() - du(0, 0).imag());
    q.d = 0.5 * (du(0, 0).real() + du(1, 1).real());
    return q;
}

}  // namespace pulsekit::oracles
