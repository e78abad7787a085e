#pragma once

// Small fixed-size linear algebra for single-spin rotation kinematics:
// 3-vectors, 3x3 rotation matrices and unit quaternions (A,B,C,D with
// scalar part D).

#include <array>
#include <cmath>

namespace pulsekit {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 scaled(const Vec3& a, double s) {
    return {a[0] * s, a[1] * s, a[2] * s};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

/// Row-major 3x3 matrix.  Propagators built from axis/angle data are
/// proper rotations (R^T R = I, det R = 1); the type itself does not
/// enforce that so it can also hold derivative matrices.
struct Rotation3 {
    std::array<double, 9> m{};

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Rotation3 identity() {
        Rotation3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
                m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
                m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
    }

    /// R^T v; for a proper rotation this is the inverse action.
    Vec3 apply_transposed(const Vec3& v) const {
        return {m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
                m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
                m[2] * v[0] + m[5] * v[1] + m[8] * v[2]};
    }
};

// Elementwise vector-space ops; used on derivative matrices and for
// finite differencing, where entries are not constrained to SO(3)/S^3.
inline Rotation3 operator+(const Rotation3& a, const Rotation3& b) {
    Rotation3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

inline Rotation3 operator-(const Rotation3& a, const Rotation3& b) {
    Rotation3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}

inline Rotation3 operator*(const Rotation3& a, double s) {
    Rotation3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] * s;
    return r;
}

inline Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
    Rotation3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

/// Rotation quaternion (A, B, C, D): vector part (A,B,C), scalar part D.
/// A rotation by angle t about unit axis n has (A,B,C) = n sin(t/2) and
/// D = cos(t/2).
struct Quaternion {
    double a = 0, b = 0, c = 0, d = 1;

    static Quaternion identity() { return {0, 0, 0, 1}; }

    Quaternion conjugate() const { return {-a, -b, -c, d}; }

    double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    Vec4 as_vec4() const { return {a, b, c, d}; }
};

inline double dot(const Quaternion& p, const Quaternion& q) {
    return p.a * q.a + p.b * q.b + p.c * q.c + p.d * q.d;
}

/// Hamilton product q2 * q1: apply q1 first, then q2.
inline Quaternion quaternion_multiply(const Quaternion& q2, const Quaternion& q1) {
    return {
        q2.d * q1.a - q2.c * q1.b + q2.b * q1.c + q2.a * q1.d,
        q2.c * q1.a + q2.d * q1.b - q2.a * q1.c + q2.b * q1.d,
        -q2.b * q1.a + q2.a * q1.b + q2.d * q1.c + q2.c * q1.d,
        -q2.a * q1.a - q2.b * q1.b - q2.c * q1.c + q2.d * q1.d,
    };
}

inline Quaternion operator+(const Quaternion& p, const Quaternion& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
}

inline Quaternion operator-(const Quaternion& p, const Quaternion& q) {
    return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
}

inline Quaternion operator*(const Quaternion& q, double s) {
    return {q.a * s, q.b * s, q.c * s, q.d * s};
}

/// Rotation matrix induced by a unit quaternion; satisfies
/// rotation_of(q2*q1) = rotation_of(q2) * rotation_of(q1).
inline Rotation3 rotation_of(const Quaternion& q) {
    const double aa = q.a * q.a, bb = q.b * q.b, cc = q.c * q.c;
    const double ab = q.a * q.b, ac = q.a * q.c, ad = q.a * q.d;
    const double bc = q.b * q.c, bd = q.b * q.d, cd = q.c * q.d;
    Rotation3 r;
    r.m = {1 - 2 * (bb + cc), 2 * (ab - cd),     2 * (ac + bd),
           2 * (ab + cd),     1 - 2 * (aa + cc), 2 * (bc - ad),
           2 * (ac - bd),     2 * (bc + ad),     1 - 2 * (aa + bb)};
    return r;
}

}  // namespace pulsekit
