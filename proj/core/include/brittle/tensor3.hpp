#pragma once

#include <array>

#include "brittle/vec3.hpp"

namespace brittle {

// Symmetric 3x3 tensor stored as its six independent components.
struct SymTensor3 {
    double xx = 0.0, yy = 0.0, zz = 0.0;
    double xy = 0.0, xz = 0.0, yz = 0.0;

    static SymTensor3 diag(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }
    static SymTensor3 identity() { return diag(1.0, 1.0, 1.0); }

    // Symmetric part is implied; off-diagonal asymmetry of m is averaged away.
    static SymTensor3 from_mat3(const Mat3& m) {
        return {m(0, 0), m(1, 1), m(2, 2),
                0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)), 0.5 * (m(1, 2) + m(2, 1))};
    }

    Mat3 to_mat3() const {
        Mat3 m;
        m(0, 0) = xx; m(0, 1) = xy; m(0, 2) = xz;
        m(1, 0) = xy; m(1, 1) = yy; m(1, 2) = yz;
        m(2, 0) = xz; m(2, 1) = yz; m(2, 2) = zz;
        return m;
    }

    double trace() const { return xx + yy + zz; }

    double frobenius_norm() const {
        return std::sqrt(xx * xx + yy * yy + zz * zz + 2.0 * (xy * xy + xz * xz + yz * yz));
    }

    Vec3 apply(const Vec3& v) const {
        return {xx * v.x + xy * v.y + xz * v.z,
                xy * v.x + yy * v.y + yz * v.z,
                xz * v.x + yz * v.y + zz * v.z};
    }

    // Componentwise double contraction, sum_ij a_ij b_ij.
    double double_contract(const SymTensor3& b) const {
        return xx * b.xx + yy * b.yy + zz * b.zz + 2.0 * (xy * b.xy + xz * b.xz + yz * b.yz);
    }

    SymTensor3& operator+=(const SymTensor3& r) {
        xx += r.xx; yy += r.yy; zz += r.zz;
        xy += r.xy; xz += r.xz; yz += r.yz;
        return *this;
    }
    SymTensor3& operator-=(const SymTensor3& r) {
        xx -= r.xx; yy -= r.yy; zz -= r.zz;
        xy -= r.xy; xz -= r.xz; yz -= r.yz;
        return *this;
    }
    SymTensor3& operator*=(double s) {
        xx *= s; yy *= s; zz *= s;
        xy *= s; xz *= s; yz *= s;
        return *this;
    }
};

inline SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
inline SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
inline SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
inline SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }

struct EigenSystem3 {
    std::array<double, 3> values;  // sorted descending
    std::array<Vec3, 3> vectors;   // orthonormal, vectors[i] pairs with values[i]
};

// Eigendecomposition of a symmetric tensor.  Analytic characteristic-polynomial
// solve on the fast path; cyclic Jacobi when the spectrum is nearly degenerate
// (relative gap < 1e-6) so the returned triple stays orthonormal.
// Throws InvalidInputError on non-finite input.
EigenSystem3 sym_eigen(const SymTensor3& t);

// a a^T / |a| for a != 0, the zero tensor otherwise.  Has eigenvalues
// {|a|, 0, 0} with a as the leading eigenvector.
SymTensor3 m_of(const Vec3& a);

struct TensorSplit {
    SymTensor3 positive;  // sum of max(0, v_i) m(n_i), positive semidefinite
    SymTensor3 negative;  // sum of min(0, v_i) m(n_i), negative semidefinite
};

// Tensile/compressive split; positive + negative reconstructs the input.
TensorSplit split_tensor(const SymTensor3& t);

}  // namespace brittle
