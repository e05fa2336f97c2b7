#pragma once

#include <array>
#include <cmath>

namespace brittle {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3& operator+=(const Vec3& r) { x += r.x; y += r.y; z += r.z; return *this; }
    Vec3& operator-=(const Vec3& r) { x -= r.x; y -= r.y; z -= r.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec3{};
}

inline bool is_finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Dense 3x3, row major.
struct Mat3 {
    double a[3][3] = {};

    double& operator()(int r, int c) { return a[r][c]; }
    double operator()(int r, int c) const { return a[r][c]; }

    static Mat3 identity() {
        Mat3 m;
        m.a[0][0] = m.a[1][1] = m.a[2][2] = 1.0;
        return m;
    }

    Vec3 col(int c) const { return {a[0][c], a[1][c], a[2][c]}; }
    Vec3 row(int r) const { return {a[r][0], a[r][1], a[r][2]}; }
    void set_col(int c, const Vec3& v) { a[0][c] = v.x; a[1][c] = v.y; a[2][c] = v.z; }
};

inline Mat3 operator+(const Mat3& l, const Mat3& r) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.a[i][j] = l.a[i][j] + r.a[i][j];
    return m;
}

inline Mat3 operator-(const Mat3& l, const Mat3& r) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.a[i][j] = l.a[i][j] - r.a[i][j];
    return m;
}

inline Mat3 operator*(const Mat3& m, double s) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.a[i][j] = m.a[i][j] * s;
    return r;
}

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m.a[0][0] * v.x + m.a[0][1] * v.y + m.a[0][2] * v.z,
            m.a[1][0] * v.x + m.a[1][1] * v.y + m.a[1][2] * v.z,
            m.a[2][0] * v.x + m.a[2][1] * v.y + m.a[2][2] * v.z};
}

inline Mat3 operator*(const Mat3& l, const Mat3& r) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += l.a[i][k] * r.a[k][j];
            m.a[i][j] = s;
        }
    return m;
}

inline Mat3 transpose(const Mat3& m) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.a[i][j] = m.a[j][i];
    return t;
}

inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.a[i][j] = a[i] * b[j];
    return m;
}

inline double det(const Mat3& m) {
    return m.a[0][0] * (m.a[1][1] * m.a[2][2] - m.a[1][2] * m.a[2][1]) -
           m.a[0][1] * (m.a[1][0] * m.a[2][2] - m.a[1][2] * m.a[2][0]) +
           m.a[0][2] * (m.a[1][0] * m.a[2][1] - m.a[1][1] * m.a[2][0]);
}

inline double frobenius_norm(const Mat3& m) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += m.a[i][j] * m.a[i][j];
    return std::sqrt(s);
}

// Rotation about a unit axis, right handed.
Mat3 axis_angle_rotation(const Vec3& unit_axis, double angle);

// Dense 4x4, row major.  Used for the element basis matrix.
struct Mat4 {
    double a[4][4] = {};

    double& operator()(int r, int c) { return a[r][c]; }
    double operator()(int r, int c) const { return a[r][c]; }

    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m.a[i][i] = 1.0;
        return m;
    }
};

std::array<double, 4> operator*(const Mat4& m, const std::array<double, 4>& v);

// Gauss-Jordan with partial pivoting.  Returns false when the matrix is
// numerically singular.  cond_inf_out, when non-null, receives the
// infinity-norm condition estimate ||M||inf * ||Minv||inf.
bool invert_mat4(const Mat4& m, Mat4& inverse_out, double* cond_inf_out = nullptr);

}  // namespace brittle
