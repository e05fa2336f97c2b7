#include "brittle/vec3.hpp"

#include <cstdlib>

namespace brittle {

Mat3 axis_angle_rotation(const Vec3& unit_axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Vec3& u = unit_axis;
    Mat3 r;
    r.a[0][0] = c + u.x * u.x * (1 - c);
    r.a[0][1] = u.x * u.y * (1 - c) - u.z * s;
    r.a[0][2] = u.x * u.z * (1 - c) + u.y * s;
    r.a[1][0] = u.y * u.x * (1 - c) + u.z * s;
    r.a[1][1] = c + u.y * u.y * (1 - c);
    r.a[1][2] = u.y * u.z * (1 - c) - u.x * s;
    r.a[2][0] = u.z * u.x * (1 - c) - u.y * s;
    r.a[2][1] = u.z * u.y * (1 - c) + u.x * s;
    r.a[2][2] = c + u.z * u.z * (1 - c);
    return r;
}

std::array<double, 4> operator*(const Mat4& m, const std::array<double, 4>& v) {
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += m.a[i][j] * v[j];
        r[i] = s;
    }
    return r;
}

static double inf_norm(const Mat4& m) {
    double best = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(m.a[i][j]);
        if (row > best) best = row;
    }
    return best;
}

bool invert_mat4(const Mat4& m, Mat4& inverse_out, double* cond_inf_out) {
    // Augmented [A | I], in-place Gauss-Jordan with row pivoting.
    double w[4][8];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) w[i][j] = m.a[i][j];
        for (int j = 0; j < 4; ++j) w[i][4 + j] = (i == j) ? 1.0 : 0.0;
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(w[r][col]) > std::abs(w[pivot][col])) pivot = r;
        if (w[pivot][col] == 0.0) return false;
        if (pivot != col)
            for (int j = 0; j < 8; ++j) std::swap(w[pivot][j], w[col][j]);
        const double inv = 1.0 / w[col][col];
        for (int j = 0; j < 8; ++j) w[col][j] *= inv;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = w[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 8; ++j) w[r][j] -= f * w[col][j];
        }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) inverse_out.a[i][j] = w[i][4 + j];
    if (cond_inf_out) *cond_inf_out = inf_norm(m) * inf_norm(inverse_out);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!std::isfinite(inverse_out.a[i][j])) return false;
    return true;
}

}  // namespace brittle
