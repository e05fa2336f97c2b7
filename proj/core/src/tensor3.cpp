#include "brittle/tensor3.hpp"

#include <algorithm>
#include <cmath>

#include "brittle/error.hpp"

namespace brittle {

namespace {

constexpr double kDegenerateGap = 1e-6;
constexpr double kPi = 3.14159265358979323846;

bool finite(const SymTensor3& t) {
    return std::isfinite(t.xx) && std::isfinite(t.yy) && std::isfinite(t.zz) &&
           std::isfinite(t.xy) && std::isfinite(t.xz) && std::isfinite(t.yz);
}

// Eigenvalues by the trigonometric solution of the characteristic polynomial,
// returned descending.
std::array<double, 3> analytic_eigenvalues(const SymTensor3& t) {
    const double p1 = t.xy * t.xy + t.xz * t.xz + t.yz * t.yz;
    if (p1 == 0.0) {
        std::array<double, 3> v{t.xx, t.yy, t.zz};
        std::sort(v.begin(), v.end(), std::greater<double>());
        return v;
    }
    const double q = t.trace() / 3.0;
    const double dxx = t.xx - q, dyy = t.yy - q, dzz = t.zz - q;
    const double p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat3 b = (t.to_mat3() - (SymTensor3::identity() * q).to_mat3()) * (1.0 / p);
    double r = det(b) / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return {e1, e2, e3};
}

// Eigenvector for a well-separated eigenvalue, via the largest cross product
// of rows of (A - lambda I).  Returns a zero vector when every cross product
// collapses (degenerate case; the caller falls back to Jacobi).
Vec3 eigenvector_for(const Mat3& a, double lambda) {
    Mat3 m = a;
    m(0, 0) -= lambda;
    m(1, 1) -= lambda;
    m(2, 2) -= lambda;
    const Vec3 r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
    const Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    const double n01 = norm2(c01), n02 = norm2(c02), n12 = norm2(c12);
    Vec3 best = c01;
    double best_n = n01;
    if (n02 > best_n) { best = c02; best_n = n02; }
    if (n12 > best_n) { best = c12; best_n = n12; }
    if (best_n <= 0.0) return {};
    return best / std::sqrt(best_n);
}

// Cyclic Jacobi sweeps.  Guarantees an orthonormal basis even for repeated
// eigenvalues.
EigenSystem3 jacobi_eigen(const SymTensor3& t) {
    double a[3][3];
    {
        Mat3 m = t.to_mat3();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
    }
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const double scale = std::max(t.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
        if (off <= 1e-15 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double tt = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0);
                const double s = tt * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    EigenSystem3 out;
    std::array<int, 3> order{0, 1, 2};
    std::array<double, 3> diag{a[0][0], a[1][1], a[2][2]};
    std::stable_sort(order.begin(), order.end(),
                     [&](int l, int r) { return diag[l] > diag[r]; });
    for (int i = 0; i < 3; ++i) {
        out.values[i] = diag[order[i]];
        out.vectors[i] = normalized(Vec3{v[0][order[i]], v[1][order[i]], v[2][order[i]]});
    }
    return out;
}

}  // namespace

EigenSystem3 sym_eigen(const SymTensor3& t) {
    if (!finite(t)) throw InvalidInputError("sym_eigen: non-finite tensor component");

    const std::array<double, 3> ev = analytic_eigenvalues(t);
    const double radius = std::max({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2]), 1e-300});
    const double gap = std::min(ev[0] - ev[1], ev[1] - ev[2]);
    if (gap / radius < kDegenerateGap) return jacobi_eigen(t);

    const Mat3 a = t.to_mat3();
    Vec3 v0 = eigenvector_for(a, ev[0]);
    Vec3 v2 = eigenvector_for(a, ev[2]);
    if (norm2(v0) == 0.0 || norm2(v2) == 0.0) return jacobi_eigen(t);
    v2 = normalized(v2 - dot(v2, v0) * v0);
    if (norm2(v2) == 0.0) return jacobi_eigen(t);
    const Vec3 v1 = cross(v2, v0);

    EigenSystem3 out;
    out.values = ev;
    out.vectors = {v0, v1, v2};

    // Residual check; any loss of accuracy drops to the robust path.
    Mat3 rec;
    for (int i = 0; i < 3; ++i)
        rec = rec + outer(out.vectors[i], out.vectors[i]) * out.values[i];
    if (frobenius_norm(rec - a) > 1e-11 * std::max(t.frobenius_norm(), 1e-300))
        return jacobi_eigen(t);
    return out;
}

SymTensor3 m_of(const Vec3& a) {
    if (!is_finite(a)) throw InvalidInputError("m_of: non-finite vector");
    const double n = norm(a);
    if (n == 0.0) return {};
    const double inv = 1.0 / n;
    return {a.x * a.x * inv, a.y * a.y * inv, a.z * a.z * inv,
            a.x * a.y * inv, a.x * a.z * inv, a.y * a.z * inv};
}

TensorSplit split_tensor(const SymTensor3& t) {
    const EigenSystem3 eig = sym_eigen(t);
    TensorSplit split;
    for (int i = 0; i < 3; ++i) {
        const SymTensor3 basis = m_of(eig.vectors[i]);  // unit vector: n n^T
        split.positive += basis * std::max(0.0, eig.values[i]);
        split.negative += basis * std::min(0.0, eig.values[i]);
    }
    return split;
}

}  // namespace brittle
