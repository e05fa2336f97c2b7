#include "brittle/continuum.hpp"

#include <cmath>

#include "brittle/error.hpp"

namespace brittle {

DeformationState deformation_partials(const Element& e, const TetMesh& mesh) {
    DeformationState ds;
    // Column i of dx_du is P * beta * delta_i = sum_j p_j beta(j, i); only the
    // first three columns of beta enter.
    for (int i = 0; i < 3; ++i) {
        Vec3 dx, dv;
        for (int j = 0; j < 4; ++j) {
            const Node& n = mesh.node(e.nodes[j]);
            const double w = e.beta(j, i);
            dx += w * n.world_pos;
            dv += w * n.velocity;
        }
        ds.dx_du.set_col(i, dx);
        ds.dv_du.set_col(i, dv);
    }
    return ds;
}

SymTensor3 green_strain(const DeformationState& ds) {
    const Vec3 c0 = ds.dx_du.col(0), c1 = ds.dx_du.col(1), c2 = ds.dx_du.col(2);
    return {dot(c0, c0) - 1.0, dot(c1, c1) - 1.0, dot(c2, c2) - 1.0,
            dot(c0, c1), dot(c0, c2), dot(c1, c2)};
}

SymTensor3 strain_rate(const DeformationState& ds) {
    const Vec3 x0 = ds.dx_du.col(0), x1 = ds.dx_du.col(1), x2 = ds.dx_du.col(2);
    const Vec3 v0 = ds.dv_du.col(0), v1 = ds.dv_du.col(1), v2 = ds.dv_du.col(2);
    return {2.0 * dot(x0, v0), 2.0 * dot(x1, v1), 2.0 * dot(x2, v2),
            dot(x0, v1) + dot(v0, x1), dot(x0, v2) + dot(v0, x2), dot(x1, v2) + dot(v1, x2)};
}

StressState stress(const SymTensor3& eps, const SymTensor3& nu, const Material& mat) {
    StressState s;
    const double e_iso = mat.lambda * eps.trace();
    s.elastic = eps * (2.0 * mat.mu);
    s.elastic.xx += e_iso;
    s.elastic.yy += e_iso;
    s.elastic.zz += e_iso;
    const double v_iso = mat.phi * nu.trace();
    s.viscous = nu * (2.0 * mat.psi);
    s.viscous.xx += v_iso;
    s.viscous.yy += v_iso;
    s.viscous.zz += v_iso;
    s.total = s.elastic + s.viscous;
    return s;
}

PotentialDensities potential_densities(const SymTensor3& eps, const SymTensor3& nu,
                                       const SymTensor3& sigma_elastic,
                                       const SymTensor3& sigma_viscous) {
    return {0.5 * sigma_elastic.double_contract(eps), 0.5 * sigma_viscous.double_contract(nu)};
}

Vec3 traction(const SymTensor3& sigma, const Vec3& unit_normal) {
    if (std::abs(norm(unit_normal) - 1.0) > 1e-9)
        throw InvalidInputError("traction: normal is not unit length");
    return sigma.apply(unit_normal);
}

}  // namespace brittle
