#pragma once

#include "brittle/material.hpp"
#include "brittle/mesh.hpp"
#include "brittle/tensor3.hpp"
#include "brittle/vec3.hpp"

namespace brittle {

// First partials of world position / velocity with respect to the material
// coordinates.  Constant within a linear element.
struct DeformationState {
    Mat3 dx_du;  // column i = d x / d u_i
    Mat3 dv_du;  // column i = d xdot / d u_i
};

DeformationState deformation_partials(const Element& e, const TetMesh& mesh);

// Green strain: eps_ij = (dx/du_i . dx/du_j) - delta_ij.
SymTensor3 green_strain(const DeformationState& ds);

// Strain rate: nu_ij = (dx/du_i . dv/du_j) + (dv/du_i . dx/du_j).
SymTensor3 strain_rate(const DeformationState& ds);

struct StressState {
    SymTensor3 elastic;  // lambda tr(eps) I + 2 mu eps
    SymTensor3 viscous;  // phi tr(nu) I + 2 psi nu
    SymTensor3 total;    // elastic + viscous
};

StressState stress(const SymTensor3& eps, const SymTensor3& nu, const Material& mat);

struct PotentialDensities {
    double elastic = 0.0;  // eta, J/m^3
    double damping = 0.0;  // kappa, W/m^3
};

PotentialDensities potential_densities(const SymTensor3& eps, const SymTensor3& nu,
                                       const SymTensor3& sigma_elastic,
                                       const SymTensor3& sigma_viscous);

// t = sigma * n for a unit normal.  Throws InvalidInputError when |n| is not
// 1 within 1e-9.
Vec3 traction(const SymTensor3& sigma, const Vec3& unit_normal);

}  // namespace brittle
