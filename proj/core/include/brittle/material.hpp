#pragma once

namespace brittle {

// Isotropic material constants.
struct Material {
    double lambda = 0.0;  // N/m^2, resistance to dilation
    double mu = 0.0;      // N/m^2, rigidity
    double phi = 0.0;     // N*s/m^2, dilational damping
    double psi = 0.0;     // N*s/m^2, shear damping
    double rho = 0.0;     // kg/m^3
    double tau = 0.0;     // N/m^2, toughness threshold for fracture
};

// Throws ValidationError unless mu > 0, rho > 0, tau > 0 and
// lambda, phi, psi >= 0.
void validate_material(const Material& m);

}  // namespace brittle
