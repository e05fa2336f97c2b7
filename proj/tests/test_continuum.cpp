#include <doctest.h>

#include <random>

#include "brittle/continuum.hpp"
#include "brittle/error.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace brittle;

namespace {

// One-element mesh with explicit world positions and velocities.
TetMesh deformed_tet(const std::array<Vec3, 4>& material, const std::array<Vec3, 4>& world,
                     const std::array<Vec3, 4>& velocity, Material mat) {
    TetMesh mesh = testutil::single_tet(material, mat);
    for (int i = 0; i < 4; ++i) {
        mesh.node(i).world_pos = world[i];
        mesh.node(i).velocity = velocity[i];
    }
    return mesh;
}

const std::array<Vec3, 4> kUnit = {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

}  // namespace

TEST_CASE("deformation_partials at rest and under stretch") {
    Material mat = testutil::default_material();
    TetMesh rest = testutil::unit_tet(mat);
    const DeformationState ds = deformation_partials(rest.element(0), rest);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(ds.dx_du(i, j) == doctest::Approx(i == j ? 1 : 0).epsilon(1e-12));
            CHECK(ds.dv_du(i, j) == doctest::Approx(0).epsilon(1e-12));
        }

    std::array<Vec3, 4> stretched = kUnit;
    for (Vec3& p : stretched) p.x *= 2.0;
    TetMesh mesh = deformed_tet(kUnit, stretched, {}, mat);
    const DeformationState ds2 = deformation_partials(mesh.element(0), mesh);
    CHECK(ds2.dx_du(0, 0) == doctest::Approx(2).epsilon(1e-12));
    CHECK(ds2.dx_du(1, 1) == doctest::Approx(1).epsilon(1e-12));
    CHECK(ds2.dx_du(2, 2) == doctest::Approx(1).epsilon(1e-12));
    CHECK(ds2.dx_du(0, 1) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("deformation_partials: uniform velocity gives zero dv_du") {
    Material mat = testutil::default_material();
    const Vec3 v{3, -2, 1};
    TetMesh mesh = deformed_tet(kUnit, kUnit, {v, v, v, v}, mat);
    const DeformationState ds = deformation_partials(mesh.element(0), mesh);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(ds.dv_du(i, j)) < 1e-12);
}

TEST_CASE("green_strain basics") {
    DeformationState ds;
    ds.dx_du = Mat3::identity();
    CHECK(green_strain(ds).frobenius_norm() < 1e-15);

    ds.dx_du = Mat3::identity();
    ds.dx_du(0, 0) = 2.0;
    const SymTensor3 eps = green_strain(ds);
    CHECK(eps.xx == doctest::Approx(3).epsilon(1e-15));
    CHECK(std::abs(eps.yy) < 1e-15);
    CHECK(std::abs(eps.xy) < 1e-15);
}

TEST_CASE("green_strain is invariant under rigid motion") {
    std::mt19937_64 rng(2024);
    Material mat = testutil::default_material();
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tet = testutil::random_tet(rng);
        const Mat3 r = axis_angle_rotation(testutil::random_unit(rng),
                                           6.28 * (trial / 1000.0 - 0.5));
        const Vec3 shift = testutil::random_vec(rng, 5.0);
        std::array<Vec3, 4> world;
        for (int i = 0; i < 4; ++i) world[i] = r * tet[i] + shift;
        TetMesh mesh = deformed_tet(tet, world, {}, mat);
        const SymTensor3 eps = green_strain(deformation_partials(mesh.element(0), mesh));
        CHECK(eps.frobenius_norm() < 1e-9);
    }
}

TEST_CASE("strain_rate basics") {
    DeformationState ds;
    ds.dx_du = Mat3::identity();
    CHECK(strain_rate(ds).frobenius_norm() < 1e-15);

    ds.dv_du = Mat3{};
    ds.dv_du(0, 0) = 1.0;
    const SymTensor3 nu = strain_rate(ds);
    CHECK(nu.xx == doctest::Approx(2).epsilon(1e-15));
    CHECK(std::abs(nu.yy) < 1e-15);
}

TEST_CASE("strain_rate vanishes for a rigid rotation rate") {
    // Velocity field v = omega x p at the rest configuration.
    Material mat = testutil::default_material();
    const Vec3 omega{0, 0, 2.5};
    std::array<Vec3, 4> vel;
    for (int i = 0; i < 4; ++i) vel[i] = cross(omega, kUnit[i]);
    TetMesh mesh = deformed_tet(kUnit, kUnit, vel, mat);
    const SymTensor3 nu = strain_rate(deformation_partials(mesh.element(0), mesh));
    CHECK(nu.frobenius_norm() < 1e-9);
}

TEST_CASE("strain_rate equals the finite-difference strain derivative") {
    std::mt19937_64 rng(808);
    Material mat = testutil::default_material();
    for (int trial = 0; trial < 200; ++trial) {
        const auto tet = testutil::random_tet(rng);
        std::array<Vec3, 4> world, vel;
        for (int i = 0; i < 4; ++i) {
            world[i] = tet[i] + testutil::random_vec(rng, 0.1);
            vel[i] = testutil::random_vec(rng, 2.0);
        }
        TetMesh mesh = deformed_tet(tet, world, vel, mat);
        const SymTensor3 nu = strain_rate(deformation_partials(mesh.element(0), mesh));

        // eps((p + h v) ) - eps(p - h v) over 2h.
        const double h = 1e-6;
        TetMesh fwd = mesh, bwd = mesh;
        for (int i = 0; i < 4; ++i) {
            fwd.node(i).world_pos += vel[i] * h;
            bwd.node(i).world_pos -= vel[i] * h;
        }
        const SymTensor3 ef = green_strain(deformation_partials(fwd.element(0), fwd));
        const SymTensor3 eb = green_strain(deformation_partials(bwd.element(0), bwd));
        const SymTensor3 fd = (ef - eb) * (1.0 / (2.0 * h));
        const double scale = std::max(nu.frobenius_norm(), 1e-6);
        CHECK((nu - fd).frobenius_norm() / scale < 1e-5);
    }
}

TEST_CASE("stress: isotropic law") {
    Material mat;
    mat.lambda = 1;
    mat.mu = 1;
    mat.rho = 1;
    mat.tau = 1;
    const StressState zero = stress({}, {}, mat);
    CHECK(zero.total.frobenius_norm() < 1e-15);

    const StressState s = stress(SymTensor3::identity(), {}, mat);
    CHECK(s.elastic.xx == doctest::Approx(5).epsilon(1e-15));
    CHECK(s.elastic.yy == doctest::Approx(5).epsilon(1e-15));
    CHECK(s.elastic.zz == doctest::Approx(5).epsilon(1e-15));
    CHECK(std::abs(s.elastic.xy) < 1e-15);
}

TEST_CASE("stress: glass parameters under small uniaxial strain") {
    Material glass;
    glass.lambda = 1.04e8;
    glass.mu = 1.04e8;
    glass.phi = 0;
    glass.psi = 6760;
    glass.rho = 2588;
    glass.tau = 10140;
    const StressState s = stress(SymTensor3::diag(1e-3, 0, 0), {}, glass);
    CHECK(s.elastic.xx == doctest::Approx(3.12e5).epsilon(1e-9));
    CHECK(s.elastic.yy == doctest::Approx(1.04e5).epsilon(1e-9));
    CHECK(s.elastic.zz == doctest::Approx(1.04e5).epsilon(1e-9));
}

TEST_CASE("stress matches the general rank-four form") {
    std::mt19937_64 rng(4141);
    for (int trial = 0; trial < 300; ++trial) {
        Material mat;
        mat.lambda = trial % 4 == 0 ? 0.0 : 6.03e8 * (trial / 300.0);
        mat.mu = 1.21e8;
        mat.phi = 3015;
        mat.psi = 6030;
        mat.rho = 2309;
        mat.tau = 6030;
        const SymTensor3 eps = testutil::random_sym_tensor(rng, 0.01);
        const SymTensor3 nu = testutil::random_sym_tensor(rng, 0.1);
        const StressState s = stress(eps, nu, mat);

        const Mat3 general_e =
            oracle::apply_rank_four(oracle::isotropic_tensor(mat.lambda, mat.mu), eps);
        const Mat3 general_v =
            oracle::apply_rank_four(oracle::isotropic_tensor(mat.phi, mat.psi), nu);
        const double scale_e = std::max(frobenius_norm(general_e), 1e-300);
        const double scale_v = std::max(frobenius_norm(general_v), 1e-300);
        CHECK(frobenius_norm(s.elastic.to_mat3() - general_e) / scale_e < 1e-10);
        CHECK(frobenius_norm(s.viscous.to_mat3() - general_v) / scale_v < 1e-10);
    }
}

TEST_CASE("viscous stress vanishes for locally rigid motion") {
    Material mat = testutil::default_material();
    // Uniform translation velocity.
    TetMesh mesh = deformed_tet(kUnit, kUnit, {Vec3{1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}},
                                mat);
    DeformationState ds = deformation_partials(mesh.element(0), mesh);
    StressState s = stress(green_strain(ds), strain_rate(ds), mat);
    CHECK(s.viscous.frobenius_norm() < 1e-9);

    // Rigid rotation rate at rest.
    const Vec3 omega{1.0, -0.5, 0.25};
    for (int i = 0; i < 4; ++i) mesh.node(i).velocity = cross(omega, mesh.node(i).world_pos);
    ds = deformation_partials(mesh.element(0), mesh);
    s = stress(green_strain(ds), strain_rate(ds), mat);
    CHECK(s.viscous.frobenius_norm() < 1e-9 * (mat.phi + 2 * mat.psi));
}

TEST_CASE("potential densities") {
    Material mat;
    mat.lambda = 0;
    mat.mu = 1;
    mat.rho = 1;
    mat.tau = 1;
    const auto rest = potential_densities({}, {}, {}, {});
    CHECK(rest.elastic == 0);
    CHECK(rest.damping == 0);

    const SymTensor3 eps = SymTensor3::diag(1, 0, 0);
    const StressState s = stress(eps, {}, mat);
    CHECK(potential_densities(eps, {}, s.elastic, s.viscous).elastic ==
          doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("elastic potential matches the quadratic-form oracle") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 300; ++trial) {
        Material mat;
        mat.lambda = 2.65e6;
        mat.mu = 3.97e6;
        mat.phi = 264;
        mat.psi = 397;
        mat.rho = 1013;
        mat.tau = 52.9;
        const SymTensor3 eps = testutil::random_sym_tensor(rng, 5e-3);
        const StressState s = stress(eps, {}, mat);
        const double eta = potential_densities(eps, {}, s.elastic, {}).elastic;

        const Mat3 general =
            oracle::apply_rank_four(oracle::isotropic_tensor(mat.lambda, mat.mu), eps);
        const Mat3 e = eps.to_mat3();
        double expected = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) expected += 0.5 * general(i, j) * e(i, j);
        CHECK(eta == doctest::Approx(expected).epsilon(1e-10));
        CHECK(eta >= 0.0);
    }
}

TEST_CASE("traction") {
    const SymTensor3 sigma = SymTensor3::diag(5, 0, 0);
    const Vec3 t = traction(sigma, {1, 0, 0});
    CHECK(t.x == doctest::Approx(5).epsilon(1e-15));
    CHECK(t.y == 0);

    // A zero-stress eigenvector carries zero traction.
    CHECK(norm(traction(sigma, {0, 1, 0})) < 1e-15);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const SymTensor3 s = testutil::random_sym_tensor(rng);
        const Vec3 n = testutil::random_unit(rng);
        const Vec3 expected = s.to_mat3() * n;
        CHECK(norm(traction(s, n) - expected) < 1e-12);
    }

    CHECK_THROWS_AS(traction(sigma, {1, 1, 0}), InvalidInputError);
}
