#include <doctest.h>

#include <random>

#include "brittle/error.hpp"
#include "brittle/mesh.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace brittle;

TEST_CASE("compute_beta matches an independent inversion") {
    const Vec3 m1{0, 0, 0}, m2{1, 0, 0}, m3{0, 1, 0}, m4{0, 0, 1};
    const Mat4 beta = compute_beta(m1, m2, m3, m4);

    double matrix[4][4] = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}};
    double expected[4][4];
    REQUIRE(oracle::gauss_inverse4(matrix, expected));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(beta(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));

    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const auto tet = testutil::random_tet(rng);
        const Mat4 b = compute_beta(tet[0], tet[1], tet[2], tet[3]);
        double m[4][4], inv[4][4];
        for (int c = 0; c < 4; ++c) {
            m[0][c] = tet[c].x;
            m[1][c] = tet[c].y;
            m[2][c] = tet[c].z;
            m[3][c] = 1.0;
        }
        REQUIRE(oracle::gauss_inverse4(m, inv));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(b(i, j) == doctest::Approx(inv[i][j]).epsilon(1e-9));
    }
}

TEST_CASE("compute_beta rejects coplanar nodes") {
    CHECK_THROWS_AS(compute_beta({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}),
                    DegenerateElementError);
    // Nearly coplanar: condition estimate past the limit.
    CHECK_THROWS_AS(compute_beta({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 1e-12}),
                    DegenerateElementError);
}

TEST_CASE("beta barycentric identity at a vertex") {
    const Vec3 m1{0.3, 0.1, -0.2}, m2{1.1, 0.2, 0.1}, m3{0.2, 1.4, 0.3}, m4{-0.1, 0.4, 1.2};
    const Mat4 beta = compute_beta(m1, m2, m3, m4);
    const auto b = beta * std::array<double, 4>{m2.x, m2.y, m2.z, 1.0};
    CHECK(b[0] == doctest::Approx(0).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(1).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(0).epsilon(1e-12));
    CHECK(b[3] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("beta partition of unity: columns sum to (0,0,0,1)") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 200; ++trial) {
        const auto tet = testutil::random_tet(rng);
        const Mat4 b = compute_beta(tet[0], tet[1], tet[2], tet[3]);
        for (int col = 0; col < 4; ++col) {
            double sum = 0.0;
            for (int row = 0; row < 4; ++row) sum += b(row, col);
            CHECK(sum == doctest::Approx(col == 3 ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("element_volume") {
    CHECK(element_volume({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(element_volume({0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}) ==
          doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
    const double s = 2.5;
    CHECK(element_volume({0, 0, 0}, {s, 0, 0}, {0, s, 0}, {0, 0, s}) ==
          doctest::Approx(s * s * s / 6.0).epsilon(1e-15));
}

TEST_CASE("assemble_masses single unit tet") {
    Material mat = testutil::default_material();
    mat.rho = 6.0;
    TetMesh mesh = testutil::unit_tet(mat);
    for (const Node& n : mesh.nodes) CHECK(n.mass == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("assemble_masses two tets sharing a face") {
    Material mat = testutil::default_material();
    mat.rho = 6.0;
    TetMesh mesh;
    mesh.materials.push_back(mat);
    const Vec3 pts[5] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    for (const Vec3& p : pts) {
        Node n;
        n.material_pos = p;
        n.world_pos = p;
        mesh.add_node(n);
    }
    mesh.add_element({0, 1, 2, 3}, 0);
    const double v2 = element_volume(pts[1], pts[2], pts[3], pts[4]);
    if (v2 > 0) mesh.add_element({1, 2, 3, 4}, 0);
    else mesh.add_element({1, 3, 2, 4}, 0);
    mesh.assemble_masses();

    const double vol1 = mesh.element(0).volume;
    const double vol2 = mesh.element(1).volume;
    CHECK(mesh.node(0).mass == doctest::Approx(6.0 * vol1 / 4).epsilon(1e-12));
    CHECK(mesh.node(4).mass == doctest::Approx(6.0 * vol2 / 4).epsilon(1e-12));
    for (NodeId shared : {1, 2, 3})
        CHECK(mesh.node(shared).mass ==
              doctest::Approx(6.0 * (vol1 + vol2) / 4).epsilon(1e-12));
}

TEST_CASE("assemble_masses conserves total mass on a box mesh") {
    Material mat = testutil::default_material();
    mat.rho = 2309.0;
    const TetMesh mesh = testutil::box_mesh(4, 2, 2, 0.1, mat);
    double node_total = 0.0;
    for (const Node& n : mesh.nodes)
        if (n.alive) node_total += n.mass;
    double elem_total = 0.0;
    for (const Element& e : mesh.elements)
        if (e.alive) elem_total += mat.rho * e.volume;
    CHECK(node_total == doctest::Approx(elem_total).epsilon(1e-9));
    // The box volume is exact.
    CHECK(elem_total == doctest::Approx(mat.rho * 0.4 * 0.2 * 0.2).epsilon(1e-9));
}

TEST_CASE("orphan nodes keep their mass") {
    TetMesh mesh = testutil::unit_tet(testutil::default_material());
    Node extra;
    extra.material_pos = {5, 5, 5};
    extra.world_pos = extra.material_pos;
    extra.mass = 3.25;
    const NodeId id = mesh.add_node(extra);
    mesh.assemble_masses();
    CHECK(mesh.node(id).mass == 3.25);
}

TEST_CASE("barycentric coordinates") {
    TetMesh mesh = testutil::unit_tet(testutil::default_material());

    const auto at_vertex = mesh.barycentric(0, {0, 1, 0});
    CHECK(at_vertex[2] == doctest::Approx(1).epsilon(1e-12));
    CHECK(at_vertex[0] == doctest::Approx(0).epsilon(1e-12));

    const auto at_centroid = mesh.barycentric(0, {0.25, 0.25, 0.25});
    for (double b : at_centroid) CHECK(b == doctest::Approx(0.25).epsilon(1e-12));

    // Interpolation consistency: P * b equals the weighted node sum.
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 u = testutil::random_vec(rng, 0.4) + Vec3{0.25, 0.25, 0.25};
        const auto b = mesh.barycentric(0, u);
        CHECK(b[0] + b[1] + b[2] + b[3] == doctest::Approx(1).epsilon(1e-12));
        Vec3 x;
        for (int i = 0; i < 4; ++i) x += b[i] * mesh.node(mesh.element(0).nodes[i]).world_pos;
        CHECK(norm(x - u) < 1e-12);  // world == material at rest
    }
}

TEST_CASE("adjacency bookkeeping under add/remove/replace") {
    TetMesh mesh = testutil::box_mesh(2, 2, 2, 0.5, testutil::default_material());
    mesh.validate_topology();
    for (const auto& [key, slot] : mesh.face_map) {
        int count = (slot[0] != kInvalidId) + (slot[1] != kInvalidId);
        CHECK(count >= 1);
        CHECK(count <= 2);
    }

    // Remove one element and check its faces are released.
    const std::size_t before = mesh.live_element_count();
    mesh.remove_element(0);
    mesh.validate_topology();
    CHECK(mesh.live_element_count() == before - 1);

    // Replace a corner of element 1 with a fresh co-located node.
    Node dup = mesh.node(mesh.element(1).nodes[0]);
    const NodeId copy = mesh.add_node(dup);
    mesh.replace_corner(1, mesh.element(1).nodes[0], copy);
    mesh.validate_topology();
    CHECK(mesh.element(1).nodes[0] == copy);
}

TEST_CASE("fragments: connected components of the element graph") {
    Material mat = testutil::default_material();
    TetMesh mesh = testutil::box_mesh(2, 1, 1, 0.5, mat);
    CHECK(mesh.fragments().count == 1);

    // A second, disconnected tetrahedron.
    const Vec3 base{10, 10, 10};
    std::array<NodeId, 4> ids;
    const Vec3 offs[4] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 4; ++i) {
        Node n;
        n.material_pos = base + offs[i];
        n.world_pos = n.material_pos;
        ids[i] = mesh.add_node(n);
    }
    mesh.add_element(ids, 0);
    CHECK(mesh.fragments().count == 2);
}

TEST_CASE("elements_with_edge") {
    TetMesh mesh = testutil::box_mesh(1, 1, 1, 1.0, testutil::default_material());
    // The cube diagonal (node 0 .. node 7) is shared by all six tets.
    const auto shared = mesh.elements_with_edge(0, 7);
    CHECK(shared.size() == 6);
}
