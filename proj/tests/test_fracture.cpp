#include <doctest.h>

#include <random>
#include <sstream>

#include "brittle/femforce.hpp"
#include "brittle/fracture.hpp"
#include "support/testutil.hpp"

using namespace brittle;

namespace {

Node node_with_sets(std::vector<Vec3> tensile, std::vector<Vec3> compressive) {
    Node n;
    n.tensile_set = std::move(tensile);
    n.compressive_set = std::move(compressive);
    return n;
}

}  // namespace

TEST_CASE("separation tensor ignores a single unbalanced action") {
    const Vec3 f{3, -1, 2};
    const SymTensor3 s = separation_tensor(std::vector<Vec3>{f}, std::vector<Vec3>{});
    CHECK(s.frobenius_norm() == 0.0);

    const SymTensor3 c = separation_tensor(std::vector<Vec3>{}, std::vector<Vec3>{f});
    CHECK(c.frobenius_norm() == 0.0);
}

TEST_CASE("separation tensor of an opposing tensile pair") {
    const Vec3 f{2, 1, -0.5};
    const SymTensor3 s = separation_tensor(std::vector<Vec3>{f, -f}, std::vector<Vec3>{});
    const SymTensor3 expected = m_of(f);
    CHECK((s - expected).frobenius_norm() < 1e-12 * norm(f));
    const EigenSystem3 eig = sym_eigen(s);
    CHECK(eig.values[0] == doctest::Approx(norm(f)).epsilon(1e-12));
    CHECK(std::abs(std::abs(dot(eig.vectors[0], normalized(f))) - 1.0) < 1e-12);
}

TEST_CASE("separation tensor of an opposing compressive pair never fractures") {
    const Vec3 f{1, 2, 2};
    const SymTensor3 s = separation_tensor(std::vector<Vec3>{}, std::vector<Vec3>{f, -f});
    CHECK((s + m_of(f)).frobenius_norm() < 1e-12 * norm(f));
    CHECK(sym_eigen(s).values[0] < 1e-12);
}

TEST_CASE("balanced pure compression never fractures") {
    // With an empty tensile set and a compressive set that sums to zero the
    // separation tensor is -1/2 sum m(f): negative semidefinite.
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Vec3> compressive;
        const int count = 2 + trial % 5;
        Vec3 sum;
        for (int i = 0; i < count; ++i) {
            compressive.push_back(testutil::random_vec(rng, 10));
            sum += compressive.back();
        }
        compressive.push_back(-sum);
        const SymTensor3 s = separation_tensor({}, compressive);
        CHECK(sym_eigen(s).values[0] < 1e-9 * std::max(1.0, s.frobenius_norm()));
    }
}

TEST_CASE("separation tensor is covariant under rotation") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec3> tensile, compressive;
        for (int i = 0; i < 4; ++i) tensile.push_back(testutil::random_vec(rng, 5));
        for (int i = 0; i < 3; ++i) compressive.push_back(testutil::random_vec(rng, 5));
        const Mat3 r = axis_angle_rotation(testutil::random_unit(rng), 2.7 * trial / 200.0);

        const SymTensor3 s = separation_tensor(tensile, compressive);
        std::vector<Vec3> rt, rc;
        for (const Vec3& f : tensile) rt.push_back(r * f);
        for (const Vec3& f : compressive) rc.push_back(r * f);
        const SymTensor3 sr = separation_tensor(rt, rc);

        const Mat3 expected = r * s.to_mat3() * transpose(r);
        const double scale = std::max(s.frobenius_norm(), 1e-300);
        CHECK(frobenius_norm(sr.to_mat3() - expected) / scale < 1e-9);

        const EigenSystem3 ea = sym_eigen(s);
        const EigenSystem3 eb = sym_eigen(sr);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(ea.values[i] - eb.values[i]) < 1e-9 * std::max(scale, 1.0));
    }
}

TEST_CASE("evaluate_node thresholds") {
    const Vec3 f{0, 0, 2000};
    Node n = node_with_sets({f, -f}, {});
    auto event = evaluate_node(n, 1000.0);
    REQUIRE(event.has_value());
    CHECK(event->magnitude == doctest::Approx(2000).epsilon(1e-12));
    CHECK(std::abs(std::abs(event->plane_normal.z) - 1.0) < 1e-12);

    CHECK_FALSE(evaluate_node(n, 2000.0).has_value());  // strictly greater required
    CHECK_FALSE(evaluate_node(n, 3000.0).has_value());

    Node empty;
    CHECK_FALSE(evaluate_node(empty, 0.0).has_value());
}

TEST_CASE("evaluate_node reports only the largest plane") {
    // Two orthogonal opposing pairs: two super-threshold eigenvalues, one
    // event; the node is re-tested after remeshing.
    const Vec3 fx{300, 0, 0}, fy{0, 200, 0};
    Node n = node_with_sets({fx, -fx, fy, -fy}, {});
    auto event = evaluate_node(n, 100.0);
    REQUIRE(event.has_value());
    CHECK(event->magnitude == doctest::Approx(300).epsilon(1e-9));
    CHECK(std::abs(std::abs(event->plane_normal.x) - 1.0) < 1e-9);
}

namespace {

TetMesh stretched_bar(double stretch, Material mat) {
    TetMesh mesh = testutil::mirrored_bar_mesh(2, 1, 1, 0.1, mat);
    const double cx = 0.2;
    for (Node& n : mesh.nodes)
        if (n.alive) n.world_pos.x = cx + (n.world_pos.x - cx) * stretch;
    clear_step_state(mesh);
    assemble(mesh, {{}, SplitSource::total_stress});
    return mesh;
}

}  // namespace

TEST_CASE("fracture_pass: below threshold leaves the mesh untouched") {
    Material mat = testutil::default_material();
    mat.tau = 1e30;
    TetMesh mesh = stretched_bar(1.01, mat);
    const std::size_t elems = mesh.live_element_count();
    FractureConfig cfg;
    const auto events = fracture_pass(mesh, cfg);
    CHECK(events.empty());
    CHECK(mesh.live_element_count() == elems);
}

TEST_CASE("fracture_pass: ordering under max_splits_per_step = 1") {
    Material mat = testutil::default_material();
    mat.tau = 1.0;
    TetMesh mesh = stretched_bar(1.02, mat);

    NodeId expect = kInvalidId;
    double best = 0.0;
    for (NodeId id = 0; id < static_cast<NodeId>(mesh.nodes.size()); ++id) {
        const Node& n = mesh.node(id);
        if (!n.alive) continue;
        if (auto ev = evaluate_node(n, mat.tau); ev && ev->magnitude > best) {
            best = ev->magnitude;
            expect = id;
        }
    }
    REQUIRE(expect != kInvalidId);

    FractureConfig cfg;
    cfg.max_splits_per_step = 1;
    std::ostringstream warnings;
    const auto events = fracture_pass(mesh, cfg, &warnings);
    REQUIRE(events.size() <= 1);
    if (!events.empty()) CHECK(events[0].node == expect);
    mesh.validate_topology();
}

TEST_CASE("fracture_pass is deterministic") {
    Material mat = testutil::default_material();
    mat.tau = 0.5;
    TetMesh a = stretched_bar(1.03, mat);
    TetMesh b = stretched_bar(1.03, mat);
    FractureConfig cfg;
    cfg.max_splits_per_step = 8;
    std::ostringstream wa, wb;
    const auto ea = fracture_pass(a, cfg, &wa);
    const auto eb = fracture_pass(b, cfg, &wb);
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
        CHECK(ea[i].node == eb[i].node);
        CHECK(ea[i].magnitude == eb[i].magnitude);
        CHECK(norm(ea[i].plane_normal - eb[i].plane_normal) == 0.0);
    }
    CHECK(a.live_node_count() == b.live_node_count());
    CHECK(a.live_element_count() == b.live_element_count());
    a.validate_topology();
}
