#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "brittle/error.hpp"
#include "brittle/frame_export.hpp"
#include "brittle/fracture.hpp"
#include "brittle/mesh_io.hpp"
#include "brittle/runner.hpp"
#include "brittle/scene.hpp"
#include "support/testutil.hpp"

using namespace brittle;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kUnitTetFile =
    "tetmesh v1\n"
    "nodes 4\n"
    "0 0 0\n"
    "1 0 0\n"
    "0 1 0\n"
    "0 0 1\n"
    "elems 1\n"
    "0 1 2 3\n";

}  // namespace

TEST_CASE("parse_mesh: unit tet") {
    TempDir dir("brittle_io_unit");
    write_text(dir.file("m.tet"), kUnitTetFile);
    const TetMesh mesh = parse_mesh(dir.file("m.tet"));
    CHECK(mesh.live_node_count() == 4);
    CHECK(mesh.live_element_count() == 1);
    CHECK(mesh.element(0).volume == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    // World positions start at the material positions.
    CHECK(norm(mesh.node(3).world_pos - mesh.node(3).material_pos) == 0.0);
}

TEST_CASE("parse_mesh: malformed lines carry line numbers") {
    TempDir dir("brittle_io_bad");
    write_text(dir.file("m.tet"),
               "tetmesh v1\nnodes 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nelems 1\n0 1 2 3 4\n");
    try {
        parse_mesh(dir.file("m.tet"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 8);
    }

    write_text(dir.file("h.tet"), "something else\n");
    CHECK_THROWS_AS(parse_mesh(dir.file("h.tet")), ParseError);

    write_text(dir.file("n.tet"), "tetmesh v1\nnodes 2\n0 0 zero\n1 1 1\nelems 0\n");
    CHECK_THROWS_AS(parse_mesh(dir.file("n.tet")), ParseError);
}

TEST_CASE("parse_mesh: orientation and duplicates are validation errors") {
    TempDir dir("brittle_io_orient");
    write_text(dir.file("neg.tet"),
               "tetmesh v1\nnodes 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nelems 1\n0 2 1 3\n");
    try {
        parse_mesh(dir.file("neg.tet"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("element 0") != std::string::npos);
        CHECK(std::string(e.what()).find("orientation") != std::string::npos);
    }

    write_text(dir.file("dup.tet"),
               "tetmesh v1\nnodes 5\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\nelems 2\n"
               "0 1 2 3\n1 0 2 3\n");
    CHECK_THROWS_AS(parse_mesh(dir.file("dup.tet")), ValidationError);
}

TEST_CASE("mesh write/read round trip is identity") {
    TempDir dir("brittle_io_rt");
    TetMesh mesh = testutil::box_mesh(2, 2, 1, 0.25, testutil::default_material());
    write_mesh(dir.file("rt.tet"), mesh);
    const TetMesh back = parse_mesh(dir.file("rt.tet"));
    REQUIRE(back.live_node_count() == mesh.live_node_count());
    REQUIRE(back.live_element_count() == mesh.live_element_count());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        CHECK(norm(back.nodes[i].material_pos - mesh.nodes[i].material_pos) == 0.0);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e)
        CHECK(back.elements[e].nodes == mesh.elements[e].nodes);

    // Write the re-read mesh again: byte-identical files.
    write_mesh(dir.file("rt2.tet"), back);
    CHECK(read_text(dir.file("rt.tet")) == read_text(dir.file("rt2.tet")));
}

TEST_CASE("state dump round trip preserves world state") {
    TempDir dir("brittle_io_state");
    TetMesh mesh = testutil::box_mesh(1, 1, 2, 0.5, testutil::default_material());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        mesh.nodes[i].world_pos += Vec3{0.01 * static_cast<double>(i), 0, 0};
        mesh.nodes[i].velocity = {0, 0.5, static_cast<double>(i)};
        mesh.nodes[i].body = 0;
    }
    mesh.nodes[0].fixed = true;
    write_state(dir.file("s.txt"), mesh, 0.75);

    double time = 0.0;
    const TetMesh back = parse_state(dir.file("s.txt"), &time);
    CHECK(time == 0.75);
    REQUIRE(back.live_node_count() == mesh.live_node_count());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        CHECK(norm(back.nodes[i].world_pos - mesh.nodes[i].world_pos) == 0.0);
        CHECK(norm(back.nodes[i].velocity - mesh.nodes[i].velocity) == 0.0);
        CHECK(back.nodes[i].fixed == mesh.nodes[i].fixed);
    }
}

namespace {

std::string scene_text(const std::string& mesh_name, const std::string& extra) {
    std::ostringstream ss;
    ss << "material.lambda = 1.04e8\n"
       << "material.mu = 1.04e8\n"
       << "material.phi = 0\n"
       << "material.psi = 6760\n"
       << "material.rho = 2588\n"
       << "material.tau = 10140\n"
       << "sim.dt = 1e-5\n"
       << "sim.duration = 0.001\n"
       << "body0.mesh = " << mesh_name << "\n"
       << extra;
    return ss.str();
}

}  // namespace

TEST_CASE("parse_scene accepts the glass and bowl parameter rows") {
    TempDir dir("brittle_io_scene");
    write_text(dir.file("m.tet"), kUnitTetFile);
    write_text(dir.file("glass.scene"), scene_text("m.tet", ""));
    const Scene glass = parse_scene(dir.file("glass.scene"));
    CHECK(glass.bodies.size() == 1);
    CHECK(glass.bodies[0].material.lambda == 1.04e8);
    CHECK(glass.bodies[0].material.tau == 10140.0);
    CHECK(glass.sim.integrator == Integrator::taylor2);

    write_text(dir.file("bowl.scene"),
               "material.lambda = 2.65e6\nmaterial.mu = 3.97e6\nmaterial.phi = 264\n"
               "material.psi = 397\nmaterial.rho = 1013\nmaterial.tau = 52.9\n"
               "sim.dt = 1e-5\nsim.duration = 0.001\nsim.integrator = euler\n"
               "body0.mesh = m.tet\n");
    const Scene bowl = parse_scene(dir.file("bowl.scene"));
    CHECK(bowl.bodies[0].material.rho == 1013.0);
    CHECK(bowl.sim.integrator == Integrator::euler);
}

TEST_CASE("parse_scene rejects bad values and unknown keys") {
    TempDir dir("brittle_io_reject");
    write_text(dir.file("m.tet"), kUnitTetFile);

    write_text(dir.file("negrho.scene"),
               "material.lambda = 0\nmaterial.mu = 1\nmaterial.phi = 0\n"
               "material.psi = 0\nmaterial.rho = -1\nmaterial.tau = 1\n"
               "sim.dt = 1e-4\nsim.duration = 0\nbody0.mesh = m.tet\n");
    CHECK_THROWS_AS(parse_scene(dir.file("negrho.scene")), ValidationError);

    write_text(dir.file("unknown.scene"), scene_text("m.tet", "sim.dtt = 1\n"));
    CHECK_THROWS_AS(parse_scene(dir.file("unknown.scene")), ParseError);

    write_text(dir.file("missing.scene"),
               "material.lambda = 1\nmaterial.mu = 1\nmaterial.phi = 0\n"
               "material.psi = 0\nmaterial.rho = 1\nmaterial.tau = 1\n"
               "sim.duration = 0\nbody0.mesh = m.tet\n");  // no sim.dt
    CHECK_THROWS_AS(parse_scene(dir.file("missing.scene")), ParseError);

    write_text(dir.file("nomesh.scene"), scene_text("absent.tet", ""));
    CHECK_THROWS_AS(parse_scene(dir.file("nomesh.scene")), ParseError);
}

TEST_CASE("build_world applies transforms, velocities and constraints") {
    TempDir dir("brittle_io_world");
    write_text(dir.file("m.tet"), kUnitTetFile);
    write_text(dir.file("two.scene"),
               scene_text("m.tet",
                          "body0.translate = 0 0 2\n"
                          "body0.velocity = 0 0 -4\n"
                          "body1.mesh = m.tet\n"
                          "body1.rotate = 0 0 1 1.5707963267948966\n"
                          "body1.fixed = z < 0.25\n"
                          "body1.tau = 99\n"));
    const Scene scene = parse_scene(dir.file("two.scene"));
    REQUIRE(scene.bodies.size() == 2);
    CHECK(scene.bodies[1].material.tau == 99.0);
    CHECK(scene.bodies[1].material.lambda == 1.04e8);  // inherited

    TetMesh world = build_world(scene);
    CHECK(world.live_node_count() == 8);
    CHECK(world.live_element_count() == 2);
    CHECK(world.materials.size() == 2);
    // Body 0 shifted up with initial velocity.
    CHECK(world.node(0).world_pos.z == doctest::Approx(2.0));
    CHECK(world.node(0).velocity.z == doctest::Approx(-4.0));
    CHECK(world.node(0).body == 0);
    // Body 1 rotated 90 degrees about z: (1,0,0) -> (0,1,0).
    CHECK(world.node(5).world_pos.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(world.node(5).world_pos.y == doctest::Approx(1.0).epsilon(1e-12));
    // Fixed selector on initial world positions: all body-1 nodes with z<0.25.
    int fixed_count = 0;
    for (const Node& n : world.nodes)
        if (n.alive && n.body == 1 && n.fixed) ++fixed_count;
    CHECK(fixed_count == 3);
    // Masses assembled.
    for (const Node& n : world.nodes)
        if (n.alive) CHECK(n.mass > 0.0);
}

TEST_CASE("scene write/read round trip is identity") {
    TempDir dir("brittle_io_scene_rt");
    write_text(dir.file("m.tet"), kUnitTetFile);
    write_text(dir.file("s.scene"),
               scene_text("m.tet",
                          "sim.gravity = 0 0 -9.81\n"
                          "fracture.snap_angle = 0.2\n"
                          "collision.method = overlap_volume\n"
                          "body0.velocity = 1 2 3\n"
                          "body0.fixed = z < 0.1\n"
                          "body1.mesh = m.tet\n"
                          "body1.tau = 77\n"
                          "body1.fixed = box 0 0 0 1 1 1\n"));
    const Scene a = parse_scene(dir.file("s.scene"));
    write_scene(dir.file("rt.scene"), a);
    const Scene b = parse_scene(dir.file("rt.scene"));

    CHECK(a.sim.dt == b.sim.dt);
    CHECK(a.sim.duration == b.sim.duration);
    CHECK(a.sim.integrator == b.sim.integrator);
    CHECK(norm(a.sim.gravity - b.sim.gravity) == 0.0);
    CHECK(a.sim.fracture.snap.angle == b.sim.fracture.snap.angle);
    CHECK(a.sim.fracture.snap.distance == b.sim.fracture.snap.distance);
    CHECK(a.sim.collision.method == b.sim.collision.method);
    CHECK(a.io.frames_per_second == b.io.frames_per_second);
    REQUIRE(a.bodies.size() == b.bodies.size());
    for (std::size_t i = 0; i < a.bodies.size(); ++i) {
        CHECK(a.bodies[i].material.tau == b.bodies[i].material.tau);
        CHECK(a.bodies[i].material.lambda == b.bodies[i].material.lambda);
        CHECK(norm(a.bodies[i].velocity - b.bodies[i].velocity) == 0.0);
        CHECK(a.bodies[i].fixed.kind == b.bodies[i].fixed.kind);
        CHECK(a.bodies[i].fixed.value == b.bodies[i].fixed.value);
    }
    // A second serialization is byte-identical.
    write_scene(dir.file("rt2.scene"), b);
    CHECK(read_text(dir.file("rt.scene")) == read_text(dir.file("rt2.scene")));
}

TEST_CASE("surface extraction counts") {
    TetMesh one = testutil::unit_tet(testutil::default_material());
    CHECK(surface_triangles(one, one.fragments()).size() == 4);

    // Two tets sharing a face expose six triangles.
    TetMesh mesh;
    mesh.materials.push_back(testutil::default_material());
    const Vec3 pts[5] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    for (const Vec3& p : pts) {
        Node n;
        n.material_pos = p;
        n.world_pos = p;
        mesh.add_node(n);
    }
    mesh.add_element({0, 1, 2, 3}, 0);
    if (element_volume(pts[1], pts[2], pts[3], pts[4]) > 0) mesh.add_element({1, 2, 3, 4}, 0);
    else mesh.add_element({1, 3, 2, 4}, 0);
    mesh.assemble_masses();
    CHECK(surface_triangles(mesh, mesh.fragments()).size() == 6);
}

TEST_CASE("fracture opens new surface faces") {
    TetMesh mesh = testutil::single_tet({Vec3{0, 0, 0}, Vec3{1, 0.5, 0.5}, Vec3{0.5, 1, 0},
                                         Vec3{0.5, 0, 1}},
                                        testutil::default_material());
    const std::size_t before = surface_triangles(mesh, mesh.fragments()).size();
    CHECK(before == 4);

    FractureEvent ev;
    ev.node = 0;
    ev.plane_normal = normalized(Vec3{1, -0.7, -0.7});
    ev.magnitude = 1.0;
    auto plan = split_node(mesh, ev, SnapThresholds{});
    REQUIRE(plan.has_value());
    // Every face of the three children is now a boundary face: the crack
    // faces appear in the surface set.
    const auto after = surface_triangles(mesh, mesh.fragments());
    CHECK(after.size() > before);
    std::size_t interior = 0;
    for (const auto& [key, slot] : mesh.face_map)
        if (slot[1] != kInvalidId) ++interior;
    CHECK(after.size() == mesh.face_map.size() - interior);
}

TEST_CASE("surface is watertight per fragment") {
    TetMesh mesh = testutil::box_mesh(2, 2, 2, 0.25, testutil::default_material());
    const auto tris = surface_triangles(mesh, mesh.fragments());
    // Every surface edge must be shared by exactly two surface triangles.
    std::map<std::pair<NodeId, NodeId>, int> edge_count;
    for (const auto& t : tris)
        for (int i = 0; i < 3; ++i) {
            NodeId a = t.nodes[i], b = t.nodes[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    for (const auto& [edge, count] : edge_count) CHECK(count == 2);
}

TEST_CASE("export_frame writes obj frames and state dumps") {
    TempDir dir("brittle_io_export");
    TetMesh mesh = testutil::unit_tet(testutil::default_material());
    ExportSettings settings{dir.file("frames"), true};
    const std::string path = export_frame(mesh, settings, 7, 0.125);
    CHECK(fs::exists(path));
    CHECK(path.find("frame_000007.obj") != std::string::npos);
    CHECK(fs::exists(dir.file("frames") + "/state_000007.txt"));

    const std::string obj = read_text(path);
    // 4 surface triangles over 4 vertices, one object group.
    CHECK(std::count(obj.begin(), obj.end(), '\n') >= 9);
    std::size_t vcount = 0, fcount = 0, ocount = 0;
    std::istringstream ss(obj);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("v ", 0) == 0) ++vcount;
        if (line.rfind("f ", 0) == 0) ++fcount;
        if (line.rfind("o ", 0) == 0) ++ocount;
    }
    CHECK(vcount == 4);
    CHECK(fcount == 4);
    CHECK(ocount == 1);
}

TEST_CASE("csv log: one row per frame") {
    TempDir dir("brittle_io_csv");
    {
        CsvLog log(dir.file("energy.csv"));
        EnergyReport r;
        for (int i = 0; i < 10; ++i) {
            r.time = i * 0.1;
            r.kinetic = i;
            r.elastic = 2.0 * i;
            r.node_count = 4;
            r.element_count = 1;
            r.fragment_count = 1;
            log.row(r);
        }
    }
    const std::string text = read_text(dir.file("energy.csv"));
    std::istringstream ss(text);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "time,kinetic,elastic,nodes,elements,fragments");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);
}

TEST_CASE("run_scene produces frames, csv and a deterministic byte stream") {
    TempDir dir("brittle_io_run");
    write_text(dir.file("m.tet"), kUnitTetFile);
    write_text(dir.file("drop.scene"),
               "material.lambda = 1e5\nmaterial.mu = 1e5\nmaterial.phi = 10\n"
               "material.psi = 10\nmaterial.rho = 1000\nmaterial.tau = 1e4\n"
               "sim.dt = 1e-4\nsim.duration = 0.01\nsim.gravity = 0 0 -9.81\n"
               "io.frames_per_second = 1000\n"
               "collision.ground_enabled = true\ncollision.ground_height = -0.5\n"
               "body0.mesh = m.tet\n");
    const Scene scene = parse_scene(dir.file("drop.scene"));

    RunOptions opts;
    opts.out_dir = dir.file("out_a");
    const RunResult a = run_scene(scene, opts);
    CHECK(a.steps == 100);
    CHECK(a.frames == 11);  // frame 0 plus one every 10 steps
    CHECK(fs::exists(dir.file("out_a") + "/frame_000010.obj"));
    CHECK(fs::exists(dir.file("out_a") + "/energy.csv"));

    opts.out_dir = dir.file("out_b");
    run_scene(scene, opts);
    CHECK(read_text(dir.file("out_a") + "/energy.csv") ==
          read_text(dir.file("out_b") + "/energy.csv"));
    CHECK(read_text(dir.file("out_a") + "/frame_000010.obj") ==
          read_text(dir.file("out_b") + "/frame_000010.obj"));
}
