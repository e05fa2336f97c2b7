// Command line driver: run a scene, inspect a mesh, or validate a scene
// without simulating.
//
// Exit codes: 0 success, 1 usage, 2 parse/validation failure, 3 divergence.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "brittle/error.hpp"
#include "brittle/mesh_io.hpp"
#include "brittle/runner.hpp"
#include "brittle/scene.hpp"
#include "brittle/sim.hpp"

namespace {

int cmd_run(const std::string& scene_path, const std::string& out_dir, double fps,
            std::int64_t max_steps) {
    const brittle::Scene scene = brittle::parse_scene(scene_path);
    brittle::RunOptions options;
    options.out_dir = out_dir;
    options.fps_override = fps;
    options.max_steps = max_steps;
    options.log = &std::cerr;
    const brittle::RunResult result = brittle::run_scene(scene, options);
    std::printf("done: %lld steps, %d frames, t=%.6g s, %zu nodes, %zu elements, %zu fragments\n",
                static_cast<long long>(result.steps), result.frames, result.final_report.time,
                result.final_report.node_count, result.final_report.element_count,
                result.final_report.fragment_count);
    return 0;
}

int cmd_inspect(const std::string& mesh_path, double rho) {
    const brittle::TetMesh mesh = brittle::parse_mesh(mesh_path);
    double volume = 0.0;
    double worst_cond = 0.0;
    double min_h = 1e300;
    std::size_t boundary_faces = 0;
    for (const brittle::Element& e : mesh.elements) {
        if (!e.alive) continue;
        volume += e.volume;
        const brittle::Vec3& a = mesh.node(e.nodes[0]).material_pos;
        const brittle::Vec3& b = mesh.node(e.nodes[1]).material_pos;
        const brittle::Vec3& c = mesh.node(e.nodes[2]).material_pos;
        const brittle::Vec3& d = mesh.node(e.nodes[3]).material_pos;
        min_h = std::min(min_h, brittle::min_height(a, b, c, d));
        brittle::Mat4 m;
        const brittle::Vec3* pts[4] = {&a, &b, &c, &d};
        for (int col = 0; col < 4; ++col) {
            m(0, col) = pts[col]->x;
            m(1, col) = pts[col]->y;
            m(2, col) = pts[col]->z;
            m(3, col) = 1.0;
        }
        brittle::Mat4 inv;
        double cond = 0.0;
        brittle::invert_mat4(m, inv, &cond);
        worst_cond = std::max(worst_cond, cond);
    }
    for (const auto& [key, slot] : mesh.face_map)
        if (slot[1] == brittle::kInvalidId) ++boundary_faces;

    std::printf("mesh: %s\n", mesh_path.c_str());
    std::printf("nodes: %zu\n", mesh.live_node_count());
    std::printf("elements: %zu\n", mesh.live_element_count());
    std::printf("surface triangles: %zu\n", boundary_faces);
    std::printf("volume: %.9g m^3\n", volume);
    std::printf("mass (rho=%.6g): %.9g kg\n", rho, volume * rho);
    std::printf("min element height: %.6g m\n", min_h);
    std::printf("worst beta condition estimate: %.6g (limit %.1g)\n", worst_cond,
                brittle::kBetaConditionLimit);
    return 0;
}

int cmd_validate(const std::string& scene_path) {
    const brittle::Scene scene = brittle::parse_scene(scene_path);
    brittle::TetMesh world = brittle::build_world(scene);
    world.validate_topology();
    for (const brittle::Node& n : world.nodes)
        if (n.alive && !brittle::is_finite(n.world_pos))
            throw brittle::ValidationError("non-finite initial world position");
    const double dt_hint = brittle::stable_dt_estimate(world);
    std::printf("scene ok: %zu bodies, %zu nodes, %zu elements\n", scene.bodies.size(),
                world.live_node_count(), world.live_element_count());
    std::printf("sim.dt = %.6g s, stability heuristic %.6g s%s\n", scene.sim.dt, dt_hint,
                scene.sim.dt > dt_hint ? "  (dt exceeds heuristic!)" : "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"brittle fracture finite element simulator"};
    app.require_subcommand(1);

    std::string scene_path, out_dir = "out", mesh_path;
    double fps = 0.0, rho = 1.0;
    std::int64_t max_steps = -1;

    auto* run = app.add_subcommand("run", "simulate a scene and export frames");
    run->add_option("--scene", scene_path, "scene file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--frames-per-second", fps, "override the scene frame rate");
    run->add_option("--max-steps", max_steps, "stop after N steps");

    auto* inspect = app.add_subcommand("inspect", "print mesh statistics");
    inspect->add_option("mesh", mesh_path, "tetmesh file")->required();
    inspect->add_option("--rho", rho, "density for the mass estimate (kg/m^3)");

    auto* validate = app.add_subcommand("validate", "dry-run scene checks");
    validate->add_option("--scene", scene_path, "scene file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(scene_path, out_dir, fps, max_steps);
        if (inspect->parsed()) return cmd_inspect(mesh_path, rho);
        if (validate->parsed()) return cmd_validate(scene_path);
    } catch (const brittle::DivergedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const brittle::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
