#include "brittle/runner.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include "brittle/frame_export.hpp"

namespace brittle {

RunResult run_scene(const Scene& scene, const RunOptions& options) {
    TetMesh world = build_world(scene);
    Simulation sim(std::move(world), scene.sim, options.log);

    std::filesystem::create_directories(options.out_dir);
    const double fps =
        options.fps_override > 0.0 ? options.fps_override : scene.io.frames_per_second;
    const std::int64_t steps_per_frame =
        std::max<std::int64_t>(1, std::llround(1.0 / (fps * scene.sim.dt)));
    std::int64_t total_steps = std::llround(scene.sim.duration / scene.sim.dt);
    if (options.max_steps >= 0) total_steps = std::min(total_steps, options.max_steps);

    ExportSettings exporter{options.out_dir, scene.io.dump_state};
    CsvLog csv((std::filesystem::path(options.out_dir) / scene.io.csv_name).string());

    RunResult result;
    EnergyReport report = sim.energy_report();
    export_frame(sim.mesh(), exporter, result.frames, report.time);
    csv.row(report);
    ++result.frames;

    while (result.steps < total_steps) {
        report = sim.step();
        ++result.steps;
        if (result.steps % steps_per_frame == 0 || result.steps == total_steps) {
            export_frame(sim.mesh(), exporter, result.frames, report.time);
            csv.row(report);
            ++result.frames;
            if (options.log)
                *options.log << "frame " << result.frames - 1 << " t=" << report.time
                             << " nodes=" << report.node_count
                             << " elems=" << report.element_count
                             << " fragments=" << report.fragment_count << '\n';
        }
    }
    result.final_report = report;
    csv.close();
    return result;
}

}  // namespace brittle
