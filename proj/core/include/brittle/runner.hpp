#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "brittle/scene.hpp"

namespace brittle {

struct RunOptions {
    std::string out_dir;
    double fps_override = 0.0;      // > 0 replaces the scene's frame rate
    std::int64_t max_steps = -1;    // >= 0 caps the step count
    std::ostream* log = nullptr;    // progress + remeshing warnings
};

struct RunResult {
    std::int64_t steps = 0;
    int frames = 0;
    EnergyReport final_report;
};

// Drive a scene to completion: frames to <out>/frame_*.obj, one CSV row per
// frame.  Deterministic for a fixed scene and platform.
RunResult run_scene(const Scene& scene, const RunOptions& options);

}  // namespace brittle
