// Microbenchmarks for the hot paths: the symmetric eigensolver, per-element
// force evaluation, whole-mesh assembly, broadphase upkeep and full steps.

#include <benchmark/benchmark.h>

#include <random>

#include "brittle/collision.hpp"
#include "brittle/femforce.hpp"
#include "brittle/fracture.hpp"
#include "brittle/sim.hpp"
#include "brittle/tensor3.hpp"

namespace {

using namespace brittle;

Material benchmark_material() {
    Material m;
    m.lambda = 2.65e6;
    m.mu = 3.97e6;
    m.phi = 264;
    m.psi = 397;
    m.rho = 1013;
    m.tau = 52.9;
    return m;
}

TetMesh make_box(int nx, int ny, int nz, double spacing) {
    TetMesh mesh;
    mesh.materials.push_back(benchmark_material());
    auto node_id = [&](int i, int j, int k) {
        return static_cast<NodeId>((i * (ny + 1) + j) * (nz + 1) + k);
    };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= nz; ++k) {
                Node n;
                n.material_pos = {i * spacing, j * spacing, k * spacing};
                n.world_pos = n.material_pos;
                mesh.add_node(n);
            }
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                for (const auto& p : perms) {
                    int c[3] = {i, j, k};
                    std::array<NodeId, 4> tet;
                    tet[0] = node_id(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[p[s]];
                        tet[s + 1] = node_id(c[0], c[1], c[2]);
                    }
                    const double vol = element_volume(mesh.node(tet[0]).material_pos,
                                                      mesh.node(tet[1]).material_pos,
                                                      mesh.node(tet[2]).material_pos,
                                                      mesh.node(tet[3]).material_pos);
                    if (vol < 0.0) std::swap(tet[2], tet[3]);
                    mesh.add_element(tet, 0);
                }
    mesh.assemble_masses();
    return mesh;
}

void jitter(TetMesh& mesh, double amount, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amount, amount);
    for (Node& n : mesh.nodes) {
        n.world_pos += Vec3{d(rng), d(rng), d(rng)};
        n.velocity = {d(rng), d(rng), d(rng)};
    }
}

void BM_SymEigen(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<SymTensor3> tensors(1024);
    for (SymTensor3& t : tensors)
        t = {d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sym_eigen(tensors[i++ & 1023]));
    }
}
BENCHMARK(BM_SymEigen);

void BM_SplitTensor(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<SymTensor3> tensors(1024);
    for (SymTensor3& t : tensors)
        t = {d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(split_tensor(tensors[i++ & 1023]));
    }
}
BENCHMARK(BM_SplitTensor);

void BM_ElementForces(benchmark::State& state) {
    TetMesh mesh = make_box(4, 4, 4, 0.05);
    jitter(mesh, 0.002, 3);
    std::size_t i = 0;
    const std::size_t count = mesh.elements.size();
    for (auto _ : state) {
        benchmark::DoNotOptimize(element_forces(mesh.element(i++ % count), mesh));
    }
}
BENCHMARK(BM_ElementForces);

void BM_Assemble(benchmark::State& state) {
    TetMesh mesh = make_box(static_cast<int>(state.range(0)), 4, 4, 0.05);
    jitter(mesh, 0.002, 4);
    for (auto _ : state) {
        clear_step_state(mesh);
        assemble(mesh, {{0, 0, -9.81}, SplitSource::total_stress});
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(mesh.live_element_count()));
}
BENCHMARK(BM_Assemble)->Arg(4)->Arg(16);

void BM_BvhRefitAndPairs(benchmark::State& state) {
    TetMesh mesh = make_box(static_cast<int>(state.range(0)), 4, 4, 0.05);
    jitter(mesh, 0.002, 5);
    const Fragments frags = mesh.fragments();
    Bvh bvh;
    bvh.build(mesh);
    for (auto _ : state) {
        bvh.refit(mesh);
        benchmark::DoNotOptimize(bvh.collect_pairs(mesh, frags));
    }
}
BENCHMARK(BM_BvhRefitAndPairs)->Arg(4)->Arg(16);

void BM_SimulationStep(benchmark::State& state) {
    TetMesh mesh = make_box(8, 4, 4, 0.05);
    jitter(mesh, 0.001, 6);
    SimConfig cfg;
    cfg.dt = stable_dt_estimate(mesh) / 256.0;
    cfg.duration = 1e9;
    cfg.gravity = {0, 0, -9.81};
    cfg.fracture.enabled = true;
    cfg.fracture.max_splits_per_step = 0;  // pass runs, nothing splits
    cfg.collision.enabled = true;
    cfg.collision.ground_enabled = true;
    cfg.collision.ground.point = {0, 0, -10};
    Simulation sim(std::move(mesh), cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim.step());
    }
}
BENCHMARK(BM_SimulationStep);

}  // namespace

BENCHMARK_MAIN();
