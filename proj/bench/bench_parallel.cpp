// Sequential reference vs OpenMP kernels. Arg = thread count (1 = reference).

#include <benchmark/benchmark.h>

#include <numbers>

#include "tubeaxis/pipeline.hpp"
#include "tubeaxis/synth.hpp"

using namespace tubeaxis;

namespace {

struct Scene {
  SyntheticTube tube;
  OrientedFaceSet faces;  // inward
  AccumulationParams acc;
  GridDomain domain;
  Centerline centerline;
  VoxelSet voxels;
  OrientedFaceSet facets;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene s;
    TubeSpec spec;
    spec.pieces = {StraightSpec{120}, ArcSpec{30, std::numbers::pi / 2, 0}, StraightSpec{120}};
    spec.radius = 6;
    spec.meshStep = 0.5;
    s.tube = genTube(spec);
    s.faces = flipped(faceNormals(s.tube.mesh));
    s.acc.radius = 6;
    s.acc.epsilon = 0.6;
    s.acc.gridstep = 0.5;
    s.domain = accumulationDomain(s.faces, s.acc);
    for (std::size_t i = 0; i < s.tube.truth.points.size(); i += 12) {
      s.centerline.points.push_back(s.tube.truth.points[i] + Vec3(0.2, -0.1, 0.0));
      s.centerline.directions.push_back(s.tube.truth.tangents[i]);
    }
    spec.capEnds = true;
    spec.pieces = {StraightSpec{60}, ArcSpec{20, std::numbers::pi / 2, 0}};
    s.voxels = voxelize(genTube(spec).mesh, 1.0);
    s.facets = digitalSurfaceFacets(s.voxels);
    return s;
  }();
  return s;
}

void BM_Accumulation(benchmark::State& state) {
  const Scene& s = scene();
  for (auto _ : state)
    benchmark::DoNotOptimize(computeAccumulation(s.faces, s.acc, s.domain, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.faces.size()));
}

void BM_FaceNormals(benchmark::State& state) {
  const Scene& s = scene();
  for (auto _ : state) benchmark::DoNotOptimize(faceNormals(s.tube.mesh, static_cast<int>(state.range(0))));
}

void BM_DigitalNormals(benchmark::State& state) {
  const Scene& s = scene();
  for (auto _ : state)
    benchmark::DoNotOptimize(estimateDigitalNormals(s.facets, 3.0, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.facets.size()));
}

void BM_Refine(benchmark::State& state) {
  const Scene& s = scene();
  RefineParams p;
  p.radius = 6;
  p.accRadius = 6.6;
  p.trackStep = 6;
  for (auto _ : state)
    benchmark::DoNotOptimize(optimizeCenterline(s.centerline, s.faces, p, static_cast<int>(state.range(0))));
}

void BM_ErrorMap(benchmark::State& state) {
  const Scene& s = scene();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if (threads <= 1)
      benchmark::DoNotOptimize(errorMapSerial(s.faces, s.centerline, 6.0));
    else
      benchmark::DoNotOptimize(errorMap(s.faces, s.centerline, 6.0, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.faces.size()));
}

}  // namespace

BENCHMARK(BM_Accumulation)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FaceNormals)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DigitalNormals)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Refine)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ErrorMap)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
