#include "tubeaxis/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "tubeaxis/ingest.hpp"

namespace tubeaxis {

namespace {

class StageClock {
 public:
  StageClock(std::vector<StageTiming>* sink, std::string stage)
      : sink_(sink), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageClock() {
    if (!sink_) return;
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    sink_->push_back({stage_, d.count()});
  }
  StageClock(const StageClock&) = delete;
  StageClock& operator=(const StageClock&) = delete;

 private:
  std::vector<StageTiming>* sink_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

double accRadiusOf(const PipelineParams& p) {
  return p.radius + (p.epsilonAcc ? *p.epsilonAcc : p.epsilonFraction * p.radius);
}

}  // namespace

AccumulationParams accumulationParams(const PipelineParams& params, double gridstep) {
  AccumulationParams a;
  a.radius = params.radius;
  a.epsilon = accRadiusOf(params) - params.radius;
  a.minNorm = params.minNorm;
  a.gridstep = gridstep;
  return a;
}

TrackParams trackParams(const PipelineParams& params, double /*gridstep*/) {
  TrackParams t;
  t.trackStep = params.trackStep.value_or(params.radius);
  t.accRadius = accRadiusOf(params);
  t.insideThreshold = params.insideThreshold;
  t.maxAngle = params.maxAngle;
  return t;
}

RefineParams refineParams(const PipelineParams& params, double /*gridstep*/) {
  RefineParams r;
  r.radius = params.radius;
  r.accRadius = accRadiusOf(params);
  r.trackStep = params.trackStep.value_or(params.radius);
  r.epsilonO = params.epsilonO;
  r.maxIter = params.maxIter;
  r.areaWeighting = params.areaWeighting;
  return r;
}

DecomposeParams decomposeParams(const PipelineParams& params, double gridstep) {
  DecomposeParams d;
  d.detect = params.detect;
  d.gridstep = gridstep;
  d.maxArcResidual = params.maxArcResidual;
  return d;
}

PreparedInput prepareInput(const InputData& input, const PipelineParams& params,
                           std::vector<StageTiming>* timings) {
  if (!(params.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (params.gridstep && !(*params.gridstep > 0.0))
    throw Error(ErrorCode::InvalidArgument, "gridstep must be positive");
  PreparedInput out;
  {
    StageClock clock(timings, "normals");
    if (const auto* voxels = std::get_if<VoxelSet>(&input)) {
      out.voxelCount = voxels->points.size();
      out.gridstep = params.gridstep.value_or(1.0);
      if (params.normals == NormalSource::Estimate) {
        const double r = params.estimateRadius.value_or(std::max(2.0, params.radius / 2.0));
        out.faces = digitalSurfaceFaces(*voxels, r, params.threads);
      } else {
        out.faces = flipped(digitalSurfaceFacets(*voxels));
      }
    } else {
      TriMesh mesh;
      if (const auto* hm = std::get_if<HeightMap>(&input)) {
        mesh = heightMapToMesh(*hm);
        out.gridstep = params.gridstep.value_or(hm->spacing);
      } else {
        mesh = std::get<TriMesh>(input);
        if (mesh.faces.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no faces");
        out.gridstep = params.gridstep ? *params.gridstep : medianFaceSize(mesh);
      }
      out.vertexCount = mesh.vertices.size();
      out.faces = faceNormals(mesh, params.threads);
    }
  }
  if (out.faces.empty()) throw Error(ErrorCode::EmptyInput, "no surface faces");
  StageClock clock(timings, "orient");
  out.faces = orientInward(out.faces, params.orient, accRadiusOf(params), out.gridstep, &out.flipped);
  return out;
}

PipelineResult runPipeline(const InputData& input, const PipelineParams& params) {
  PipelineResult r;
  r.input = prepareInput(input, params, &r.timings);
  const double gs = r.input.gridstep;
  const OrientedFaceSet& faces = r.input.faces;
  {
    StageClock clock(&r.timings, "accumulate");
    const AccumulationParams ap = accumulationParams(params, gs);
    r.accumulation = computeAccumulation(faces, ap, accumulationDomain(faces, ap), params.threads);
  }
  {
    StageClock clock(&r.timings, "track");
    r.raw = extractCenterline(r.accumulation, trackParams(params, gs));
  }
  {
    StageClock clock(&r.timings, "refine");
    r.refined = optimizeCenterline(r.raw, faces, refineParams(params, gs), params.threads);
  }
  {
    StageClock clock(&r.timings, "decompose");
    r.decomposition = decomposeCenterline(r.refined, decomposeParams(params, gs));
  }
  {
    StageClock clock(&r.timings, "reconstruct");
    if (r.refined.size() >= 2) r.reconstruction = sweepTube(r.refined, params.radius, params.sides);
  }
  {
    StageClock clock(&r.timings, "error-map");
    r.errors = errorMap(faces, r.refined, params.radius, params.threads);
    r.errorStats = errorStats(r.errors);
  }
  return r;
}

}  // namespace tubeaxis
