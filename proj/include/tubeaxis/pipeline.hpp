#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/decompose.hpp"
#include "tubeaxis/normals.hpp"
#include "tubeaxis/rebuild.hpp"
#include "tubeaxis/refine.hpp"
#include "tubeaxis/track.hpp"

namespace tubeaxis {

enum class NormalSource { Faces, Estimate };

struct PipelineParams {
  double radius = 0.0;                 // required
  std::optional<double> gridstep;      // default: median face size / native lattice
  double epsilonFraction = 0.1;        // accRadius = R * (1 + epsilonFraction)
  std::optional<double> epsilonAcc;    // absolute epsilon, overrides the fraction
  double minNorm = 0.1;
  NormalSource normals = NormalSource::Faces;
  std::optional<double> estimateRadius;  // digital normals; default max(2, R/2)
  Orientation orient = Orientation::Auto;
  std::optional<double> trackStep;     // default R
  double insideThreshold = 0.5;
  double maxAngle = 1.0471975511965976;  // pi/3
  double epsilonO = 0.001;
  int maxIter = 1000;
  bool areaWeighting = false;
  DetectParams detect;
  double maxArcResidual = 0.3;
  int sides = 24;
  int threads = 1;
};

/// Surface faces ready for accumulation plus what was derived on the way.
struct PreparedInput {
  OrientedFaceSet faces;  // inward
  double gridstep = 1.0;
  bool flipped = false;
  std::size_t vertexCount = 0;
  std::size_t voxelCount = 0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

using InputData = std::variant<TriMesh, VoxelSet, HeightMap>;

PreparedInput prepareInput(const InputData& input, const PipelineParams& params,
                           std::vector<StageTiming>* timings = nullptr);

AccumulationParams accumulationParams(const PipelineParams& params, double gridstep);
TrackParams trackParams(const PipelineParams& params, double gridstep);
RefineParams refineParams(const PipelineParams& params, double gridstep);
DecomposeParams decomposeParams(const PipelineParams& params, double gridstep);

struct PipelineResult {
  PreparedInput input;
  AccumulationResult accumulation;
  Centerline raw;
  Centerline refined;
  Decomposition decomposition;
  TriMesh reconstruction;
  std::vector<double> errors;
  ErrorStats errorStats;
  std::vector<StageTiming> timings;
};

/// normals -> accumulate -> track -> refine -> decompose -> rebuild -> error map.
PipelineResult runPipeline(const InputData& input, const PipelineParams& params);

}  // namespace tubeaxis
