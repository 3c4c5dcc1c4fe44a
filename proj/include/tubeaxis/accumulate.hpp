#pragma once

#include <cstdint>

#include "tubeaxis/core.hpp"
#include "tubeaxis/normals.hpp"

namespace tubeaxis {

struct AccumulationParams {
  double radius = 1.0;    // expected tube radius R (world units)
  double epsilon = 0.1;   // scan overshoot; accRadius = R + epsilon
  double minNorm = 0.1;   // cross products at or below this norm are ignored
  double gridstep = 1.0;

  double accRadius() const { return radius + epsilon; }
  void validate() const;
};

struct AccumulationResult {
  ScalarGrid3 accImage;
  VectorGrid3 dirImage;
  std::uint32_t maxAcc = 0;
  Index3 maxPt{};
  std::uint64_t totalVisits = 0;
};

/// Lattice-aligned domain (voxel centers on multiples of gridstep) enclosing
/// every face center with an accRadius + 1 voxel margin.
GridDomain accumulationDomain(const OrientedFaceSet& faces, const AccumulationParams& params);

/// Sequential reference: one directional scan per face, in input order.
AccumulationResult computeAccumulationSerial(const OrientedFaceSet& faces,
                                             const AccumulationParams& params,
                                             const GridDomain& domain);

/// OpenMP version. Scans are traced in parallel, then every worker replays
/// the full visit sequence restricted to the voxels it owns, so counts,
/// directions and maxPt match the sequential reference bit for bit.
/// threads <= 1 runs the reference.
AccumulationResult computeAccumulation(const OrientedFaceSet& faces,
                                       const AccumulationParams& params,
                                       const GridDomain& domain, int threads = 1);

}  // namespace tubeaxis
