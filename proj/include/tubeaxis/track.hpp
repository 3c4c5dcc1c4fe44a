#pragma once

#include <numbers>
#include <vector>

#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/centerline.hpp"

namespace tubeaxis {

/// Square cross-section of the accumulation image, sampled on the plane
/// spanned by frame.u / frame.v at gridstep spacing.
struct Patch {
  OrthonormalFrame frame;
  int size = 0;     // odd
  double step = 1;  // world distance between pixels
  std::vector<double> values;  // row-major, row index along u

  int half() const { return size / 2; }
  double at(int row, int col) const { return values[static_cast<std::size_t>(row * size + col)]; }
  Point3 pixelPosition(int row, int col) const {
    return frame.center + frame.u * ((row - half()) * step) + frame.v * ((col - half()) * step);
  }
  /// First (row, col) in row-major order holding the largest value.
  std::pair<int, int> argmax() const;
};

/// Patch of side ~sideWorld centered at `center`, normal to `dir`, with
/// size = 2 * ceil(sideWorld / (2 * gridstep)) + 1 pixels.
Patch extractPatch(const ScalarGrid3& acc, const Point3& center, const Vec3& dir, double sideWorld);

struct TrackParams {
  double trackStep = 1.0;
  double accRadius = 1.1;
  double insideThreshold = 0.5;  // fraction of the seed accumulation value
  double maxAngle = std::numbers::pi / 3.0;
};

/// Unit axis direction around p: the 3x3x3 neighbourhood of dirImage,
/// each vector sign-aligned with `reference` before summing. Returns a null
/// vector when the neighbourhood holds no direction.
Vec3 localDirection(const VectorGrid3& dirImage, const Point3& p, const Vec3& reference);

/// Mean of the 27 trilinear samples on the gridstep lattice around p; the
/// continuation test compares these box averages to damp per-voxel vote noise.
double neighbourhoodMean(const ScalarGrid3& acc, const Point3& p);

/// Continuation test: the box-averaged accumulation at `current` is at least
/// insideThreshold * seedValue (the same average at the seed), and the step current - previous deviates
/// from the local axis direction by at most maxAngle.
bool isInsideTube(const AccumulationResult& res, const Point3& current, const Point3& previous,
                  double seedValue, const TrackParams& params);

/// Follows accumulation maxima from `start` in one direction. The returned
/// directions point along the direction of travel. `closed` is set when the
/// run comes back to its seed. The seed direction is the neighbourhood sum
/// (see localDirection); SeedInvalid when that neighbourhood holds none.
Centerline trackDirection(const AccumulationResult& res, const Point3& start, bool inFront,
                          const TrackParams& params);

/// Tracks both ways from the accumulation maximum and joins the runs.
Centerline extractCenterline(const AccumulationResult& res, const TrackParams& params);

}  // namespace tubeaxis
