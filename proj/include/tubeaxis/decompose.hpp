#pragma once

#include <span>
#include <vector>

#include "tubeaxis/centerline.hpp"

namespace tubeaxis {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Polyline mapped to (cumulative length, cumulative turning angle).
/// T holds T_02, T_11, T_12, ..., T_(n-1)2, T_n1; midpoints[i] is the middle
/// of T_i2 T_(i+1)1.
struct TangentSpacePolygon {
  std::vector<Point2> T;
  std::vector<Point2> midpoints;
  std::vector<double> lengths;  // l_i = |C_i C_(i+1)|, i in [0, n)
  std::vector<double> angles;   // alpha_i for i in [0, n); alpha_0 = 0 by convention
};

TangentSpacePolygon tangentSpaceTransform(std::span<const Point3> points);

struct DetectParams {
  double alphaFlat = 0.05;
  double nu = 0.15;
  std::size_t minLen = 3;
};

/// Greedy left-to-right labelling into Straight / Arc index ranges (kinds
/// only; primitive parameters are left default).
Decomposition detectArcsAndLines(const TangentSpacePolygon& tsp, const DetectParams& params);

/// Largest orthogonal distance of the points to their total-least-squares line.
double lineDeviation(std::span<const Point2> points);

struct CircleFit {
  Point3 center;
  double radius = 0.0;
  Vec3 axis;
  double angularExtent = 0.0;
  double residual = 0.0;  // RMS 3D distance to the fitted circle
};

/// Least-squares plane, then algebraic (Kasa) circle fit in that plane.
/// Throws Collinear when the points span no plane.
CircleFit fitCircle3D(std::span<const Point3> points);

struct LineFit {
  Point3 point;
  Vec3 direction;
  double residual = 0.0;
};

/// Centroid plus principal direction, oriented from first to last point.
LineFit fitLine3D(std::span<const Point3> points);

struct DecomposeParams {
  DetectParams detect;
  double gridstep = 1.0;
  double maxArcResidual = 0.3;  // in gridsteps
};

/// Tangent-space labelling followed by per-segment primitive fits. Arcs
/// whose planar fit residual exceeds maxArcResidual * gridstep are split in
/// halves (flagged) until they fit or become too short.
Decomposition decomposeCenterline(const Centerline& cl, const DecomposeParams& params);

}  // namespace tubeaxis
