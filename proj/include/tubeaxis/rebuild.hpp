#pragma once

#include <span>
#include <vector>

#include "tubeaxis/centerline.hpp"
#include "tubeaxis/mesh.hpp"
#include "tubeaxis/normals.hpp"

namespace tubeaxis {

/// Unit tangents of a polyline: central differences inside, and at each end
/// the neighbour tangent reflected about the end chord (exact on circles).
std::vector<Vec3> polylineTangents(std::span<const Point3> points);

/// Rings of `sides` vertices at distance R, carried along the centerline by
/// projection-based rotation-minimizing frames, stitched with 2*sides
/// triangles per ring pair. No end caps.
TriMesh sweepTube(const Centerline& cl, double radius, int sides = 24);

/// Exact distance from p to the polyline (closed polylines include the
/// last-to-first segment).
double distanceToPolyline(const Point3& p, std::span<const Point3> polyline, bool closed = false);

struct ErrorStats {
  double mean = 0.0;
  double max = 0.0;
  double rms = 0.0;  // sqrt(mean(error^2)) over the per-face values
  std::size_t count = 0;
};

/// Per-face (dist(center, centerline) - R)^2, face order preserved.
std::vector<double> errorMapSerial(const OrientedFaceSet& faces, const Centerline& cl, double radius);
std::vector<double> errorMap(const OrientedFaceSet& faces, const Centerline& cl, double radius,
                             int threads = 1);

/// Summary over the selected faces (all when mask is empty). Indexed
/// summation order, so the result does not depend on the thread count.
ErrorStats errorStats(std::span<const double> errors, std::span<const std::uint8_t> mask = {});

}  // namespace tubeaxis
