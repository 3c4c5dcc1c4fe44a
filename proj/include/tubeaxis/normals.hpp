#pragma once

#include <vector>

#include "tubeaxis/core.hpp"
#include "tubeaxis/mesh.hpp"

namespace tubeaxis {

struct OrientedFaceSet {
  std::vector<Point3> centers;
  std::vector<Vec3> normals;  // unit
  std::vector<double> areas;

  std::size_t size() const { return centers.size(); }
  bool empty() const { return centers.empty(); }
};

/// Per-face cross-product normals, centroids and areas, in face order.
OrientedFaceSet faceNormals(const TriMesh& mesh, int threads = 1);

/// Boundary facets of a digital object (one per voxel face adjacent to an
/// empty voxel) with their outward axis-aligned normals. Facet area is 1.
OrientedFaceSet digitalSurfaceFacets(const VoxelSet& voxels);

/// Plane-fit normals: for each facet, the smallest-eigenvalue eigenvector of
/// the covariance of same-side facet centers within `radius`, oriented along
/// the provisional outward normal and then negated so the result points
/// inward. Facets whose neighbourhood is too small or isotropic keep the
/// provisional axis direction (still returned inward).
OrientedFaceSet estimateDigitalNormals(const OrientedFaceSet& facets, double radius,
                                       int threads = 1);

/// Facets plus estimated inward normals.
OrientedFaceSet digitalSurfaceFaces(const VoxelSet& voxels, double radius, int threads = 1);

enum class Orientation { Auto, Keep, Flip };

OrientedFaceSet flipped(OrientedFaceSet faces);

/// Auto mode runs a serial accumulation at twice the gridstep with both
/// orientations and keeps the one whose maximum is larger (ties keep input).
OrientedFaceSet orientInward(const OrientedFaceSet& faces, Orientation mode, double accRadius,
                             double gridstep, bool* wasFlipped = nullptr);

}  // namespace tubeaxis
