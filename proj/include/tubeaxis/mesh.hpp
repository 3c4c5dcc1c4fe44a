#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubeaxis/core.hpp"

namespace tubeaxis {

struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  std::optional<std::vector<Vec3>> faceNormals;

  std::size_t faceCount() const { return faces.size(); }
  double faceArea(std::size_t f) const;
  /// Longest edge of face f.
  double faceSize(std::size_t f) const;
  void boundingBox(Point3& lo, Point3& hi) const;
};

/// Lattice points of a digital object; voxel (i,j,k) is the unit cube
/// centered on (i,j,k).
struct VoxelSet {
  std::vector<Index3> points;  // sorted, unique
};

/// Pixel (i,j) lies at origin + (i*spacing, j*spacing) in the view plane.
/// `viewAxis` names the world axis the heights are measured along
/// (0 = x, 1 = y, 2 = z); the view plane axes follow cyclically.
struct HeightMap {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<double> heights;  // row-major, i fastest
  double spacing = 1.0;
  double originU = 0.0;
  double originV = 0.0;
  int viewAxis = 2;

  double at(std::int64_t i, std::int64_t j) const {
    return heights[static_cast<std::size_t>(i + width * j)];
  }
  double& at(std::int64_t i, std::int64_t j) {
    return heights[static_cast<std::size_t>(i + width * j)];
  }
  /// Maps local (u, v, h) to world coordinates.
  Point3 toWorld(double u, double v, double h) const;
};

/// Median over faces of the longest edge; used as the default gridstep.
double medianFaceSize(const TriMesh& mesh);

}  // namespace tubeaxis
