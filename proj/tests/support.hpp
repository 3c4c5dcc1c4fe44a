#pragma once

// Shared fixtures and independent reference computations for the unit tests.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/mesh.hpp"
#include "tubeaxis/normals.hpp"

namespace testsupport {

using namespace tubeaxis;

inline constexpr double kPi = 3.14159265358979323846;

/// Voxel set of a z-aligned solid cylinder, axis through the lattice origin.
inline VoxelSet digitalCylinder(double radius, int length) {
  VoxelSet v;
  const int r = static_cast<int>(std::ceil(radius));
  for (int k = 0; k < length; ++k)
    for (int j = -r; j <= r; ++j)
      for (int i = -r; i <= r; ++i)
        if (i * i + j * j <= radius * radius) v.points.push_back({i, j, k});
  std::sort(v.points.begin(), v.points.end());
  return v;
}

inline VoxelSet digitalBall(double radius) {
  VoxelSet v;
  const int r = static_cast<int>(std::ceil(radius));
  for (int k = -r; k <= r; ++k)
    for (int j = -r; j <= r; ++j)
      for (int i = -r; i <= r; ++i)
        if (i * i + j * j + k * k <= radius * radius) v.points.push_back({i, j, k});
  std::sort(v.points.begin(), v.points.end());
  return v;
}

/// Straightforward re-simulation of the directional scans, keyed by
/// lattice triples in a std::map rather than a dense grid.
struct ScanOracle {
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::uint32_t> counts;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Vec3> dirs;
  std::uint32_t maxAcc = 0;
  std::tuple<std::int64_t, std::int64_t, std::int64_t> maxPt{};
  std::uint64_t visits = 0;
};

inline ScanOracle simulateScans(const OrientedFaceSet& faces, double accRadius, double minNorm,
                                const GridDomain& d) {
  ScanOracle o;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Vec3> last;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Point3 c = faces.centers[f];
    const Vec3 n = faces.normals[f];
    // currentPt advances by gridstep * normal, exactly as the scan is defined
    for (Point3 p = c; distance(p, c) < accRadius; p += n * d.gridstep) {
      const auto key = std::make_tuple(
          static_cast<std::int64_t>(std::floor((p.x - d.origin.x) / d.gridstep)),
          static_cast<std::int64_t>(std::floor((p.y - d.origin.y) / d.gridstep)),
          static_cast<std::int64_t>(std::floor((p.z - d.origin.z) / d.gridstep)));
      const auto [i, j, k] = key;
      if (i < 0 || j < 0 || k < 0 || i >= d.dims[0] || j >= d.dims[1] || k >= d.dims[2]) break;
      std::uint32_t& cnt = o.counts[key];
      if (cnt != 0) {
        const Vec3 axis = cross(last[key], n);
        if (norm(axis) > minNorm) {
          Vec3& dir = o.dirs[key];
          dir += dot(axis, dir) >= 0.0 ? axis : -axis;
        }
      }
      last[key] = n;
      ++cnt;
      ++o.visits;
      if (cnt > o.maxAcc) {
        o.maxAcc = cnt;
        o.maxPt = key;
      }
    }
  }
  return o;
}

inline double rmsDistanceToZAxis(const std::vector<Point3>& pts) {
  double s = 0.0;
  for (const Point3& p : pts) s += p.x * p.x + p.y * p.y;
  return std::sqrt(s / static_cast<double>(pts.size()));
}

/// Rotation about a unit axis (Rodrigues).
inline Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  return v * std::cos(angle) + cross(axis, v) * std::sin(angle) +
         axis * (dot(axis, v) * (1.0 - std::cos(angle)));
}

}  // namespace testsupport
