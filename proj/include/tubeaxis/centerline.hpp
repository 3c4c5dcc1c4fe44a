#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tubeaxis/core.hpp"

namespace tubeaxis {

/// Ordered centerline samples with per-point unit tangents.
struct Centerline {
  std::vector<Point3> points;
  std::vector<Vec3> directions;
  Index3 sourceMaxPt{};
  bool closed = false;
  /// Set by refinement: 1 when the point was optimized, 0 when it was
  /// passed through (too few associated surface points).
  std::vector<std::uint8_t> refined;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct StraightPart {
  Point3 point;
  Vec3 direction;
};

struct ArcPart {
  Point3 center;
  double radius = 0.0;
  Vec3 axis;
  double angularExtent = 0.0;
};

struct Segment {
  std::size_t first = 0;  // inclusive centerline index
  std::size_t last = 0;   // inclusive centerline index
  std::variant<StraightPart, ArcPart> kind;
  double residual = 0.0;  // RMS distance of the points to the fitted primitive
  /// Raised when the constant-curvature run failed the planar circle fit
  /// and had to be split.
  bool flagged = false;

  bool isArc() const { return std::holds_alternative<ArcPart>(kind); }
  const char* tag() const { return isArc() ? "ARC" : "STRAIGHT"; }
};

struct Decomposition {
  std::vector<Segment> segments;
};

}  // namespace tubeaxis
