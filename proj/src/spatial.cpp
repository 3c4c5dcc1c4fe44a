#include "tubeaxis/spatial.hpp"

#include <algorithm>

namespace tubeaxis {

PointBuckets::PointBuckets(std::span<const Point3> points, double cellSize)
    : points_(points), cellSize_(cellSize) {
  if (!(cellSize > 0.0)) throw Error(ErrorCode::InvalidArgument, "bucket size must be positive");
  for (std::size_t i = 0; i < points.size(); ++i)
    cells_[key(cellOf(points[i]))].push_back(static_cast<std::uint32_t>(i));
}

Index3 PointBuckets::cellOf(const Point3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x / cellSize_)),
          static_cast<std::int64_t>(std::floor(p.y / cellSize_)),
          static_cast<std::int64_t>(std::floor(p.z / cellSize_))};
}

std::uint64_t PointBuckets::key(const Index3& c) {
  // 21 bits per axis, two's complement wrapped
  constexpr std::uint64_t mask = (1u << 21) - 1;
  return (static_cast<std::uint64_t>(c.i) & mask) | ((static_cast<std::uint64_t>(c.j) & mask) << 21) |
         ((static_cast<std::uint64_t>(c.k) & mask) << 42);
}

}  // namespace tubeaxis
