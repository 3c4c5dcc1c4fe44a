#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "tubeaxis/core.hpp"

namespace tubeaxis {

/// Uniform bucket grid over a fixed point set for radius queries.
class PointBuckets {
 public:
  PointBuckets(std::span<const Point3> points, double cellSize);

  /// Calls fn(index) for every point with |p - q| <= radius, in increasing
  /// index order.
  template <typename Fn>
  void forEachWithin(const Point3& q, double radius, Fn&& fn) const {
    std::vector<std::uint32_t> hits;
    const double r2 = radius * radius;
    const auto lo = cellOf(q - Vec3(radius, radius, radius));
    const auto hi = cellOf(q + Vec3(radius, radius, radius));
    for (std::int64_t k = lo.k; k <= hi.k; ++k)
      for (std::int64_t j = lo.j; j <= hi.j; ++j)
        for (std::int64_t i = lo.i; i <= hi.i; ++i) {
          auto it = cells_.find(key({i, j, k}));
          if (it == cells_.end()) continue;
          for (std::uint32_t idx : it->second)
            if (squaredNorm(points_[idx] - q) <= r2) hits.push_back(idx);
        }
    std::sort(hits.begin(), hits.end());
    for (std::uint32_t idx : hits) fn(static_cast<std::size_t>(idx));
  }

 private:
  Index3 cellOf(const Point3& p) const;
  static std::uint64_t key(const Index3& c);

  std::span<const Point3> points_;
  double cellSize_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace tubeaxis
