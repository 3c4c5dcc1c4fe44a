#include "tubeaxis/accumulate.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tubeaxis {

void AccumulationParams::validate() const {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  if (!(gridstep > 0.0)) throw Error(ErrorCode::InvalidArgument, "gridstep must be positive");
  if (!(minNorm > 0.0 && minNorm < 1.0))
    throw Error(ErrorCode::InvalidArgument, "minNorm must lie in (0,1)");
}

GridDomain accumulationDomain(const OrientedFaceSet& faces, const AccumulationParams& params) {
  if (faces.empty()) throw Error(ErrorCode::EmptyInput, "no faces to accumulate");
  params.validate();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Point3 lo{inf, inf, inf}, hi{-inf, -inf, -inf};
  for (const Point3& c : faces.centers) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  const double gs = params.gridstep;
  const double margin = params.accRadius() + gs;
  GridDomain d;
  d.gridstep = gs;
  for (int a = 0; a < 3; ++a) {
    const double first = std::floor((lo[a] - margin) / gs + 0.5);
    const double last = std::ceil((hi[a] + margin) / gs + 0.5);
    d.origin[a] = (first - 0.5) * gs;
    d.dims[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(last - first) + 1;
  }
  return d;
}

namespace {

/// Walks one directional scan, calling visit(linearOffset) per step.
template <typename Visit>
void marchFace(const Point3& center, const Vec3& normal, double gridstep, double accRadius,
               const GridDomain& domain, Visit&& visit) {
  Point3 current = center;
  const Vec3 step = normal * gridstep;
  bool first = true;
  while (distance(current, center) < accRadius) {
    const auto idx = digitize(current, domain);
    if (!idx) {
      if (first) throw Error(ErrorCode::DomainTooSmall, "a scan starts outside the domain");
      break;
    }
    visit(domain.linear(*idx));
    current += step;
    first = false;
  }
}

double signOf(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// Per-voxel update shared by both implementations.
struct VoxelUpdate {
  std::uint32_t* acc;
  Vec3* dir;
  Vec3* last;
  double minNorm;

  std::uint32_t operator()(std::size_t offset, const Vec3& normal) const {
    if (acc[offset] != 0) {
      const Vec3 mainAxis = cross(last[offset], normal);
      if (norm(mainAxis) > minNorm) dir[offset] += mainAxis * signOf(dot(mainAxis, dir[offset]));
    }
    last[offset] = normal;
    return ++acc[offset];
  }
};

}  // namespace

AccumulationResult computeAccumulationSerial(const OrientedFaceSet& faces,
                                             const AccumulationParams& params,
                                             const GridDomain& domain) {
  if (faces.empty()) throw Error(ErrorCode::EmptyInput, "no faces to accumulate");
  params.validate();
  AccumulationResult res{ScalarGrid3(domain, 0u), VectorGrid3(domain), 0, {}, 0};
  std::vector<Vec3> lastVectors(domain.voxelCount());
  const VoxelUpdate update{res.accImage.values().data(), res.dirImage.values().data(),
                           lastVectors.data(), params.minNorm};
  std::size_t maxOffset = 0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Vec3& n = faces.normals[f];
    marchFace(faces.centers[f], n, params.gridstep, params.accRadius(), domain,
              [&](std::size_t offset) {
                const std::uint32_t count = update(offset, n);
                ++res.totalVisits;
                if (count > res.maxAcc) {
                  res.maxAcc = count;
                  maxOffset = offset;
                }
              });
  }
  res.maxPt = domain.unlinear(maxOffset);
  return res;
}

AccumulationResult computeAccumulation(const OrientedFaceSet& faces,
                                       const AccumulationParams& params, const GridDomain& domain,
                                       int threads) {
#ifndef _OPENMP
  threads = 1;
#endif
  if (threads <= 1) return computeAccumulationSerial(faces, params, domain);
  if (faces.empty()) throw Error(ErrorCode::EmptyInput, "no faces to accumulate");
  params.validate();

  const auto nFaces = static_cast<std::int64_t>(faces.size());
  const double accRadius = params.accRadius();

  // pass 1: scan lengths, pass 2: visit offsets in global (face, step) order
  std::vector<std::uint64_t> start(faces.size() + 1, 0);
  bool outside = false;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t f = 0; f < nFaces; ++f) {
    std::uint64_t steps = 0;
    try {
      marchFace(faces.centers[static_cast<std::size_t>(f)], faces.normals[static_cast<std::size_t>(f)],
                params.gridstep, accRadius, domain, [&](std::size_t) { ++steps; });
    } catch (const Error&) {
#pragma omp atomic write
      outside = true;
    }
    start[static_cast<std::size_t>(f) + 1] = steps;
  }
  if (outside) throw Error(ErrorCode::DomainTooSmall, "a scan starts outside the domain");
  std::partial_sum(start.begin(), start.end(), start.begin());

  const std::uint64_t totalVisits = start.back();
  std::vector<std::uint64_t> visits(totalVisits);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t f = 0; f < nFaces; ++f) {
    const auto i = static_cast<std::size_t>(f);
    std::uint64_t pos = start[i];
    marchFace(faces.centers[i], faces.normals[i], params.gridstep, accRadius, domain,
              [&](std::size_t offset) { visits[pos++] = offset; });
  }

  AccumulationResult res{ScalarGrid3(domain, 0u), VectorGrid3(domain), 0, {}, totalVisits};
  std::vector<Vec3> lastVectors(domain.voxelCount());
  const VoxelUpdate update{res.accImage.values().data(), res.dirImage.values().data(),
                           lastVectors.data(), params.minNorm};

  struct Best {
    std::uint32_t value = 0;
    std::uint64_t sequence = std::numeric_limits<std::uint64_t>::max();
    std::size_t offset = 0;
  };
  std::vector<Best> best(static_cast<std::size_t>(threads));
  const std::size_t voxels = domain.voxelCount();

#pragma omp parallel num_threads(threads)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
    const int nth = omp_get_num_threads();
#else
    const int tid = 0, nth = 1;
#endif
    // each worker owns a contiguous slab of voxel offsets
    const std::size_t lo = voxels * static_cast<std::size_t>(tid) / static_cast<std::size_t>(nth);
    const std::size_t hi = voxels * static_cast<std::size_t>(tid + 1) / static_cast<std::size_t>(nth);
    Best mine;
    for (std::int64_t f = 0; f < nFaces; ++f) {
      const auto i = static_cast<std::size_t>(f);
      const Vec3& n = faces.normals[i];
      for (std::uint64_t s = start[i]; s < start[i + 1]; ++s) {
        const std::size_t offset = visits[s];
        if (offset < lo || offset >= hi) continue;
        const std::uint32_t count = update(offset, n);
        if (count > mine.value) mine = {count, s, offset};
      }
    }
    best[static_cast<std::size_t>(tid)] = mine;
  }

  // the sequential scan keeps the earliest visit that reached the maximum
  Best winner;
  for (const Best& b : best)
    if (b.value > winner.value || (b.value == winner.value && b.sequence < winner.sequence))
      winner = b;
  res.maxAcc = winner.value;
  res.maxPt = domain.unlinear(winner.offset);
  return res;
}

}  // namespace tubeaxis
