#include "tubeaxis/track.hpp"

#include <algorithm>

namespace tubeaxis {

std::pair<int, int> Patch::argmax() const {
  std::pair<int, int> best{half(), half()};
  double value = -1.0;
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      if (at(r, c) > value) {
        value = at(r, c);
        best = {r, c};
      }
  return best;
}

Patch extractPatch(const ScalarGrid3& acc, const Point3& center, const Vec3& dir, double sideWorld) {
  const double gs = acc.domain().gridstep;
  Patch patch;
  patch.frame = frameFromDirection(dir, center);
  patch.step = gs;
  const int m = static_cast<int>(std::ceil(sideWorld / (2.0 * gs) - 1e-9));
  patch.size = 2 * std::max(m, 0) + 1;
  patch.values.resize(static_cast<std::size_t>(patch.size * patch.size));
  for (int r = 0; r < patch.size; ++r)
    for (int c = 0; c < patch.size; ++c)
      patch.values[static_cast<std::size_t>(r * patch.size + c)] =
          sampleTrilinear(acc, patch.pixelPosition(r, c));
  return patch;
}

Vec3 localDirection(const VectorGrid3& dirImage, const Point3& p, const Vec3& reference) {
  const GridDomain& d = dirImage.domain();
  const Index3 c = digitizeUnchecked(p, d);
  auto aligned = [&](const Vec3& v) { return dot(v, reference) < 0.0 ? -v : v; };
  Vec3 sum;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const Index3 n{c.i + di, c.j + dj, c.k + dk};
        if (d.contains(n)) sum += aligned(dirImage[n]);
      }
  return norm(sum) > 1e-12 ? aligned(normalized(sum)) : Vec3{};
}

double neighbourhoodMean(const ScalarGrid3& acc, const Point3& p) {
  const double gs = acc.domain().gridstep;
  double sum = 0.0;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) sum += sampleTrilinear(acc, p + Vec3(di, dj, dk) * gs);
  return sum / 27.0;
}

bool isInsideTube(const AccumulationResult& res, const Point3& current, const Point3& previous,
                  double seedValue, const TrackParams& params) {
  if (neighbourhoodMean(res.accImage, current) < params.insideThreshold * seedValue) return false;
  const Vec3 step = current - previous;
  if (norm(step) <= 1e-12) return false;
  const Vec3 axis = localDirection(res.dirImage, current, step);
  if (norm(axis) == 0.0) return true;
  return angleBetween(step, axis) <= params.maxAngle;
}

namespace {

std::size_t maxSteps(const GridDomain& d, double trackStep) {
  const double diag = d.gridstep * std::sqrt(static_cast<double>(
                                       d.dims[0] * d.dims[0] + d.dims[1] * d.dims[1] + d.dims[2] * d.dims[2]));
  return static_cast<std::size_t>(8.0 * diag / trackStep) + 16;
}

}  // namespace

Centerline trackDirection(const AccumulationResult& res, const Point3& start, bool inFront,
                          const TrackParams& params) {
  const GridDomain& domain = res.accImage.domain();
  const auto seedIdx = digitize(start, domain);
  if (!seedIdx) throw Error(ErrorCode::SeedInvalid, "seed lies outside the accumulation domain");
  // Fine rings put consecutive scans below minNorm exactly on the axis, so
  // the seed voxel itself may hold no direction; its neighbours usually do.
  Vec3 reference = res.dirImage[*seedIdx];
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const Index3 n{seedIdx->i + di, seedIdx->j + dj, seedIdx->k + dk};
        if (norm(res.dirImage[*seedIdx]) == 0.0 && domain.contains(n) && norm(res.dirImage[n]) > norm(reference))
          reference = res.dirImage[n];
      }
  const Vec3 seedDir = localDirection(res.dirImage, start, reference);
  if (norm(seedDir) <= 1e-12) throw Error(ErrorCode::SeedInvalid, "no axis direction at the seed");
  const double seedValue = neighbourhoodMean(res.accImage, start);

  Centerline cl;
  cl.sourceMaxPt = *seedIdx;
  Vec3 lastVect = normalized(seedDir) * (inFront ? 1.0 : -1.0);
  Point3 previous = start - lastVect * params.trackStep;
  Point3 current = start;
  bool leftSeed = false;
  const std::size_t guard = maxSteps(domain, params.trackStep);

  for (std::size_t it = 0; it < guard; ++it) {
    Vec3 dirVect = localDirection(res.dirImage, current, lastVect);
    if (norm(dirVect) == 0.0) dirVect = lastVect;
    if (!isInsideTube(res, current, previous, seedValue, params)) break;
    cl.points.push_back(current);
    cl.directions.push_back(dirVect);

    const Point3 centerPatch = current + dirVect * params.trackStep;
    if (!domain.contains(centerPatch)) break;
    const Patch patch = extractPatch(res.accImage, centerPatch, dirVect, 2.0 * params.accRadius);
    const auto [row, col] = patch.argmax();
    if (patch.at(row, col) <= 0.0) break;
    const Point3 next = patch.pixelPosition(row, col);

    const double fromSeed = distance(next, start);
    if (fromSeed > 2.0 * params.trackStep) leftSeed = true;
    if (leftSeed && fromSeed < 0.5 * params.trackStep) {
      cl.closed = true;
      break;
    }
    lastVect = dirVect;
    previous = current;
    current = next;
  }
  return cl;
}

Centerline extractCenterline(const AccumulationResult& res, const TrackParams& params) {
  if (res.maxAcc < 2) throw Error(ErrorCode::SeedInvalid, "accumulation maximum below 2");
  const Point3 seed = res.accImage.domain().voxelCenter(res.maxPt);
  Centerline forward = trackDirection(res, seed, true, params);
  if (forward.closed) return forward;
  const Centerline backward = trackDirection(res, seed, false, params);

  Centerline cl;
  cl.sourceMaxPt = forward.sourceMaxPt;
  for (std::size_t i = backward.size(); i-- > 1;) {
    cl.points.push_back(backward.points[i]);
    cl.directions.push_back(-backward.directions[i]);
  }
  cl.points.insert(cl.points.end(), forward.points.begin(), forward.points.end());
  cl.directions.insert(cl.directions.end(), forward.directions.begin(), forward.directions.end());
  cl.closed = cl.size() >= 3 && distance(cl.points.front(), cl.points.back()) < params.trackStep;
  return cl;
}

}  // namespace tubeaxis
