#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/synth.hpp"

using namespace tubeaxis;
using testsupport::digitalCylinder;
using testsupport::simulateScans;

namespace {

OrientedFaceSet faceSet(std::initializer_list<std::pair<Point3, Vec3>> items) {
  OrientedFaceSet f;
  for (const auto& [c, n] : items) {
    f.centers.push_back(c);
    f.normals.push_back(n);
    f.areas.push_back(1.0);
  }
  return f;
}

/// Unit lattice with voxel corners on integers, so the voxel holding the
/// world point (i,j,k) + 0.5 is index (i,j,k) + offset.
GridDomain cornerDomain(std::int64_t offset, std::int64_t extent) {
  GridDomain d;
  d.origin = {-double(offset), -double(offset), -double(offset)};
  d.gridstep = 1.0;
  d.dims = {extent, extent, extent};
  return d;
}

AccumulationParams params(double radius, double epsilon, double gridstep = 1.0) {
  AccumulationParams p;
  p.radius = radius;
  p.epsilon = epsilon;
  p.gridstep = gridstep;
  return p;
}

}  // namespace

TEST_CASE("single scan visits accRadius/gridstep voxels") {
  const OrientedFaceSet f = faceSet({{{0, 0, 0}, {0, 0, 1}}});
  const GridDomain d = cornerDomain(4, 10);
  const AccumulationResult r = computeAccumulationSerial(f, params(3.0, 0.0), d);
  for (int k = 0; k < 3; ++k) CHECK(r.accImage[{4, 4, 4 + k}] == 1);
  CHECK(r.accImage[{4, 4, 7}] == 0);  // distance 3 is not < accRadius
  CHECK(r.totalVisits == 3);
  CHECK(r.maxAcc == 1);
  CHECK(r.maxPt == Index3{4, 4, 4});
}

TEST_CASE("opposite scans meet without a direction") {
  const OrientedFaceSet f = faceSet({{{0, 0, 0.5}, {0, 0, 1}}, {{0, 0, 3.5}, {0, 0, -1}}});
  const GridDomain d = cornerDomain(4, 10);
  const AccumulationResult r = computeAccumulationSerial(f, params(3.0, 0.0), d);
  const Index3 v2{4, 4, 6};
  CHECK(r.accImage[v2] == 2);
  CHECK(r.maxAcc == 2);
  CHECK(r.maxPt == v2);  // reached 2 before voxel 1 did
  CHECK(r.dirImage[v2] == Vec3());
  CHECK(r.accImage[{4, 4, 5}] == 2);
}

TEST_CASE("direction update uses last x current with sign(0) = +1") {
  const OrientedFaceSet f = faceSet({{{0.5, 0.5, 0.5}, {1, 0, 0}}, {{0.5, 0.5, 0.5}, {0, 1, 0}}});
  const GridDomain d = cornerDomain(2, 5);
  const AccumulationResult r = computeAccumulationSerial(f, params(0.5, 0.0), d);
  CHECK(r.accImage[{2, 2, 2}] == 2);
  CHECK(r.dirImage[{2, 2, 2}] == Vec3(0, 0, 1));

  // a third normal flips its cross product onto the existing direction
  const OrientedFaceSet g = faceSet({{{0.5, 0.5, 0.5}, {1, 0, 0}},
                                     {{0.5, 0.5, 0.5}, {0, 1, 0}},
                                     {{0.5, 0.5, 0.5}, {1, 0, 0}}});
  const AccumulationResult s = computeAccumulationSerial(g, params(0.5, 0.0), d);
  CHECK(s.dirImage[{2, 2, 2}] == Vec3(0, 0, 2));
}

TEST_CASE("scan starting outside the domain fails, leaving it truncates") {
  const GridDomain d = cornerDomain(2, 5);
  CHECK_THROWS_AS(computeAccumulationSerial(faceSet({{{9, 0, 0}, {1, 0, 0}}}), params(2, 0), d), Error);
  const AccumulationResult r =
      computeAccumulationSerial(faceSet({{{2.5, 0.5, 0.5}, {1, 0, 0}}}), params(5, 0), d);
  CHECK(r.totalVisits == 1);
}

TEST_CASE("default domain is lattice aligned and has the documented margin") {
  const OrientedFaceSet f = faceSet({{{0.3, -1.2, 4.0}, {0, 0, 1}}, {{5.1, 2.2, 9.9}, {0, 1, 0}}});
  const AccumulationParams p = params(2.0, 0.2, 0.5);
  const GridDomain d = accumulationDomain(f, p);
  const Point3 c0 = d.voxelCenter({0, 0, 0});
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(c0[a] / 0.5 - std::round(c0[a] / 0.5)) < 1e-9);
    CHECK(d.origin[a] <= std::min(f.centers[0][a], f.centers[1][a]) - p.accRadius() - p.gridstep + 1e-9);
    const double top = d.origin[a] + d.gridstep * double(d.dims[static_cast<std::size_t>(a)]);
    CHECK(top >= std::max(f.centers[0][a], f.centers[1][a]) + p.accRadius() + p.gridstep - 1e-9);
  }
}

TEST_CASE("digital cylinder accumulation against a brute-force re-simulation") {
  const OrientedFaceSet faces = digitalSurfaceFaces(digitalCylinder(5.0, 40), 2.5);
  const AccumulationParams p = params(5.0, 1.0);
  const GridDomain d = accumulationDomain(faces, p);
  const AccumulationResult r = computeAccumulationSerial(faces, p, d);
  const auto oracle = simulateScans(faces, p.accRadius(), p.minNorm, d);

  SUBCASE("identical votes and directions") {
    std::uint64_t nonzero = 0;
    for (std::size_t o = 0; o < d.voxelCount(); ++o) {
      const Index3 idx = d.unlinear(o);
      const auto key = std::make_tuple(idx.i, idx.j, idx.k);
      const auto it = oracle.counts.find(key);
      const std::uint32_t expected = it == oracle.counts.end() ? 0 : it->second;
      if (r.accImage.at(o) != expected) ++nonzero;
      const auto dt = oracle.dirs.find(key);
      const Vec3 dir = dt == oracle.dirs.end() ? Vec3() : dt->second;
      if (!(r.dirImage.at(o) == dir)) ++nonzero;
    }
    CHECK(nonzero == 0);
    CHECK(r.maxAcc == oracle.maxAcc);
    CHECK(r.maxPt == Index3{std::get<0>(oracle.maxPt), std::get<1>(oracle.maxPt), std::get<2>(oracle.maxPt)});
    CHECK(r.totalVisits == oracle.visits);
  }

  SUBCASE("peak and axis directions sit on the cylinder axis") {
    const Point3 peak = d.voxelCenter(r.maxPt);
    CHECK(std::max(std::abs(peak.x), std::abs(peak.y)) <= 1.0 + 1e-9);

    int onAxis = 0;
    for (int z = 0; z < 40; ++z) {
      const Index3 axis = *digitize({0, 0, double(z)}, d);
      Index3 best{};
      std::uint32_t bestValue = 0;
      for (std::int64_t j = 0; j < d.dims[1]; ++j)
        for (std::int64_t i = 0; i < d.dims[0]; ++i)
          if (r.accImage[{i, j, axis.k}] > bestValue) {
            bestValue = r.accImage[{i, j, axis.k}];
            best = {i, j, axis.k};
          }
      if (best == axis) ++onAxis;
      const Vec3 dir = r.dirImage[axis];
      // the caps sit at z = -0.5 and 39.5; their scans reach accRadius inward
      if (z >= 6 && z < 34) {
        REQUIRE(norm(dir) > 0.0);
        CHECK(angleBetween(dir, {0, 0, dot(dir, {0, 0, 1}) < 0 ? -1.0 : 1.0}) < 5.0 * testsupport::kPi / 180.0);
      }
    }
    CHECK(onAxis >= 36);
  }
}

TEST_CASE("accumulation invariants") {
  TubeSpec spec;
  spec.pieces = {StraightSpec{20}, ArcSpec{15, 1.2, 0.4}};
  spec.radius = 4;
  spec.meshStep = 0.8;
  const OrientedFaceSet faces = flipped(faceNormals(genTube(spec).mesh));
  const AccumulationParams p = params(4.0, 0.4, 0.8);
  const GridDomain d = accumulationDomain(faces, p);
  const AccumulationResult r = computeAccumulationSerial(faces, p, d);

  SUBCASE("votes are conserved") {
    const std::uint64_t sum = std::accumulate(r.accImage.values().begin(), r.accImage.values().end(), std::uint64_t{0});
    CHECK(sum == r.totalVisits);
    CHECK(r.accImage[r.maxPt] == r.maxAcc);
    CHECK(*std::max_element(r.accImage.values().begin(), r.accImage.values().end()) == r.maxAcc);
  }

  SUBCASE("directions only where a voxel was crossed twice") {
    for (std::size_t o = 0; o < d.voxelCount(); ++o)
      if (r.accImage.at(o) < 2) CHECK(r.dirImage.at(o) == Vec3());
  }

  SUBCASE("counts do not depend on face order") {
    OrientedFaceSet reversed;
    for (std::size_t i = faces.size(); i-- > 0;) {
      reversed.centers.push_back(faces.centers[i]);
      reversed.normals.push_back(faces.normals[i]);
      reversed.areas.push_back(faces.areas[i]);
    }
    CHECK(computeAccumulationSerial(reversed, p, d).accImage.values() == r.accImage.values());
  }

  SUBCASE("uniform scaling by a power of two leaves the counts unchanged") {
    OrientedFaceSet scaled = faces;
    for (Point3& c : scaled.centers) c *= 4.0;
    const AccumulationParams q = params(16.0, 1.6, 3.2);
    GridDomain ds = d;
    ds.origin *= 4.0;
    ds.gridstep *= 4.0;
    CHECK(computeAccumulationSerial(scaled, q, ds).accImage.values() == r.accImage.values());
  }

  SUBCASE("direction image is reproducible") {
    CHECK(computeAccumulationSerial(faces, p, d).dirImage.values() == r.dirImage.values());
  }
}

TEST_CASE("parallel accumulation reproduces the sequential reference bit for bit") {
  TubeSpec spec;
  spec.pieces = {StraightSpec{25}, ArcSpec{12, 2.5, 1.0}, StraightSpec{10}};
  spec.radius = 3.5;
  spec.meshStep = 0.6;
  const OrientedFaceSet faces = flipped(faceNormals(genTube(spec).mesh));
  const AccumulationParams p = params(3.5, 0.35, 0.5);
  const GridDomain d = accumulationDomain(faces, p);
  const AccumulationResult serial = computeAccumulationSerial(faces, p, d);
  for (int threads : {2, 3, 8}) {
    const AccumulationResult par = computeAccumulation(faces, p, d, threads);
    CHECK(par.accImage.values() == serial.accImage.values());
    CHECK(par.dirImage.values() == serial.dirImage.values());
    CHECK(par.maxAcc == serial.maxAcc);
    CHECK(par.maxPt == serial.maxPt);
    CHECK(par.totalVisits == serial.totalVisits);
  }
}
