#include <map>

#include "doctest.h"
#include "support.hpp"
#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/normals.hpp"
#include "tubeaxis/synth.hpp"

using namespace tubeaxis;
using testsupport::digitalBall;
using testsupport::digitalCylinder;

TEST_CASE("triangle normal, center and area") {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  const OrientedFaceSet f = faceNormals(m);
  CHECK(f.normals[0] == Vec3(0, 0, 1));
  CHECK(norm(f.centers[0] - Vec3(1.0 / 3, 1.0 / 3, 0)) < 1e-15);
  CHECK(f.areas[0] == doctest::Approx(0.5));

  m.faces = {{0, 2, 1}};
  CHECK(faceNormals(m).normals[0] == Vec3(0, 0, -1));

  for (Point3& p : m.vertices) p *= 2.0;
  CHECK(faceNormals(m).areas[0] == doctest::Approx(2.0));
}

TEST_CASE("degenerate triangle is reported") {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  m.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(faceNormals(m), Error);
}

TEST_CASE("parallel face normals equal the serial result") {
  TubeSpec spec;
  spec.pieces = {StraightSpec{30}, ArcSpec{12, 2.0, 0.7}};
  spec.radius = 3;
  spec.meshStep = 0.4;
  const TriMesh mesh = genTube(spec).mesh;
  const OrientedFaceSet a = faceNormals(mesh, 1);
  const OrientedFaceSet b = faceNormals(mesh, 4);
  CHECK(a.normals == b.normals);
  CHECK(a.centers == b.centers);
  CHECK(a.areas == b.areas);
}

TEST_CASE("digital facets of a voxel and a bar") {
  VoxelSet one;
  one.points = {{0, 0, 0}};
  const OrientedFaceSet f = digitalSurfaceFacets(one);
  CHECK(f.size() == 6);
  Vec3 sum;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::abs(std::abs(f.normals[i].x) + std::abs(f.normals[i].y) + std::abs(f.normals[i].z) - 1.0) == 0.0);
    // outward: facet center lies along its normal from the voxel center
    CHECK(dot(f.centers[i], f.normals[i]) == doctest::Approx(0.5));
    sum += f.normals[i];
  }
  CHECK(sum == Vec3());

  VoxelSet bar;
  bar.points = {{0, 0, 0}, {0, 0, 1}};
  CHECK(digitalSurfaceFacets(bar).size() == 10);

  CHECK_THROWS_AS(digitalSurfaceFacets(VoxelSet{}), Error);
}

TEST_CASE("planar facet set gives the exact plane normal") {
  OrientedFaceSet plane;
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      plane.centers.push_back({double(i), double(j), 0.5});
      plane.normals.push_back({0, 0, 1});
      plane.areas.push_back(1.0);
    }
  const OrientedFaceSet est = estimateDigitalNormals(plane, 3.0);
  for (const Vec3& n : est.normals) CHECK(n == Vec3(0, 0, -1));
}

TEST_CASE("isolated facet keeps its axis direction, pointing inward") {
  OrientedFaceSet one;
  one.centers = {{0.5, 0, 0}};
  one.normals = {{1, 0, 0}};
  one.areas = {1.0};
  CHECK(estimateDigitalNormals(one, 2.5).normals[0] == Vec3(-1, 0, 0));
  CHECK_THROWS_AS(estimateDigitalNormals(one, 1.5), Error);
}

TEST_CASE("digital ball normals follow the sphere") {
  const OrientedFaceSet f = digitalSurfaceFaces(digitalBall(5.0), 3.0);
  std::size_t good = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 inward = -normalized(f.centers[i]);
    CHECK(std::abs(norm(f.normals[i]) - 1.0) < 1e-9);
    if (angleBetween(f.normals[i], inward) < 15.0 * testsupport::kPi / 180.0) ++good;
  }
  CHECK(double(good) >= 0.95 * double(f.size()));
}

TEST_CASE("digital cylinder lateral normals are horizontal") {
  const OrientedFaceSet facets = digitalSurfaceFacets(digitalCylinder(5.0, 40));
  const OrientedFaceSet est = estimateDigitalNormals(facets, 3.0);
  std::size_t lateral = 0, flat = 0;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (facets.normals[i].z != 0.0) continue;
    ++lateral;
    if (std::abs(est.normals[i].z) < 0.2) ++flat;
  }
  REQUIRE(lateral > 0);
  CHECK(double(flat) >= 0.9 * double(lateral));
}

TEST_CASE("digital normals are translation invariant and follow lattice symmetries") {
  VoxelSet blob = digitalBall(3.0);
  for (int k = 0; k < 6; ++k) blob.points.push_back({4, 1, k});  // break the symmetry
  std::sort(blob.points.begin(), blob.points.end());
  blob.points.erase(std::unique(blob.points.begin(), blob.points.end()), blob.points.end());
  const OrientedFaceSet base = digitalSurfaceFaces(blob, 2.5);
  std::map<std::tuple<double, double, double>, Vec3> byCenter;
  for (std::size_t i = 0; i < base.size(); ++i)
    byCenter[{base.centers[i].x, base.centers[i].y, base.centers[i].z}] = base.normals[i];

  SUBCASE("translation") {
    VoxelSet moved = blob;
    for (Index3& p : moved.points) p = {p.i + 17, p.j - 40, p.k + 3};
    const OrientedFaceSet t = digitalSurfaceFaces(moved, 2.5);
    REQUIRE(t.size() == base.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Point3 c = t.centers[i] - Vec3(17, -40, 3);
      CHECK(byCenter.at({c.x, c.y, c.z}) == t.normals[i]);
    }
  }

  SUBCASE("48 axis permutations and reflections") {
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& perm : perms)
      for (int signs = 0; signs < 8; ++signs) {
        auto apply = [&](const Vec3& v) {
          Vec3 r;
          for (int a = 0; a < 3; ++a) r[a] = v[perm[a]] * (((signs >> a) & 1) ? -1.0 : 1.0);
          return r;
        };
        VoxelSet img;
        for (const Index3& p : blob.points) {
          const Vec3 q = apply(Vec3(double(p.i), double(p.j), double(p.k)));
          img.points.push_back({std::int64_t(q.x), std::int64_t(q.y), std::int64_t(q.z)});
        }
        std::sort(img.points.begin(), img.points.end());
        const OrientedFaceSet t = digitalSurfaceFaces(img, 2.5);
        REQUIRE(t.size() == base.size());
        std::size_t mismatched = 0;
        for (const auto& [key, n] : byCenter) {
          const Vec3 c = apply(Vec3(std::get<0>(key), std::get<1>(key), std::get<2>(key)));
          // locate the image facet with the same center and the image of the same outward side
          for (std::size_t i = 0; i < t.size(); ++i)
            if (t.centers[i] == c) {
              const Vec3 expected = apply(n);
              if (std::abs(std::abs(dot(expected, t.normals[i])) - 1.0) > 1e-9) ++mismatched;
              break;
            }
        }
        CHECK(mismatched == 0);
      }
  }
}

TEST_CASE("parallel digital normals equal the serial result") {
  const OrientedFaceSet facets = digitalSurfaceFacets(digitalCylinder(4.0, 20));
  CHECK(estimateDigitalNormals(facets, 2.5, 1).normals == estimateDigitalNormals(facets, 2.5, 4).normals);
}

TEST_CASE("orientation modes") {
  OrientedFaceSet one;
  one.centers = {{0, 0, 0}};
  one.normals = {{0, 0, 1}};
  one.areas = {1};
  bool was = false;
  CHECK(orientInward(one, Orientation::Flip, 1.0, 1.0, &was).normals[0] == Vec3(0, 0, -1));
  CHECK(was);
  CHECK(orientInward(one, Orientation::Keep, 1.0, 1.0, &was).normals[0] == Vec3(0, 0, 1));
  CHECK_FALSE(was);
}

TEST_CASE("auto orientation turns outward cylinder normals inward") {
  TubeSpec spec;
  spec.pieces = {StraightSpec{40}};
  spec.radius = 5;
  spec.meshStep = 1;
  const OrientedFaceSet outward = faceNormals(genTube(spec).mesh);
  AccumulationParams p;
  p.radius = 5;
  p.gridstep = 1;
  const GridDomain d = accumulationDomain(outward, p);
  const auto accOut = computeAccumulationSerial(outward, p, d).maxAcc;
  const auto accIn = computeAccumulationSerial(flipped(outward), p, d).maxAcc;
  CHECK(accIn > accOut);

  bool was = false;
  const OrientedFaceSet chosen = orientInward(outward, Orientation::Auto, p.accRadius(), 1.0, &was);
  CHECK(was);
  // inward: from a lateral face center toward the axis
  CHECK(dot(chosen.normals[0], Vec3(chosen.centers[0].x, chosen.centers[0].y, 0)) < 0.0);
}
