#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tubeaxis/core.hpp"

using namespace tubeaxis;

namespace {

void checkOrthonormal(const OrthonormalFrame& f, double tol) {
  CHECK(std::abs(norm(f.u) - 1.0) < tol);
  CHECK(std::abs(norm(f.v) - 1.0) < tol);
  CHECK(std::abs(norm(f.w) - 1.0) < tol);
  CHECK(std::abs(dot(f.u, f.v)) < tol);
  CHECK(std::abs(dot(f.u, f.w)) < tol);
  CHECK(std::abs(dot(f.v, f.w)) < tol);
}

}  // namespace

TEST_CASE("frame for +z follows the least-aligned-axis construction") {
  const OrthonormalFrame f = frameFromDirection({0, 0, 1});
  // e = x (tie between x and y resolved toward x): u = z cross x = y, v = z cross y = -x
  CHECK(f.u == Vec3(0, 1, 0));
  CHECK(f.v == Vec3(-1, 0, 0));
  CHECK(f.w == Vec3(0, 0, 1));
  checkOrthonormal(f, 1e-12);
}

TEST_CASE("frame for -z has v = w x u exactly") {
  const OrthonormalFrame f = frameFromDirection({0, 0, -1});
  checkOrthonormal(f, 1e-12);
  CHECK(f.v == cross(f.w, f.u));
}

TEST_CASE("frame for the diagonal has identity Gram matrix") {
  const double s = 1.0 / std::sqrt(3.0);
  const OrthonormalFrame f = frameFromDirection({s, s, s});
  const Vec3 axes[3] = {f.u, f.v, f.w};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(std::abs(dot(axes[a], axes[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("frame construction is deterministic and keeps the input direction") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    const Vec3 w{g(rng), g(rng), g(rng)};
    const OrthonormalFrame a = frameFromDirection(w, {1, 2, 3});
    const OrthonormalFrame b = frameFromDirection(w, {1, 2, 3});
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    checkOrthonormal(a, 1e-9);
    CHECK(norm(a.w - w / norm(w)) < 1e-12);
    CHECK(a.center == Point3(1, 2, 3));
  }
}

TEST_CASE("frame of a null direction fails") {
  CHECK_THROWS_AS(frameFromDirection({0, 0, 1e-13}), Error);
  try {
    frameFromDirection({});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDirection);
  }
}

TEST_CASE("digitize examples") {
  GridDomain d;
  d.origin = {0, 0, 0};
  d.gridstep = 1.0;
  d.dims = {2, 2, 2};
  CHECK(digitize({0.1, 0.1, 0.1}, d) == Index3{0, 0, 0});
  CHECK_FALSE(digitize({2.5, 0, 0}, d).has_value());

  GridDomain h;
  h.gridstep = 0.5;
  h.dims = {4, 4, 4};
  CHECK(digitize({1.0, 1.0, 1.0}, h) == Index3{2, 2, 2});
  CHECK_FALSE(digitize({-1e-9, 0, 0}, h).has_value());
}

TEST_CASE("voxel centers digitize back to their index") {
  GridDomain d;
  d.origin = {-3.25, 1.5, 0.125};
  d.gridstep = 0.37;
  d.dims = {5, 7, 3};
  for (std::size_t o = 0; o < d.voxelCount(); ++o) {
    const Index3 idx = d.unlinear(o);
    CHECK(d.linear(idx) == o);
    const auto back = digitize(d.voxelCenter(idx), d);
    REQUIRE(back.has_value());
    CHECK(*back == idx);
  }
}

TEST_CASE("trilinear sampling interpolates between voxel centers") {
  GridDomain d;
  d.dims = {2, 1, 1};
  ScalarGrid3 g(d);
  g[{0, 0, 0}] = 2;
  g[{1, 0, 0}] = 6;
  CHECK(sampleTrilinear(g, {0.5, 0.5, 0.5}) == doctest::Approx(2.0));
  CHECK(sampleTrilinear(g, {1.0, 0.5, 0.5}) == doctest::Approx(4.0));
  CHECK(sampleTrilinear(g, {1.5, 0.5, 0.5}) == doctest::Approx(6.0));
  // beyond the last center the missing neighbour reads 0
  CHECK(sampleTrilinear(g, {2.0, 0.5, 0.5}) == doctest::Approx(3.0));
  CHECK(sampleTrilinear(g, {50, 50, 50}) == 0.0);
}

TEST_CASE("grid serialization writes header and x-fastest little-endian payload") {
  const std::filesystem::path dir = std::filesystem::path(TUBEAXIS_TEST_TMP) / "grid";
  std::filesystem::create_directories(dir);
  GridDomain d;
  d.origin = {1, 2, 3};
  d.gridstep = 0.5;
  d.dims = {3, 2, 2};
  ScalarGrid3 g(d);
  for (std::size_t o = 0; o < d.voxelCount(); ++o) g.at(o) = static_cast<std::uint32_t>(o * 10 + 1);
  const std::string stem = (dir / "acc").string();
  writeGrid(g, stem);

  std::ifstream hdr(stem + ".json");
  const auto j = nlohmann::json::parse(hdr);
  CHECK(j["dims"] == nlohmann::json({3, 2, 2}));
  CHECK(j["gridstep"].get<double>() == 0.5);
  CHECK(j["dtype"] == "uint32");
  CHECK(std::filesystem::file_size(stem + ".raw") == d.voxelCount() * 4);

  std::ifstream raw(stem + ".raw", std::ios::binary);
  unsigned char bytes[8];
  raw.read(reinterpret_cast<char*>(bytes), 8);
  CHECK(bytes[0] == 1);   // voxel (0,0,0)
  CHECK(bytes[4] == 11);  // voxel (1,0,0): x is fastest

  const ScalarGrid3 back = readScalarGrid(stem);
  CHECK(back.values() == g.values());
  CHECK(back.domain().origin == d.origin);
}
