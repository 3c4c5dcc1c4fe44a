#include "tubeaxis/mesh.hpp"

#include <algorithm>
#include <limits>

namespace tubeaxis {

double TriMesh::faceArea(std::size_t f) const {
  const auto& t = faces[f];
  const Point3& a = vertices[t[0]];
  return 0.5 * norm(cross(vertices[t[1]] - a, vertices[t[2]] - a));
}

double TriMesh::faceSize(std::size_t f) const {
  const auto& t = faces[f];
  const Point3& a = vertices[t[0]];
  const Point3& b = vertices[t[1]];
  const Point3& c = vertices[t[2]];
  return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

void TriMesh::boundingBox(Point3& lo, Point3& hi) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  lo = {inf, inf, inf};
  hi = {-inf, -inf, -inf};
  for (const Point3& p : vertices) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
}

Point3 HeightMap::toWorld(double u, double v, double h) const {
  switch (viewAxis) {
    case 0: return {h, u, v};
    case 1: return {v, h, u};
    default: return {u, v, h};
  }
}

double medianFaceSize(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no faces");
  std::vector<double> sizes(mesh.faces.size());
  for (std::size_t f = 0; f < sizes.size(); ++f) sizes[f] = mesh.faceSize(f);
  auto mid = sizes.begin() + static_cast<std::ptrdiff_t>(sizes.size() / 2);
  std::nth_element(sizes.begin(), mid, sizes.end());
  return *mid;
}

}  // namespace tubeaxis
