#include "tubeaxis/rebuild.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace tubeaxis {

std::vector<Vec3> polylineTangents(std::span<const Point3> points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(ErrorCode::DegenerateTangent, "need at least 2 points for tangents");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(distance(points[i], points[i + 1]) > 1e-12))
      throw Error(ErrorCode::DegenerateTangent, "consecutive centerline points coincide");
  std::vector<Vec3> t(n);
  if (n == 2) {
    t[0] = t[1] = normalized(points[1] - points[0]);
    return t;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 central = points[i + 1] - points[i - 1];
    t[i] = norm(central) > 1e-12 ? normalized(central) : normalized(points[i + 1] - points[i]);
  }
  const Vec3 first = normalized(points[1] - points[0]);
  t[0] = normalized(first * (2.0 * dot(first, t[1])) - t[1]);
  const Vec3 last = normalized(points[n - 1] - points[n - 2]);
  t[n - 1] = normalized(last * (2.0 * dot(last, t[n - 2])) - t[n - 2]);
  return t;
}

TriMesh sweepTube(const Centerline& cl, double radius, int sides) {
  if (cl.size() < 2) throw Error(ErrorCode::InvalidArgument, "sweep needs at least 2 points");
  if (sides < 3) throw Error(ErrorCode::InvalidArgument, "sweep needs at least 3 sides");
  const std::vector<Vec3> tangents = polylineTangents(cl.points);
  const auto s = static_cast<std::uint32_t>(sides);
  TriMesh mesh;
  mesh.vertices.reserve(cl.size() * s);
  Vec3 u = frameFromDirection(tangents[0]).u;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const Vec3& t = tangents[i];
    if (i > 0) {
      const Vec3 projected = u - t * dot(t, u);
      u = norm(projected) > 1e-9 ? normalized(projected) : frameFromDirection(t).u;
    }
    const Vec3 v = cross(t, u);
    for (std::uint32_t k = 0; k < s; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / s;
      mesh.vertices.push_back(cl.points[i] + (u * std::cos(theta) + v * std::sin(theta)) * radius);
    }
  }
  for (std::uint32_t i = 0; i + 1 < cl.size(); ++i) {
    const std::uint32_t a = i * s, b = (i + 1) * s;
    for (std::uint32_t k = 0; k < s; ++k) {
      const std::uint32_t k1 = (k + 1) % s;
      mesh.faces.push_back({a + k, b + k1, b + k});
      mesh.faces.push_back({a + k, a + k1, b + k1});
    }
  }
  return mesh;
}

double distanceToPolyline(const Point3& p, std::span<const Point3> polyline, bool closed) {
  if (polyline.empty()) throw Error(ErrorCode::EmptyInput, "empty polyline");
  double best = std::numeric_limits<double>::infinity();
  const std::size_t segs = closed ? polyline.size() : polyline.size() - 1;
  if (segs == 0) return distance(p, polyline[0]);
  for (std::size_t i = 0; i < segs; ++i) {
    const Point3& a = polyline[i];
    const Point3& b = polyline[(i + 1) % polyline.size()];
    const Vec3 ab = b - a;
    const double len2 = squaredNorm(ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, squaredNorm(p - (a + ab * t)));
  }
  return std::sqrt(best);
}

std::vector<double> errorMapSerial(const OrientedFaceSet& faces, const Centerline& cl,
                                   double radius) {
  if (cl.empty()) throw Error(ErrorCode::EmptyInput, "empty centerline");
  std::vector<double> err(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double d = distanceToPolyline(faces.centers[f], cl.points, cl.closed) - radius;
    err[f] = d * d;
  }
  return err;
}

std::vector<double> errorMap(const OrientedFaceSet& faces, const Centerline& cl, double radius,
                             int threads) {
  if (threads <= 1) return errorMapSerial(faces, cl, radius);
  if (cl.empty()) throw Error(ErrorCode::EmptyInput, "empty centerline");
  std::vector<double> err(faces.size());
  const auto n = static_cast<std::int64_t>(faces.size());
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t f = 0; f < n; ++f) {
    const auto i = static_cast<std::size_t>(f);
    const double d = distanceToPolyline(faces.centers[i], cl.points, cl.closed) - radius;
    err[i] = d * d;
  }
  return err;
}

ErrorStats errorStats(std::span<const double> errors, std::span<const std::uint8_t> mask) {
  ErrorStats st;
  double sum = 0.0, sumSq = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    sum += errors[i];
    sumSq += errors[i] * errors[i];
    st.max = std::max(st.max, errors[i]);
    ++st.count;
  }
  if (st.count > 0) {
    st.mean = sum / static_cast<double>(st.count);
    st.rms = std::sqrt(sumSq / static_cast<double>(st.count));
  }
  return st;
}

}  // namespace tubeaxis
