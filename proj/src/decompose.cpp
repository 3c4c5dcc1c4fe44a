#include "tubeaxis/decompose.hpp"

#include <algorithm>
#include <numbers>

#include <Eigen/Dense>

namespace tubeaxis {

TangentSpacePolygon tangentSpaceTransform(std::span<const Point3> points) {
  if (points.size() < 3)
    throw Error(ErrorCode::InvalidArgument, "tangent space needs at least 3 points");
  const std::size_t n = points.size() - 1;  // number of edges
  TangentSpacePolygon tsp;
  tsp.lengths.resize(n);
  tsp.angles.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    tsp.lengths[i] = distance(points[i], points[i + 1]);
    if (!(tsp.lengths[i] > 1e-12))
      throw Error(ErrorCode::DuplicatePoint, "consecutive points " + std::to_string(i) + " and " +
                                                 std::to_string(i + 1) + " coincide");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double a = angleBetween(points[i] - points[i - 1], points[i + 1] - points[i]);
    // a U-turn of exactly pi is folded to the nearest representable value below pi
    tsp.angles[i] = std::min(a, std::nextafter(std::numbers::pi, 0.0));
  }

  tsp.T.reserve(2 * n);
  Point2 t2{0.0, 0.0};  // T_02
  tsp.T.push_back(t2);
  for (std::size_t i = 1; i <= n; ++i) {
    const Point2 t1{t2.x + tsp.lengths[i - 1], t2.y};  // T_i1
    tsp.midpoints.push_back({0.5 * (t2.x + t1.x), 0.5 * (t2.y + t1.y)});
    tsp.T.push_back(t1);
    if (i < n) {
      t2 = {t1.x, t1.y + tsp.angles[i]};  // T_i2
      tsp.T.push_back(t2);
    }
  }
  return tsp;
}

double lineDeviation(std::span<const Point2> points) {
  if (points.size() < 3) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const Point2& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point2& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  // principal direction of the 2x2 scatter matrix
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const double nx = -std::sin(theta), ny = std::cos(theta);
  double worst = 0.0;
  for (const Point2& p : points) worst = std::max(worst, std::abs((p.x - mx) * nx + (p.y - my) * ny));
  return worst;
}

namespace {

struct EdgeRun {
  std::size_t first;  // edge indices, inclusive
  std::size_t last;
  bool arc;
};

std::size_t pointCount(const Segment& s) { return s.last - s.first + 1; }

void mergeShort(std::vector<Segment>& segs, std::size_t minLen) {
  bool changed = true;
  while (changed && segs.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (pointCount(segs[i]) >= minLen) continue;
      if (i > 0) {
        segs[i - 1].last = segs[i].last;
      } else {
        segs[1].first = segs[0].first;
      }
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
    // neighbouring straight runs are one line once the spike between them is gone
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (!segs[i - 1].isArc() && !segs[i].isArc()) {
        segs[i - 1].last = segs[i].last;
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

Decomposition detectArcsAndLines(const TangentSpacePolygon& tsp, const DetectParams& params) {
  const std::size_t n = tsp.lengths.size();
  auto flat = [&](std::size_t vertex) { return tsp.angles[vertex] <= params.alphaFlat; };
  std::vector<EdgeRun> runs;
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    while (e + 1 < n && flat(e + 1)) ++e;
    if (e > s) {
      runs.push_back({s, e, false});
      s = e + 1;
      continue;
    }
    e = s;
    while (e + 1 < n && !flat(e + 1) &&
           lineDeviation(std::span(tsp.midpoints).subspan(s, e + 2 - s)) <= params.nu)
      ++e;
    // a lone edge between a flat vertex and the end is straight
    runs.push_back({s, e, e > s});
    s = e + 1;
  }

  Decomposition dec;
  for (const EdgeRun& r : runs) {
    Segment seg;
    seg.first = r.first;
    seg.last = r.last + 1;
    if (r.arc) seg.kind = ArcPart{};
    else seg.kind = StraightPart{};
    dec.segments.push_back(seg);
  }
  mergeShort(dec.segments, params.minLen);
  return dec;
}

namespace {

struct PlaneFrame {
  Point3 centroid;
  Vec3 normal;     // smallest spread
  Vec3 major;      // largest spread
  Eigen::Vector3d spread;  // ascending eigenvalues
};

PlaneFrame principalAxes(std::span<const Point3> points) {
  Point3 c;
  for (const Point3& p : points) c += p;
  c = c / static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Eigen::Vector3d d(p.x - c.x, p.y - c.y, p.z - c.z);
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const auto& v = eig.eigenvectors();
  return {c, Vec3(v(0, 0), v(1, 0), v(2, 0)), Vec3(v(0, 2), v(1, 2), v(2, 2)), eig.eigenvalues()};
}

}  // namespace

CircleFit fitCircle3D(std::span<const Point3> points) {
  if (points.size() < 3) throw Error(ErrorCode::Collinear, "circle fit needs at least 3 points");
  const PlaneFrame pf = principalAxes(points);
  if (!(pf.spread(1) > 1e-10 * pf.spread(2)))
    throw Error(ErrorCode::Collinear, "points do not span a plane");
  Vec3 axis = normalized(pf.normal);
  const Vec3 u = normalized(pf.major - axis * dot(pf.major, axis));
  const Vec3 v = cross(axis, u);

  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  std::vector<Point2> local(points.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec3 d = points[static_cast<std::size_t>(i)] - pf.centroid;
    const Point2 q{dot(d, u), dot(d, v)};
    local[static_cast<std::size_t>(i)] = q;
    a(i, 0) = q.x;
    a(i, 1) = q.y;
    a(i, 2) = 1.0;
    b(i) = -(q.x * q.x + q.y * q.y);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw Error(ErrorCode::Collinear, "circle system is rank deficient");
  const Eigen::Vector3d sol = qr.solve(b);
  const double cx = -0.5 * sol(0), cy = -0.5 * sol(1);
  const double r2 = cx * cx + cy * cy - sol(2);
  if (!(r2 > 0.0) || !std::isfinite(r2)) throw Error(ErrorCode::Collinear, "no finite circle fits");

  CircleFit fit;
  fit.radius = std::sqrt(r2);
  fit.center = pf.centroid + u * cx + v * cy;

  double turn = 0.0;
  double prev = std::atan2(local[0].y - cy, local[0].x - cx);
  for (std::size_t i = 1; i < local.size(); ++i) {
    const double cur = std::atan2(local[i].y - cy, local[i].x - cx);
    double d = cur - prev;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    turn += d;
    prev = cur;
  }
  if (turn < 0.0) axis = -axis;  // right-handed about the direction of travel
  fit.axis = axis;
  fit.angularExtent = std::min(std::abs(turn), 2.0 * std::numbers::pi);

  double sq = 0.0;
  for (const Point3& p : points) {
    const Vec3 d = p - fit.center;
    const double h = dot(d, axis);
    const double rho = norm(d - axis * h);
    sq += h * h + (rho - fit.radius) * (rho - fit.radius);
  }
  fit.residual = std::sqrt(sq / static_cast<double>(points.size()));
  return fit;
}

LineFit fitLine3D(std::span<const Point3> points) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "line fit needs 2 points");
  LineFit fit;
  if (points.size() == 2) {
    fit.point = (points[0] + points[1]) * 0.5;
    fit.direction = normalized(points[1] - points[0]);
    return fit;
  }
  const PlaneFrame pf = principalAxes(points);
  fit.point = pf.centroid;
  fit.direction = normalized(pf.major);
  if (dot(fit.direction, points.back() - points.front()) < 0.0) fit.direction = -fit.direction;
  double sq = 0.0;
  for (const Point3& p : points) {
    const Vec3 d = p - fit.point;
    sq += squaredNorm(d - fit.direction * dot(d, fit.direction));
  }
  fit.residual = std::sqrt(sq / static_cast<double>(points.size()));
  return fit;
}

namespace {

Segment straightSegment(std::span<const Point3> pts, std::size_t first, std::size_t last) {
  const LineFit lf = fitLine3D(pts.subspan(first, last - first + 1));
  Segment s;
  s.first = first;
  s.last = last;
  s.kind = StraightPart{lf.point, lf.direction};
  s.residual = lf.residual;
  return s;
}

void fitArc(std::span<const Point3> pts, std::size_t first, std::size_t last,
            const DecomposeParams& params, bool flagged, std::vector<Segment>& out) {
  const auto piece = pts.subspan(first, last - first + 1);
  CircleFit cf;
  try {
    cf = fitCircle3D(piece);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Collinear) throw;
    Segment s = straightSegment(pts, first, last);
    s.flagged = flagged;
    out.push_back(s);
    return;
  }
  const double limit = params.maxArcResidual * params.gridstep;
  const std::size_t count = last - first + 1;
  if (cf.residual > limit && count >= 2 * params.detect.minLen) {
    const std::size_t mid = first + (last - first) / 2;
    fitArc(pts, first, mid, params, true, out);
    fitArc(pts, mid, last, params, true, out);
    return;
  }
  Segment s;
  s.first = first;
  s.last = last;
  s.kind = ArcPart{cf.center, cf.radius, cf.axis, cf.angularExtent};
  s.residual = cf.residual;
  s.flagged = flagged || cf.residual > limit;
  out.push_back(s);
}

}  // namespace

Decomposition decomposeCenterline(const Centerline& cl, const DecomposeParams& params) {
  const std::span<const Point3> pts(cl.points);
  Decomposition dec;
  if (pts.size() < 2) return dec;
  if (pts.size() == 2) {
    dec.segments.push_back(straightSegment(pts, 0, 1));
    return dec;
  }
  const Decomposition labels = detectArcsAndLines(tangentSpaceTransform(pts), params.detect);
  for (const Segment& l : labels.segments) {
    if (l.isArc()) fitArc(pts, l.first, l.last, params, false, dec.segments);
    else dec.segments.push_back(straightSegment(pts, l.first, l.last));
  }
  return dec;
}

}  // namespace tubeaxis
