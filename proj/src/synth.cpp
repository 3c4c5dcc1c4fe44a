#include "tubeaxis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "tubeaxis/spatial.hpp"

namespace tubeaxis {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double parseReal(const std::string& tok, const std::string& piece) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number in tube piece '" + piece + "'");
  }
}

}  // namespace

std::vector<PieceSpec> parsePieces(const std::string& text) {
  std::vector<PieceSpec> pieces;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::vector<std::string> parts;
    std::stringstream ps(piece);
    std::string part;
    while (std::getline(ps, part, ':')) parts.push_back(part);
    if (parts.empty()) continue;
    if ((parts[0] == "S" || parts[0] == "s") && parts.size() == 2) {
      pieces.push_back(StraightSpec{parseReal(parts[1], piece)});
    } else if ((parts[0] == "A" || parts[0] == "a") && (parts.size() == 3 || parts.size() == 4)) {
      pieces.push_back(ArcSpec{parseReal(parts[1], piece), parseReal(parts[2], piece) * kDeg,
                               parts.size() == 4 ? parseReal(parts[3], piece) * kDeg : 0.0});
    } else {
      throw Error(ErrorCode::ParseError, "expected S:len or A:radius:deg[:turn], got '" + piece + "'");
    }
  }
  if (pieces.empty()) throw Error(ErrorCode::ParseError, "empty tube description");
  return pieces;
}

SyntheticTube genTube(const TubeSpec& spec) {
  if (spec.pieces.empty()) throw Error(ErrorCode::InvalidArgument, "tube spec is empty");
  if (!(spec.radius > 0.0) || !(spec.meshStep > 0.0))
    throw Error(ErrorCode::InvalidArgument, "radius and meshStep must be positive");
  for (const PieceSpec& p : spec.pieces)
    if (const auto* a = std::get_if<ArcSpec>(&p); a && !(a->radius > spec.radius))
      throw Error(ErrorCode::SelfIntersecting, "arc radius must exceed the tube radius");

  SyntheticTube out;
  TubeTruth& truth = out.truth;
  Vec3 t = normalized(spec.tangent);
  Vec3 n = normalized(spec.normal - t * dot(spec.normal, t));
  Vec3 b = cross(t, n);
  Vec3 ringU = n, ringV = b;
  Point3 p = spec.start;

  auto push = [&](const Point3& q, const Vec3& tq, const Vec3& u, const Vec3& v, PieceKind kind) {
    truth.points.push_back(q);
    truth.tangents.push_back(tq);
    truth.ringU.push_back(u);
    truth.ringV.push_back(v);
    truth.kinds.push_back(kind);
  };

  for (std::size_t k = 0; k < spec.pieces.size(); ++k) {
    const PieceSpec& piece = spec.pieces[k];
    const PieceKind kind = std::holds_alternative<ArcSpec>(piece) ? PieceKind::Arc : PieceKind::Straight;
    if (k == 0) {
      push(p, t, ringU, ringV, kind);
    } else {
      truth.junctions.push_back(truth.points.size() - 1);
      truth.kinds.back() = kind;
    }
    if (const auto* s = std::get_if<StraightSpec>(&piece)) {
      const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s->length / spec.meshStep - 1e-9)));
      const Point3 p0 = p;
      for (std::size_t i = 1; i <= steps; ++i)
        push(p0 + t * (s->length * static_cast<double>(i) / static_cast<double>(steps)), t, ringU, ringV, kind);
      p = truth.points.back();
    } else {
      const auto& a = std::get<ArcSpec>(piece);
      const double c = std::cos(a.planeTurn), sn = std::sin(a.planeTurn);
      const Vec3 n0 = n * c + b * sn;
      const Vec3 b0 = cross(t, n0);
      n = n0;
      b = b0;
      // ring frame coordinates in the (n, b) basis stay fixed along the arc
      const double uN = dot(ringU, n), uB = dot(ringU, b);
      const double vN = dot(ringV, n), vB = dot(ringV, b);
      const Point3 center = p + n * a.radius;
      const Vec3 t0 = t;
      const auto steps = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(a.radius * a.angle / spec.meshStep - 1e-9)));
      for (std::size_t i = 1; i <= steps; ++i) {
        const double phi = a.angle * static_cast<double>(i) / static_cast<double>(steps);
        const Vec3 tp = n0 * std::sin(phi) + t0 * std::cos(phi);
        const Vec3 np = n0 * std::cos(phi) - t0 * std::sin(phi);
        const Point3 q = center - np * a.radius;
        push(q, tp, np * uN + b * uB, np * vN + b * vB, kind);
      }
      p = truth.points.back();
      t = truth.tangents.back();
      n = n0 * std::cos(a.angle) - t0 * std::sin(a.angle);
      ringU = truth.ringU.back();
      ringV = truth.ringV.back();
    }
  }

  TriMesh& mesh = out.mesh;
  const int sidesI = std::max(8, static_cast<int>(std::lround(2.0 * std::numbers::pi * spec.radius / spec.meshStep)));
  const auto sides = static_cast<std::uint32_t>(sidesI);
  const std::size_t rings = truth.points.size();
  for (std::size_t i = 0; i < rings; ++i) {
    for (std::uint32_t k = 0; k < sides; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / sides;
      mesh.vertices.push_back(truth.points[i] +
                              (truth.ringU[i] * std::cos(theta) + truth.ringV[i] * std::sin(theta)) * spec.radius);
    }
  }
  for (std::uint32_t i = 0; i + 1 < rings; ++i) {
    const std::uint32_t r0 = i * sides, r1 = (i + 1) * sides;
    for (std::uint32_t k = 0; k < sides; ++k) {
      const std::uint32_t k1 = (k + 1) % sides;
      mesh.faces.push_back({r0 + k, r1 + k1, r1 + k});
      mesh.faces.push_back({r0 + k, r0 + k1, r1 + k1});
    }
  }
  if (spec.capEnds) {
    const auto c0 = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(truth.points.front());
    const auto c1 = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(truth.points.back());
    const auto last = static_cast<std::uint32_t>((rings - 1) * sides);
    for (std::uint32_t k = 0; k < sides; ++k) {
      const std::uint32_t k1 = (k + 1) % sides;
      mesh.faces.push_back({c0, k1, k});
      mesh.faces.push_back({c1, last + k, last + k1});
    }
  }
  return out;
}

TriMesh genSphere(const Point3& center, double radius, int rings, int segments) {
  if (rings < 2 || segments < 3) throw Error(ErrorCode::InvalidArgument, "sphere too coarse");
  TriMesh mesh;
  mesh.vertices.push_back(center + Vec3(0, 0, radius));
  for (int r = 1; r < rings; ++r) {
    const double polar = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double az = 2.0 * std::numbers::pi * s / segments;
      mesh.vertices.push_back(center + Vec3(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                                            std::cos(polar)) * radius);
    }
  }
  mesh.vertices.push_back(center - Vec3(0, 0, radius));
  const auto seg = static_cast<std::uint32_t>(segments);
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  auto ring = [&](int r, std::uint32_t s) { return 1 + static_cast<std::uint32_t>(r - 1) * seg + s % seg; };
  for (std::uint32_t s = 0; s < seg; ++s) mesh.faces.push_back({0, ring(1, s), ring(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r)
    for (std::uint32_t s = 0; s < seg; ++s) {
      mesh.faces.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      mesh.faces.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  for (std::uint32_t s = 0; s < seg; ++s) mesh.faces.push_back({south, ring(rings - 1, s + 1), ring(rings - 1, s)});
  return mesh;
}

namespace {

TriMesh keepFaces(const TriMesh& mesh, const std::vector<std::uint8_t>& keep) {
  TriMesh out;
  std::vector<std::uint32_t> remap(mesh.vertices.size(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep[f]) continue;
    std::array<std::uint32_t, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      const std::uint32_t v = mesh.faces[f][static_cast<std::size_t>(c)];
      if (remap[v] == std::numeric_limits<std::uint32_t>::max()) {
        remap[v] = static_cast<std::uint32_t>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[v]);
      }
      tri[static_cast<std::size_t>(c)] = remap[v];
    }
    out.faces.push_back(tri);
  }
  return out;
}

Point3 faceCenter(const TriMesh& m, std::size_t f) {
  const auto& t = m.faces[f];
  return (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0;
}

Vec3 faceNormalRaw(const TriMesh& m, std::size_t f) {
  const auto& t = m.faces[f];
  return cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
}

}  // namespace

TriMesh degrade(const TriMesh& mesh, const DegradeMode& mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t nf = mesh.faces.size();
  std::vector<std::uint8_t> keep(nf, 1);

  if (const auto* noise = std::get_if<NoiseMode>(&mode)) {
    TriMesh out = mesh;
    if (noise->sigma == 0.0) return out;
    std::normal_distribution<double> gauss(0.0, noise->sigma);
    for (Point3& v : out.vertices) {
      const double dx = gauss(rng), dy = gauss(rng), dz = gauss(rng);
      v += Vec3(dx, dy, dz);
    }
    return out;
  }
  if (const auto* scan = std::get_if<PartialScanMode>(&mode)) {
    for (std::size_t f = 0; f < nf; ++f) keep[f] = dot(faceNormalRaw(mesh, f), scan->viewDir) < 0.0;
    return keepFaces(mesh, keep);
  }
  if (const auto* sector = std::get_if<SectorRemovalMode>(&mode)) {
    const TubeTruth& tr = sector->truth;
    if (tr.points.empty()) throw Error(ErrorCode::InvalidArgument, "sector removal needs a truth axis");
    double spacing = 0.0;
    for (std::size_t i = 0; i + 1 < tr.points.size(); ++i)
      spacing = std::max(spacing, distance(tr.points[i], tr.points[i + 1]));
    for (std::size_t f = 0; f < nf; ++f) {
      const Point3 c = faceCenter(mesh, f);
      std::size_t best = 0;
      double bestD = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tr.points.size(); ++i) {
        const double d = squaredNorm(c - tr.points[i]);
        if (d < bestD) {
          bestD = d;
          best = i;
        }
      }
      const Vec3 d = c - tr.points[best];
      const double angle = std::atan2(dot(d, tr.ringV[best]), dot(d, tr.ringU[best]));
      const bool inside = sector->fromAngle <= sector->toAngle
                              ? (angle >= sector->fromAngle && angle <= sector->toAngle)
                              : (angle >= sector->fromAngle || angle <= sector->toAngle);
      keep[f] = !inside;
    }
    return keepFaces(mesh, keep);
  }
  const auto& holes = std::get<HolesMode>(mode);
  if (nf == 0 || holes.count <= 0) return mesh;
  std::vector<Point3> centers(nf);
  for (std::size_t f = 0; f < nf; ++f) centers[f] = faceCenter(mesh, f);
  std::uniform_int_distribution<std::size_t> pick(0, nf - 1);
  const PointBuckets index(centers, std::max(holes.radius, 1e-9));
  for (int h = 0; h < holes.count; ++h) {
    const Point3 c = centers[pick(rng)];
    index.forEachWithin(c, holes.radius, [&](std::size_t f) { keep[f] = 0; });
  }
  return keepFaces(mesh, keep);
}

namespace {

/// Local (u, v, h) coordinates for a view along `axis`, matching HeightMap::toWorld.
Point3 toView(const Point3& p, int axis) {
  switch (axis) {
    case 0: return {p.y, p.z, p.x};
    case 1: return {p.z, p.x, p.y};
    default: return p;
  }
}

}  // namespace

VoxelSet voxelize(const TriMesh& mesh, double gridstep) {
  if (!(gridstep > 0.0)) throw Error(ErrorCode::InvalidArgument, "gridstep must be positive");
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no faces");
  Point3 lo, hi;
  mesh.boundingBox(lo, hi);
  const auto j0 = static_cast<std::int64_t>(std::ceil(lo.y / gridstep));
  const auto j1 = static_cast<std::int64_t>(std::floor(hi.y / gridstep));
  const auto k0 = static_cast<std::int64_t>(std::ceil(lo.z / gridstep));
  const auto k1 = static_cast<std::int64_t>(std::floor(hi.z / gridstep));
  VoxelSet out;
  if (j1 < j0 || k1 < k0) return out;
  const auto ny = static_cast<std::size_t>(j1 - j0 + 1);
  const auto nz = static_cast<std::size_t>(k1 - k0 + 1);
  // rays are nudged off the lattice so they never graze edges or vertices
  const double dy = 1.3e-7 * gridstep, dz = 0.7e-7 * gridstep;
  std::vector<std::vector<double>> crossings(ny * nz);
  for (const auto& f : mesh.faces) {
    const Point3& a = mesh.vertices[f[0]];
    const Point3& b = mesh.vertices[f[1]];
    const Point3& c = mesh.vertices[f[2]];
    const double det = (b.y - a.y) * (c.z - a.z) - (c.y - a.y) * (b.z - a.z);
    if (std::abs(det) < 1e-300) continue;
    const double ylo = std::min({a.y, b.y, c.y}), yhi = std::max({a.y, b.y, c.y});
    const double zlo = std::min({a.z, b.z, c.z}), zhi = std::max({a.z, b.z, c.z});
    const auto jb = std::max(j0, static_cast<std::int64_t>(std::floor((ylo - dy) / gridstep)));
    const auto je = std::min(j1, static_cast<std::int64_t>(std::ceil((yhi - dy) / gridstep)));
    const auto kb = std::max(k0, static_cast<std::int64_t>(std::floor((zlo - dz) / gridstep)));
    const auto ke = std::min(k1, static_cast<std::int64_t>(std::ceil((zhi - dz) / gridstep)));
    for (std::int64_t k = kb; k <= ke; ++k)
      for (std::int64_t j = jb; j <= je; ++j) {
        const double y = static_cast<double>(j) * gridstep + dy;
        const double z = static_cast<double>(k) * gridstep + dz;
        const double s = ((y - a.y) * (c.z - a.z) - (c.y - a.y) * (z - a.z)) / det;
        const double t = ((b.y - a.y) * (z - a.z) - (y - a.y) * (b.z - a.z)) / det;
        if (s < 0.0 || t < 0.0 || s + t > 1.0) continue;
        const double x = a.x + s * (b.x - a.x) + t * (c.x - a.x);
        crossings[static_cast<std::size_t>(j - j0) + ny * static_cast<std::size_t>(k - k0)].push_back(x);
      }
  }
  std::size_t hitRows = 0, oddRows = 0;
  for (std::size_t r = 0; r < crossings.size(); ++r) {
    auto& xs = crossings[r];
    if (xs.empty()) continue;
    ++hitRows;
    if (xs.size() % 2 != 0) {
      ++oddRows;
      continue;
    }
    std::sort(xs.begin(), xs.end());
    const std::int64_t j = j0 + static_cast<std::int64_t>(r % ny);
    const std::int64_t k = k0 + static_cast<std::int64_t>(r / ny);
    for (std::size_t q = 0; q + 1 < xs.size(); q += 2) {
      const auto ib = static_cast<std::int64_t>(std::ceil(xs[q] / gridstep));
      const auto ie = static_cast<std::int64_t>(std::floor(xs[q + 1] / gridstep));
      for (std::int64_t i = ib; i <= ie; ++i) out.points.push_back({i, j, k});
    }
  }
  if (static_cast<double>(oddRows) > 0.001 * static_cast<double>(hitRows))
    throw Error(ErrorCode::NotClosed, std::to_string(oddRows) + " of " + std::to_string(hitRows) +
                                          " rays cross the surface an odd number of times");
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
  return out;
}

HeightMap renderHeightMap(const TriMesh& mesh, int viewAxis, double resolution) {
  if (viewAxis < 0 || viewAxis > 2) throw Error(ErrorCode::InvalidArgument, "view axis must be 0, 1 or 2");
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no faces");
  std::vector<Point3> local(mesh.vertices.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  double ulo = inf, uhi = -inf, vlo = inf, vhi = -inf;
  for (std::size_t i = 0; i < local.size(); ++i) {
    local[i] = toView(mesh.vertices[i], viewAxis);
    ulo = std::min(ulo, local[i].x);
    uhi = std::max(uhi, local[i].x);
    vlo = std::min(vlo, local[i].y);
    vhi = std::max(vhi, local[i].y);
  }
  HeightMap hm;
  hm.viewAxis = viewAxis;
  hm.spacing = resolution;
  hm.originU = (std::floor(ulo / resolution) - 1.0) * resolution;
  hm.originV = (std::floor(vlo / resolution) - 1.0) * resolution;
  hm.width = static_cast<std::int64_t>(std::ceil((uhi - hm.originU) / resolution)) + 2;
  hm.height = static_cast<std::int64_t>(std::ceil((vhi - hm.originV) / resolution)) + 2;
  hm.heights.assign(static_cast<std::size_t>(hm.width * hm.height), std::numeric_limits<double>::quiet_NaN());

  for (const auto& f : mesh.faces) {
    const Point3& a = local[f[0]];
    const Point3& b = local[f[1]];
    const Point3& c = local[f[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (std::abs(det) < 1e-300) continue;
    const auto ib = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((std::min({a.x, b.x, c.x}) - hm.originU) / resolution)));
    const auto ie = std::min<std::int64_t>(hm.width - 1, static_cast<std::int64_t>(std::ceil((std::max({a.x, b.x, c.x}) - hm.originU) / resolution)));
    const auto jb = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((std::min({a.y, b.y, c.y}) - hm.originV) / resolution)));
    const auto je = std::min<std::int64_t>(hm.height - 1, static_cast<std::int64_t>(std::ceil((std::max({a.y, b.y, c.y}) - hm.originV) / resolution)));
    for (std::int64_t j = jb; j <= je; ++j)
      for (std::int64_t i = ib; i <= ie; ++i) {
        const double u = hm.originU + static_cast<double>(i) * resolution;
        const double v = hm.originV + static_cast<double>(j) * resolution;
        const double s = ((u - a.x) * (c.y - a.y) - (c.x - a.x) * (v - a.y)) / det;
        const double t = ((b.x - a.x) * (v - a.y) - (u - a.x) * (b.y - a.y)) / det;
        if (s < -1e-12 || t < -1e-12 || s + t > 1.0 + 1e-12) continue;
        const double h = a.z + s * (b.z - a.z) + t * (c.z - a.z);
        double& cell = hm.at(i, j);
        if (std::isnan(cell) || h > cell) cell = h;
      }
  }
  double floorHeight = inf;
  for (double h : hm.heights)
    if (!std::isnan(h)) floorHeight = std::min(floorHeight, h);
  if (!std::isfinite(floorHeight)) floorHeight = 0.0;
  for (double& h : hm.heights)
    if (std::isnan(h)) h = floorHeight;
  return hm;
}

}  // namespace tubeaxis
