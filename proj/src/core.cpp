#include "tubeaxis/core.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace tubeaxis {

const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::SeedInvalid: return "SeedInvalid";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::CoincidentPoint: return "CoincidentPoint";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::Collinear: return "Collinear";
    case ErrorCode::DegenerateTangent: return "DegenerateTangent";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 1e-12)) throw Error(ErrorCode::ZeroDirection, "cannot normalize a null vector");
  return v / n;
}

double angleBetween(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 and pi
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

OrthonormalFrame frameFromDirection(const Vec3& dir, const Point3& center) {
  if (!(norm(dir) > 1e-12)) throw Error(ErrorCode::ZeroDirection, "frame direction is null");
  const Vec3 w = normalized(dir);
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(w[a]) < std::abs(w[axis])) axis = a;
  Vec3 e;
  e[axis] = 1.0;
  const Vec3 u = normalized(cross(w, e));
  const Vec3 v = cross(w, u);
  return {center, u, v, w};
}

bool GridDomain::contains(const Point3& p) const { return digitize(p, *this).has_value(); }

Index3 GridDomain::unlinear(std::size_t offset) const {
  const auto o = static_cast<std::int64_t>(offset);
  return {o % dims[0], (o / dims[0]) % dims[1], o / (dims[0] * dims[1])};
}

GridDomain GridDomain::enclosing(const Point3& lo, const Point3& hi, double gridstep,
                                 double margin) {
  if (!(gridstep > 0.0)) throw Error(ErrorCode::InvalidArgument, "gridstep must be positive");
  GridDomain d;
  d.gridstep = gridstep;
  d.origin = lo - Vec3(margin, margin, margin);
  for (int a = 0; a < 3; ++a) {
    const double extent = (hi[a] - lo[a]) + 2.0 * margin;
    d.dims[static_cast<std::size_t>(a)] =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(extent / gridstep)) + 1);
  }
  return d;
}

Index3 digitizeUnchecked(const Point3& p, const GridDomain& domain) {
  const Vec3 r = (p - domain.origin) / domain.gridstep;
  return {static_cast<std::int64_t>(std::floor(r.x)), static_cast<std::int64_t>(std::floor(r.y)),
          static_cast<std::int64_t>(std::floor(r.z))};
}

std::optional<Index3> digitize(const Point3& p, const GridDomain& domain) {
  const Vec3 r = (p - domain.origin) / domain.gridstep;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(r[a]);
    if (!(f >= 0.0) || f >= static_cast<double>(domain.dims[static_cast<std::size_t>(a)]))
      return std::nullopt;
  }
  return digitizeUnchecked(p, domain);
}

double sampleTrilinear(const ScalarGrid3& grid, const Point3& p) {
  const GridDomain& d = grid.domain();
  const Vec3 r = (p - d.origin) / d.gridstep - Vec3(0.5, 0.5, 0.5);
  const double fx = std::floor(r.x), fy = std::floor(r.y), fz = std::floor(r.z);
  const double tx = r.x - fx, ty = r.y - fy, tz = r.z - fz;
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
             iz = static_cast<std::int64_t>(fz);
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const Index3 idx{ix + (c & 1), iy + ((c >> 1) & 1), iz + ((c >> 2) & 1)};
    if (!d.contains(idx)) continue;
    const double wgt = ((c & 1) ? tx : 1.0 - tx) * (((c >> 1) & 1) ? ty : 1.0 - ty) *
                       (((c >> 2) & 1) ? tz : 1.0 - tz);
    acc += wgt * static_cast<double>(grid[idx]);
  }
  return acc;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw grid output assumes a little-endian host");

nlohmann::ordered_json header(const GridDomain& d, const char* dtype) {
  nlohmann::ordered_json j;
  j["dims"] = {d.dims[0], d.dims[1], d.dims[2]};
  j["origin"] = {d.origin.x, d.origin.y, d.origin.z};
  j["gridstep"] = d.gridstep;
  j["dtype"] = dtype;
  j["layout"] = "x-fastest";
  return j;
}

void writeHeader(const nlohmann::ordered_json& j, const std::string& stem) {
  std::ofstream out(stem + ".json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + stem + ".json");
  out << j.dump(2) << '\n';
}

void writeRaw(const void* data, std::size_t bytes, const std::string& stem) {
  std::ofstream out(stem + ".raw", std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + stem + ".raw");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw Error(ErrorCode::IoError, "short write on " + stem + ".raw");
}

}  // namespace

void writeGrid(const ScalarGrid3& grid, const std::string& stem) {
  writeHeader(header(grid.domain(), "uint32"), stem);
  writeRaw(grid.values().data(), grid.values().size() * sizeof(std::uint32_t), stem);
}

void writeGrid(const VectorGrid3& grid, const std::string& stem) {
  writeHeader(header(grid.domain(), "float64x3"), stem);
  std::vector<double> flat;
  flat.reserve(grid.values().size() * 3);
  for (const Vec3& v : grid.values()) {
    flat.push_back(v.x);
    flat.push_back(v.y);
    flat.push_back(v.z);
  }
  writeRaw(flat.data(), flat.size() * sizeof(double), stem);
}

ScalarGrid3 readScalarGrid(const std::string& stem) {
  std::ifstream hin(stem + ".json");
  if (!hin) throw Error(ErrorCode::IoError, "cannot read " + stem + ".json");
  nlohmann::json j;
  try {
    hin >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (j.value("dtype", "") != "uint32")
    throw Error(ErrorCode::UnsupportedFormat, "expected uint32 grid");
  GridDomain d;
  for (std::size_t a = 0; a < 3; ++a) {
    d.dims[a] = j["dims"][a].get<std::int64_t>();
    d.origin[static_cast<int>(a)] = j["origin"][a].get<double>();
  }
  d.gridstep = j["gridstep"].get<double>();
  ScalarGrid3 grid(d);
  std::ifstream rin(stem + ".raw", std::ios::binary);
  if (!rin) throw Error(ErrorCode::IoError, "cannot read " + stem + ".raw");
  rin.read(reinterpret_cast<char*>(grid.values().data()),
           static_cast<std::streamsize>(grid.values().size() * sizeof(std::uint32_t)));
  if (rin.gcount() != static_cast<std::streamsize>(grid.values().size() * sizeof(std::uint32_t)))
    throw Error(ErrorCode::ParseError, "raw grid shorter than header dims");
  return grid;
}

}  // namespace tubeaxis
