#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubeaxis {

/// Failure categories raised by the library. The CLI maps them to exit codes.
enum class ErrorCode {
  ZeroDirection,
  ParseError,
  UnsupportedFormat,
  IoError,
  TooSmall,
  EmptyInput,
  DegenerateFace,
  DomainTooSmall,
  SeedInvalid,
  TooFewPoints,
  CoincidentPoint,
  DuplicatePoint,
  Collinear,
  DegenerateTangent,
  SelfIntersecting,
  NotClosed,
  InvalidArgument,
};

const char* errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(errorCodeName(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
constexpr double squaredNorm(const Vec3& v) { return dot(v, v); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

/// Unit vector along v. Throws ZeroDirection when |v| <= 1e-12.
Vec3 normalized(const Vec3& v);

/// Unsigned angle between two non-zero vectors, in [0, pi].
double angleBetween(const Vec3& a, const Vec3& b);

struct Index3 {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  constexpr bool operator==(const Index3&) const = default;
  constexpr auto operator<=>(const Index3&) const = default;
};

struct OrthonormalFrame {
  Point3 center;
  Vec3 u;
  Vec3 v;
  Vec3 w;
};

/// Deterministic orthonormal frame whose w axis is the normalized input.
/// u = normalize(w x e) with e the canonical axis least aligned with w
/// (ties resolved in x, y, z order), v = w x u.
OrthonormalFrame frameFromDirection(const Vec3& w, const Point3& center = {});

struct GridDomain {
  Point3 origin;
  double gridstep = 1.0;
  std::array<std::int64_t, 3> dims{1, 1, 1};

  std::size_t voxelCount() const {
    return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  }
  bool contains(const Index3& idx) const {
    return idx.i >= 0 && idx.j >= 0 && idx.k >= 0 && idx.i < dims[0] && idx.j < dims[1] &&
           idx.k < dims[2];
  }
  bool contains(const Point3& p) const;
  /// x-fastest linear offset of an in-domain index.
  std::size_t linear(const Index3& idx) const {
    return static_cast<std::size_t>(idx.i + dims[0] * (idx.j + dims[1] * idx.k));
  }
  Index3 unlinear(std::size_t offset) const;
  Point3 voxelCenter(const Index3& idx) const {
    return origin + Vec3(gridstep * (static_cast<double>(idx.i) + 0.5),
                         gridstep * (static_cast<double>(idx.j) + 0.5),
                         gridstep * (static_cast<double>(idx.k) + 0.5));
  }

  /// Bounding box [lo, hi] inflated by `margin` world units on every side.
  static GridDomain enclosing(const Point3& lo, const Point3& hi, double gridstep, double margin);
};

/// floor((p - origin) / gridstep) per axis; nullopt when outside the domain.
std::optional<Index3> digitize(const Point3& p, const GridDomain& domain);

/// Unbounded variant, no domain check.
Index3 digitizeUnchecked(const Point3& p, const GridDomain& domain);

template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  explicit Grid3(GridDomain domain, T fill = T{})
      : domain_(domain), values_(domain.voxelCount(), fill) {}

  const GridDomain& domain() const { return domain_; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  T& operator[](const Index3& idx) { return values_[domain_.linear(idx)]; }
  const T& operator[](const Index3& idx) const { return values_[domain_.linear(idx)]; }
  T& at(std::size_t offset) { return values_[offset]; }
  const T& at(std::size_t offset) const { return values_[offset]; }

 private:
  GridDomain domain_;
  std::vector<T> values_;
};

using ScalarGrid3 = Grid3<std::uint32_t>;
using VectorGrid3 = Grid3<Vec3>;

/// Trilinear sample between voxel centers; samples outside the domain read 0.
double sampleTrilinear(const ScalarGrid3& grid, const Point3& p);

/// Writes `<stem>.json` (dims, origin, gridstep, dtype) and `<stem>.raw`
/// (little-endian, x fastest, then y, then z).
void writeGrid(const ScalarGrid3& grid, const std::string& stem);
void writeGrid(const VectorGrid3& grid, const std::string& stem);
ScalarGrid3 readScalarGrid(const std::string& stem);

}  // namespace tubeaxis
