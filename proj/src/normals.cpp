#include "tubeaxis/normals.hpp"

#include <algorithm>
#include <set>

#include <Eigen/Eigenvalues>

#include "tubeaxis/accumulate.hpp"
#include "tubeaxis/spatial.hpp"

namespace tubeaxis {

OrientedFaceSet faceNormals(const TriMesh& mesh, int threads) {
  const auto n = static_cast<std::int64_t>(mesh.faces.size());
  OrientedFaceSet out;
  out.centers.resize(mesh.faces.size());
  out.normals.resize(mesh.faces.size());
  out.areas.resize(mesh.faces.size());
  bool degenerate = false;
#pragma omp parallel for num_threads(std::max(threads, 1)) if (threads > 1) schedule(static)
  for (std::int64_t f = 0; f < n; ++f) {
    const auto& t = mesh.faces[static_cast<std::size_t>(f)];
    const Point3& a = mesh.vertices[t[0]];
    const Point3& b = mesh.vertices[t[1]];
    const Point3& c = mesh.vertices[t[2]];
    const Vec3 nrm = cross(b - a, c - a);
    const double len = norm(nrm);
    const auto i = static_cast<std::size_t>(f);
    out.centers[i] = (a + b + c) / 3.0;
    out.areas[i] = 0.5 * len;
    if (len > 2e-12) {
      out.normals[i] = nrm / len;
    } else {
#pragma omp atomic write
      degenerate = true;
    }
  }
  if (degenerate) throw Error(ErrorCode::DegenerateFace, "mesh contains a zero-area face");
  return out;
}

OrientedFaceSet digitalSurfaceFacets(const VoxelSet& voxels) {
  if (voxels.points.empty()) throw Error(ErrorCode::EmptyInput, "voxel set is empty");
  const std::set<Index3> occupied(voxels.points.begin(), voxels.points.end());
  static constexpr std::array<std::array<int, 3>, 6> kAxes{
      {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};
  OrientedFaceSet out;
  for (const Index3& p : voxels.points) {
    for (const auto& a : kAxes) {
      const Index3 nb{p.i + a[0], p.j + a[1], p.k + a[2]};
      if (occupied.count(nb)) continue;
      const Vec3 dir(a[0], a[1], a[2]);
      out.centers.push_back(Vec3(static_cast<double>(p.i), static_cast<double>(p.j),
                                 static_cast<double>(p.k)) +
                            0.5 * dir);
      out.normals.push_back(dir);
      out.areas.push_back(1.0);
    }
  }
  return out;
}

OrientedFaceSet estimateDigitalNormals(const OrientedFaceSet& facets, double radius, int threads) {
  if (!(radius >= 2.0))
    throw Error(ErrorCode::InvalidArgument, "normal estimation radius must be >= 2 voxels");
  OrientedFaceSet out = facets;
  const PointBuckets buckets(facets.centers, radius);
  const auto n = static_cast<std::int64_t>(facets.size());
#pragma omp parallel for num_threads(std::max(threads, 1)) if (threads > 1) schedule(dynamic, 256)
  for (std::int64_t f = 0; f < n; ++f) {
    const auto i = static_cast<std::size_t>(f);
    const Point3& c = facets.centers[i];
    const Vec3& provisional = facets.normals[i];
    // offsets relative to the query keep the estimate translation invariant
    std::vector<Vec3> offsets;
    buckets.forEachWithin(c, radius, [&](std::size_t j) {
      if (dot(facets.normals[j], provisional) >= 0.0) offsets.push_back(facets.centers[j] - c);
    });
    Vec3 normal = provisional;
    if (offsets.size() >= 3) {
      Vec3 mean;
      for (const Vec3& o : offsets) mean += o;
      mean = mean / static_cast<double>(offsets.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (const Vec3& o : offsets) {
        const Eigen::Vector3d d(o.x - mean.x, o.y - mean.y, o.z - mean.z);
        cov += d * d.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      const auto& ev = eig.eigenvalues();
      // isotropic neighbourhoods carry no plane information
      if (ev(1) > 0.0 && ev(0) <= 0.5 * ev(1)) {
        const Eigen::Vector3d e = eig.eigenvectors().col(0);
        normal = normalized(Vec3(e(0), e(1), e(2)));
        if (dot(normal, provisional) < 0.0) normal = -normal;
      }
    }
    out.normals[i] = -normal;
  }
  return out;
}

OrientedFaceSet digitalSurfaceFaces(const VoxelSet& voxels, double radius, int threads) {
  return estimateDigitalNormals(digitalSurfaceFacets(voxels), radius, threads);
}

OrientedFaceSet flipped(OrientedFaceSet faces) {
  for (Vec3& n : faces.normals) n = -n;
  return faces;
}

OrientedFaceSet orientInward(const OrientedFaceSet& faces, Orientation mode, double accRadius,
                             double gridstep, bool* wasFlipped) {
  bool flip = false;
  switch (mode) {
    case Orientation::Keep: break;
    case Orientation::Flip: flip = true; break;
    case Orientation::Auto: {
      if (faces.empty()) throw Error(ErrorCode::EmptyInput, "no faces to orient");
      AccumulationParams probe;
      probe.gridstep = 2.0 * gridstep;
      probe.radius = accRadius;
      probe.epsilon = 0.0;
      const GridDomain domain = accumulationDomain(faces, probe);
      const auto keep = computeAccumulationSerial(faces, probe, domain).maxAcc;
      const auto flip_ = computeAccumulationSerial(flipped(faces), probe, domain).maxAcc;
      flip = flip_ > keep;
      break;
    }
  }
  if (wasFlipped) *wasFlipped = flip;
  return flip ? flipped(faces) : faces;
}

}  // namespace tubeaxis
