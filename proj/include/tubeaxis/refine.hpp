#pragma once

#include <span>
#include <vector>

#include "tubeaxis/centerline.hpp"
#include "tubeaxis/normals.hpp"
#include "tubeaxis/spatial.hpp"

namespace tubeaxis {

struct RefineParams {
  double radius = 1.0;     // known tube radius R
  double accRadius = 1.1;  // association distance bound
  double trackStep = 1.0;  // slab thickness along the local tangent
  double epsilonO = 0.001;
  int maxIter = 1000;
  bool areaWeighting = false;
  double initialStep = 0.5;  // scaled by 1 / sum of weights, applied to the force
};

/// Surface points associated with centerline point `index`.
struct SectionAssociation {
  std::size_t index = 0;
  std::vector<Point3> points;
  std::vector<double> weights;  // face areas when area weighting is on, else 1
};

/// Face centers within accRadius of C_i whose offset along d_i lies in
/// (-trackStep/2, +trackStep/2]. Throws TooFewPoints below 3 points.
SectionAssociation sectionPoints(const Centerline& cl, const OrientedFaceSet& faces,
                                 const PointBuckets& index, std::size_t i, const RefineParams& params);
SectionAssociation sectionPoints(const Centerline& cl, const OrientedFaceSet& faces, std::size_t i,
                                 const RefineParams& params);

struct EnergyEval {
  double energy = 0.0;
  Vec3 gradient;
  Vec3 force;  // sum of P_j M_j, equal to -gradient / 2
};

/// E = sum w (|CM|-R)^2, its gradient, and the elastic force. `weights`
/// may be empty (all ones). Throws CoincidentPoint if some M equals C.
EnergyEval energyAndGradient(const Point3& c, std::span<const Point3> points, double radius,
                             std::span<const double> weights = {});

double energyOnly(const Point3& c, std::span<const Point3> points, double radius,
                  std::span<const double> weights = {});

struct PointFit {
  Point3 center;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Force-driven descent with step halving whenever the energy would rise.
PointFit optimizePoint(const Point3& start, const SectionAssociation& section,
                       const RefineParams& params);

/// Refines every point independently; points with too few associated
/// surface points are passed through with refined[i] = 0.
Centerline optimizeCenterline(const Centerline& cl, const OrientedFaceSet& faces,
                              const RefineParams& params, int threads = 1);

}  // namespace tubeaxis
