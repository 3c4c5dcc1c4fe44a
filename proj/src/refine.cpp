#include "tubeaxis/refine.hpp"

#include <algorithm>

namespace tubeaxis {

SectionAssociation sectionPoints(const Centerline& cl, const OrientedFaceSet& faces,
                                 const PointBuckets& index, std::size_t i,
                                 const RefineParams& params) {
  const Point3& c = cl.points[i];
  const Vec3 d = normalized(cl.directions[i]);
  const double half = 0.5 * params.trackStep;
  SectionAssociation s;
  s.index = i;
  index.forEachWithin(c, params.accRadius, [&](std::size_t f) {
    const double along = dot(faces.centers[f] - c, d);
    if (along > -half && along <= half) {
      s.points.push_back(faces.centers[f]);
      s.weights.push_back(params.areaWeighting ? faces.areas[f] : 1.0);
    }
  });
  if (s.points.size() < 3)
    throw Error(ErrorCode::TooFewPoints,
                "point " + std::to_string(i) + " has " + std::to_string(s.points.size()) +
                    " associated surface points");
  return s;
}

SectionAssociation sectionPoints(const Centerline& cl, const OrientedFaceSet& faces, std::size_t i,
                                 const RefineParams& params) {
  const PointBuckets index(faces.centers, params.accRadius);
  return sectionPoints(cl, faces, index, i, params);
}

EnergyEval energyAndGradient(const Point3& c, std::span<const Point3> points, double radius,
                             std::span<const double> weights) {
  EnergyEval out;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    const Vec3 cm = points[j] - c;
    const double len = norm(cm);
    if (!(len > 1e-12)) throw Error(ErrorCode::CoincidentPoint, "surface point coincides with C");
    const Vec3 unit = cm / len;
    out.energy += w * (len - radius) * (len - radius);
    out.gradient += unit * (2.0 * w * (radius - len));
    const Point3 projected = c + unit * radius;  // P_j, on the radius-R circle
    out.force += (points[j] - projected) * w;
  }
  return out;
}

double energyOnly(const Point3& c, std::span<const Point3> points, double radius,
                  std::span<const double> weights) {
  double e = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    const double len = distance(points[j], c);
    e += w * (len - radius) * (len - radius);
  }
  return e;
}

PointFit optimizePoint(const Point3& start, const SectionAssociation& section,
                       const RefineParams& params) {
  double weightSum = 0.0;
  for (double w : section.weights) weightSum += w;
  if (!(weightSum > 0.0)) weightSum = static_cast<double>(section.points.size());
  double step = params.initialStep / weightSum;

  PointFit fit{start, energyOnly(start, section.points, params.radius, section.weights), 0, false};
  for (; fit.iterations < params.maxIter; ++fit.iterations) {
    const EnergyEval eval = energyAndGradient(fit.center, section.points, params.radius, section.weights);
    Point3 candidate;
    double candidateEnergy = 0.0;
    // halve until the energy does not increase
    for (;;) {
      candidate = fit.center + eval.force * step;
      candidateEnergy = energyOnly(candidate, section.points, params.radius, section.weights);
      if (candidateEnergy <= fit.energy) break;
      step *= 0.5;
      if (step * norm(eval.force) < 1e-15) {
        fit.converged = true;
        return fit;
      }
    }
    const double decrease = fit.energy - candidateEnergy;
    fit.center = candidate;
    fit.energy = candidateEnergy;
    if (decrease < params.epsilonO) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }
  return fit;
}

Centerline optimizeCenterline(const Centerline& cl, const OrientedFaceSet& faces,
                              const RefineParams& params, int threads) {
  Centerline out = cl;
  out.refined.assign(cl.size(), 0);
  if (cl.empty() || faces.empty()) return out;
  const PointBuckets index(faces.centers, params.accRadius);
  const auto n = static_cast<std::int64_t>(cl.size());
#pragma omp parallel for num_threads(std::max(threads, 1)) if (threads > 1) schedule(dynamic, 4)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const SectionAssociation section = sectionPoints(cl, faces, index, i, params);
      out.points[i] = optimizePoint(cl.points[i], section, params).center;
      out.refined[i] = 1;
    } catch (const Error&) {
      // TooFewPoints or a coincident point: keep the tracked position
    }
  }
  return out;
}

}  // namespace tubeaxis
