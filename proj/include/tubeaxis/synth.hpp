#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tubeaxis/mesh.hpp"

namespace tubeaxis {

struct StraightSpec {
  double length = 0.0;
};

/// Circular bend of `radius` through `angle` radians. The bending plane is
/// first rotated by `planeTurn` radians about the current tangent.
struct ArcSpec {
  double radius = 0.0;
  double angle = 0.0;
  double planeTurn = 0.0;
};

using PieceSpec = std::variant<StraightSpec, ArcSpec>;

struct TubeSpec {
  std::vector<PieceSpec> pieces;
  double radius = 1.0;  // tube radius R
  double meshStep = 1.0;
  Point3 start{0.0, 0.0, 0.0};
  Vec3 tangent{0.0, 0.0, 1.0};
  Vec3 normal{1.0, 0.0, 0.0};  // arcs bend toward the (turned) normal
  bool capEnds = false;
};

/// Parses "S:20,A:15:90[:turnDeg],S:20"; arc angles and turns in degrees.
std::vector<PieceSpec> parsePieces(const std::string& text);

enum class PieceKind : std::uint8_t { Straight = 0, Arc = 1 };

struct TubeTruth {
  std::vector<Point3> points;  // dense centerline samples
  std::vector<Vec3> tangents;
  std::vector<Vec3> ringU;     // ring frame, transported without twist
  std::vector<Vec3> ringV;
  std::vector<std::size_t> junctions;  // sample index where piece k+1 starts
  std::vector<PieceKind> kinds;        // per sample; junction samples take the next piece
};

struct SyntheticTube {
  TriMesh mesh;
  TubeTruth truth;
};

/// Piecewise straight/arc tube, G1 at the junctions, outward-oriented faces.
/// Throws SelfIntersecting when an arc radius does not exceed R.
SyntheticTube genTube(const TubeSpec& spec);

/// UV sphere with outward faces.
TriMesh genSphere(const Point3& center, double radius, int rings, int segments);

struct NoiseMode {
  double sigma = 0.0;
};
struct PartialScanMode {
  Vec3 viewDir;
};
/// Removes faces whose angle about the local truth axis lies in
/// [fromAngle, toAngle] (radians, measured in the ring frame, range (-pi, pi]).
struct SectorRemovalMode {
  double fromAngle = 0.0;
  double toAngle = 0.0;
  TubeTruth truth;
};
struct HolesMode {
  int count = 0;
  double radius = 0.0;
};

using DegradeMode = std::variant<NoiseMode, PartialScanMode, SectorRemovalMode, HolesMode>;

/// Deterministic for a given seed. Unused vertices are removed for the
/// face-dropping modes.
TriMesh degrade(const TriMesh& mesh, const DegradeMode& mode, std::uint64_t seed);

/// Lattice points (i,j,k) with (i,j,k) * gridstep inside the closed mesh,
/// by parity counting along x rays. Throws NotClosed when more than 0.1% of
/// the intersected rows have an odd crossing count.
VoxelSet voxelize(const TriMesh& mesh, double gridstep);

/// Highest surface point per pixel looking down `viewAxis` (0/1/2 for
/// x/y/z). Empty pixels take the minimum rendered height.
HeightMap renderHeightMap(const TriMesh& mesh, int viewAxis, double resolution);

}  // namespace tubeaxis
