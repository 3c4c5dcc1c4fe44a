#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubeaxis/centerline.hpp"
#include "tubeaxis/mesh.hpp"

namespace tubeaxis {

enum class MeshFormat { Auto, Off, Obj };

struct MeshLoad {
  TriMesh mesh;
  std::size_t droppedDegenerate = 0;
};

/// Reads an ASCII OFF or OBJ surface. Polygons are fan-triangulated
/// ((1,2,3),(1,3,4),...) and faces with area <= 1e-12 are dropped.
MeshLoad loadMesh(const std::string& path, MeshFormat format = MeshFormat::Auto);
MeshLoad parseOff(const std::string& text);
MeshLoad parseObj(const std::string& text);

struct VolumeLoad {
  VoxelSet voxels;
  std::size_t duplicates = 0;
};

/// ASCII list of integer "x y z" triples, one per line ('#' comments allowed).
VolumeLoad loadVolume(const std::string& path);
VolumeLoad parseVolume(const std::string& text);

/// PGM (P2 or P5); gray level g maps to height g * scale.
HeightMap loadHeightMap(const std::string& path, double scale, double spacing = 1.0);

/// Grid triangulation, two triangles per cell split along (i,j)-(i+1,j+1).
/// Triangles are oriented so that a flat map faces +h.
TriMesh heightMapToMesh(const HeightMap& hm);

void writeOff(const TriMesh& mesh, const std::string& path);
void writeScalarCsv(const std::vector<double>& values, const std::string& header,
                    const std::string& path);
void writeCenterlineObj(const Centerline& cl, const std::string& path);
void writeCenterlineCsv(const Centerline& cl, const std::string& path);
Centerline readCenterlineCsv(const std::string& path);
void writeDecompositionCsv(const Decomposition& dec, const std::string& path);
void writeVolume(const VoxelSet& voxels, const std::string& path);
void writeHeightMapPgm(const HeightMap& hm, double scale, const std::string& path);

struct NamedMesh {
  std::string name;
  TriMesh mesh;
  std::vector<double> faceScalars;  // optional sidecar, one value per face
};

/// Writes centerline.obj, centerline.csv, decomposition.csv and one OFF
/// (plus `<name>_faces.csv` when scalars are present) per mesh. Returns
/// the written paths in order.
std::vector<std::string> writeArtifacts(const Centerline& cl, const Decomposition& dec,
                                        const std::vector<NamedMesh>& meshes,
                                        const std::string& outDir);

/// "%.17g" formatting shared by every text writer.
std::string formatReal(double v);

}  // namespace tubeaxis
