// tubeaxis-cli: every pipeline stage as a subcommand, plus synthetic data.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tubeaxis/ingest.hpp"
#include "tubeaxis/pipeline.hpp"
#include "tubeaxis/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tubeaxis;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kPipelineError = 2;

struct Options {
  std::string input;
  std::string inputType = "auto";
  std::optional<double> radius;
  std::string gridstep = "auto";
  std::string normals = "faces";
  std::string orient = "auto";
  std::string outDir = ".";
  std::uint64_t seed = 0;
  std::string jsonSummary;
  int threads = 1;

  double heightScale = 1.0;
  double spacing = 1.0;
  std::string centerline;  // precomputed centerline CSV for later stages

  std::optional<double> epsilonAcc;
  double epsilonFraction = 0.1;
  double minNorm = 0.1;
  std::optional<double> estimateRadius;
  std::optional<double> trackStep;
  double insideThreshold = 0.5;
  double maxAngleDeg = 60.0;
  double epsilonO = 0.001;
  int maxIter = 1000;
  bool areaWeighting = false;
  double alphaFlat = 0.05;
  double nu = 0.15;
  std::size_t minLen = 3;
  double maxArcResidual = 0.3;
  int sides = 24;

  // synth
  std::string pieces = "S:30,A:25:90,S:30";
  double meshStep = 1.0;
  bool cap = false;
  std::string degradeMode = "none";
  double sigma = 0.0;
  std::vector<double> viewDir{0.0, 0.0, 1.0};
  int holes = 3;
  double holeRadius = 2.0;
  double sectorFrom = -45.0;
  double sectorTo = 45.0;
  std::string emit = "mesh";
  int viewAxis = 2;
  double resolution = 1.0;
};

/// Thrown for command-line level problems (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainTooSmall:
    case ErrorCode::SeedInvalid:
    case ErrorCode::TooFewPoints:
    case ErrorCode::CoincidentPoint:
    case ErrorCode::DuplicatePoint:
    case ErrorCode::Collinear:
    case ErrorCode::DegenerateTangent:
    case ErrorCode::ZeroDirection:
      return kPipelineError;
    default:
      return kInputError;
  }
}

std::string lowerExtension(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::string resolveInputType(const Options& o) {
  if (o.inputType != "auto") return o.inputType;
  const std::string ext = lowerExtension(o.input);
  if (ext == ".off" || ext == ".obj") return "mesh";
  if (ext == ".pgm") return "heightmap";
  if (ext == ".vox" || ext == ".xyz" || ext == ".txt") return "voxels";
  throw UsageError("cannot infer --input-type from '" + ext + "'; pass --input-type");
}

struct LoadedInput {
  InputData data;
  std::string type;
  std::optional<TriMesh> mesh;  // surface used for error-map output, when there is one
};

LoadedInput loadInput(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  LoadedInput in{TriMesh{}, resolveInputType(o), std::nullopt};
  if (in.type == "mesh") {
    MeshLoad m = loadMesh(o.input);
    if (m.droppedDegenerate > 0)
      std::cerr << "warning: dropped " << m.droppedDegenerate << " degenerate faces\n";
    in.mesh = m.mesh;
    in.data = std::move(m.mesh);
  } else if (in.type == "voxels") {
    in.data = loadVolume(o.input).voxels;
  } else if (in.type == "heightmap") {
    HeightMap hm = loadHeightMap(o.input, o.heightScale, o.spacing);
    in.mesh = heightMapToMesh(hm);
    in.data = std::move(hm);
  } else {
    throw UsageError("unknown --input-type '" + in.type + "'");
  }
  return in;
}

PipelineParams pipelineParams(const Options& o) {
  if (!o.radius) throw UsageError("--radius is required");
  PipelineParams p;
  p.radius = *o.radius;
  if (o.gridstep != "auto") {
    try {
      p.gridstep = std::stod(o.gridstep);
    } catch (const std::exception&) {
      throw UsageError("--gridstep expects 'auto' or a positive number");
    }
  }
  p.epsilonFraction = o.epsilonFraction;
  p.epsilonAcc = o.epsilonAcc;
  p.minNorm = o.minNorm;
  p.normals = o.normals == "estimate" ? NormalSource::Estimate : NormalSource::Faces;
  p.estimateRadius = o.estimateRadius;
  p.orient = o.orient == "keep" ? Orientation::Keep : o.orient == "flip" ? Orientation::Flip : Orientation::Auto;
  p.trackStep = o.trackStep;
  p.insideThreshold = o.insideThreshold;
  p.maxAngle = o.maxAngleDeg * std::numbers::pi / 180.0;
  p.epsilonO = o.epsilonO;
  p.maxIter = o.maxIter;
  p.areaWeighting = o.areaWeighting;
  p.detect.alphaFlat = o.alphaFlat;
  p.detect.nu = o.nu;
  p.detect.minLen = o.minLen;
  p.maxArcResidual = o.maxArcResidual;
  p.sides = o.sides;
  p.threads = std::max(1, o.threads);
  return p;
}

json paramsJson(const Options& o, const PipelineParams& p) {
  json j;
  j["input"] = o.input;
  j["input_type"] = o.inputType;
  j["radius"] = p.radius;
  j["gridstep"] = o.gridstep;
  j["normals"] = o.normals;
  j["orient"] = o.orient;
  j["seed"] = o.seed;
  j["threads"] = p.threads;
  j["epsilon_acc"] = accumulationParams(p, 1.0).epsilon;
  j["min_norm"] = p.minNorm;
  j["track_step"] = p.trackStep.value_or(p.radius);
  j["inside_threshold"] = p.insideThreshold;
  j["max_angle_deg"] = o.maxAngleDeg;
  j["epsilon_o"] = p.epsilonO;
  j["max_iter"] = p.maxIter;
  j["area_weighting"] = p.areaWeighting;
  j["alpha_flat"] = p.detect.alphaFlat;
  j["nu"] = p.detect.nu;
  j["min_len"] = p.detect.minLen;
  j["max_arc_residual"] = p.maxArcResidual;
  j["sides"] = p.sides;
  return j;
}

json inputJson(const LoadedInput& in, const PreparedInput& prep) {
  json j;
  j["type"] = in.type;
  j["faces"] = prep.faces.size();
  j["vertices"] = prep.vertexCount;
  j["voxels"] = prep.voxelCount;
  j["gridstep"] = prep.gridstep;
  j["flipped"] = prep.flipped;
  return j;
}

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json centerlineJson(const Centerline& cl) {
  json j;
  j["points"] = cl.size();
  j["closed"] = cl.closed;
  std::size_t refined = 0;
  for (std::uint8_t r : cl.refined) refined += r;
  if (!cl.refined.empty()) j["refined_points"] = refined;
  return j;
}

json decompositionJson(const Decomposition& d) {
  json list = json::array();
  for (const Segment& s : d.segments) {
    json j;
    j["kind"] = s.tag();
    j["first"] = s.first;
    j["last"] = s.last;
    if (const auto* a = std::get_if<ArcPart>(&s.kind)) {
      j["center"] = vec(a->center);
      j["radius"] = a->radius;
      j["axis"] = vec(a->axis);
      j["extent"] = a->angularExtent;
    } else {
      const auto& st = std::get<StraightPart>(s.kind);
      j["point"] = vec(st.point);
      j["direction"] = vec(st.direction);
    }
    j["residual"] = s.residual;
    j["flagged"] = s.flagged;
    list.push_back(j);
  }
  return list;
}

json statsJson(const ErrorStats& s) {
  return json{{"mean", s.mean}, {"max", s.max}, {"rms", s.rms}, {"count", s.count}};
}

class Timer {
 public:
  explicit Timer(json& timings) : timings_(timings) {}
  template <typename F>
  auto run(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, t0);
    } else {
      auto r = f();
      record(stage, t0);
      return r;
    }
  }
  void add(const std::vector<StageTiming>& stages) {
    for (const StageTiming& s : stages) timings_[s.stage] = s.seconds;
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  json& timings_;
};

fs::path outPath(const Options& o, const std::string& name) { return fs::path(o.outDir) / name; }

void ensureOutDir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.outDir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + o.outDir + ": " + ec.message());
}

void writeSummary(const Options& o, const json& summary) {
  const std::string path = o.jsonSummary.empty() ? outPath(o, "summary.json").string() : o.jsonSummary;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << summary.dump(2) << '\n';
}

/// Shared front half of the stage commands: load, orient, and optionally
/// accumulate + track + refine, depending on what the command needs.
struct Run {
  const Options& o;
  json summary;
  PipelineParams params;
  std::optional<LoadedInput> input;
  PreparedInput prep;
  AccumulationResult acc;
  Centerline raw;
  Centerline refined;

  Run(const Options& opts, const std::string& command) : o(opts) {
    summary["command"] = command;
    params = pipelineParams(o);
    summary["params"] = paramsJson(o, params);
    summary["timings"] = json::object();
  }

  Timer timer() { return Timer(summary["timings"]); }

  void prepare() {
    input = timer().run("load", [&] { return loadInput(o); });
    std::vector<StageTiming> stages;
    prep = prepareInput(input->data, params, &stages);
    timer().add(stages);
    summary["input"] = inputJson(*input, prep);
  }

  void accumulate() {
    const AccumulationParams ap = accumulationParams(params, prep.gridstep);
    acc = timer().run("accumulate", [&] {
      return computeAccumulation(prep.faces, ap, accumulationDomain(prep.faces, ap), params.threads);
    });
    const GridDomain& d = acc.accImage.domain();
    json r;
    r["maxAcc"] = acc.maxAcc;
    r["maxPt"] = json::array({acc.maxPt.i, acc.maxPt.j, acc.maxPt.k});
    r["maxPtWorld"] = vec(d.voxelCenter(acc.maxPt));
    r["totalVisits"] = acc.totalVisits;
    r["dims"] = json::array({d.dims[0], d.dims[1], d.dims[2]});
    r["origin"] = vec(d.origin);
    r["gridstep"] = d.gridstep;
    summary["accumulation"] = r;
  }

  void track() {
    raw = timer().run("track", [&] { return extractCenterline(acc, trackParams(params, prep.gridstep)); });
    summary["raw_centerline"] = centerlineJson(raw);
  }

  void refine(const Centerline& start) {
    refined = timer().run("refine", [&] {
      return optimizeCenterline(start, prep.faces, refineParams(params, prep.gridstep), params.threads);
    });
    summary["refined_centerline"] = centerlineJson(refined);
  }

  /// Refined centerline from --centerline, or computed from the input.
  Centerline centerlineForLaterStage(bool refineLoaded) {
    if (!o.centerline.empty()) {
      Centerline cl = timer().run("load-centerline", [&] { return readCenterlineCsv(o.centerline); });
      if (!refineLoaded) return cl;
      prepare();
      refine(cl);
      return refined;
    }
    prepare();
    accumulate();
    track();
    refine(raw);
    return refined;
  }

  double gridstepForDecompose() const {
    if (input) return prep.gridstep;
    return params.gridstep.value_or(1.0);
  }
};

int cmdAccumulate(const Options& o) {
  Run run(o, "accumulate");
  run.prepare();
  run.accumulate();
  ensureOutDir(o);
  writeGrid(run.acc.accImage, outPath(o, "accumulation").string());
  writeGrid(run.acc.dirImage, outPath(o, "directions").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdCenterline(const Options& o) {
  Run run(o, "centerline");
  run.prepare();
  run.accumulate();
  run.track();
  ensureOutDir(o);
  writeCenterlineObj(run.raw, outPath(o, "centerline.obj").string());
  writeCenterlineCsv(run.raw, outPath(o, "centerline.csv").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdRefine(const Options& o) {
  Run run(o, "refine");
  const Centerline cl = run.centerlineForLaterStage(true);
  ensureOutDir(o);
  if (!run.raw.empty()) writeCenterlineCsv(run.raw, outPath(o, "centerline_raw.csv").string());
  writeCenterlineObj(cl, outPath(o, "centerline.obj").string());
  writeCenterlineCsv(cl, outPath(o, "centerline.csv").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdDecompose(const Options& o) {
  Run run(o, "decompose");
  const Centerline cl = run.centerlineForLaterStage(false);
  const Decomposition d = run.timer().run("decompose", [&] {
    return decomposeCenterline(cl, decomposeParams(run.params, run.gridstepForDecompose()));
  });
  run.summary["segments"] = decompositionJson(d);
  ensureOutDir(o);
  writeDecompositionCsv(d, outPath(o, "decomposition.csv").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdReconstruct(const Options& o) {
  Run run(o, "reconstruct");
  const Centerline cl = run.centerlineForLaterStage(false);
  const TriMesh m = run.timer().run("reconstruct", [&] { return sweepTube(cl, run.params.radius, run.params.sides); });
  run.summary["reconstruction"] = json{{"vertices", m.vertices.size()}, {"faces", m.faces.size()}};
  ensureOutDir(o);
  writeOff(m, outPath(o, "reconstruction.off").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdErrorMap(const Options& o) {
  Run run(o, "error-map");
  const Centerline cl = run.centerlineForLaterStage(false);
  if (!run.input) run.prepare();
  const std::vector<double> errors = run.timer().run("error-map", [&] {
    return errorMap(run.prep.faces, cl, run.params.radius, run.params.threads);
  });
  run.summary["errors"] = statsJson(errorStats(errors));
  ensureOutDir(o);
  if (run.input->mesh) writeOff(*run.input->mesh, outPath(o, "error.off").string());
  writeScalarCsv(errors, "error", outPath(o, "error_faces.csv").string());
  writeSummary(o, run.summary);
  return kOk;
}

int cmdPipeline(const Options& o) {
  Run run(o, "pipeline");
  run.input = run.timer().run("load", [&] { return loadInput(o); });
  const PipelineResult r = runPipeline(run.input->data, run.params);
  run.timer().add(r.timings);
  run.summary["input"] = inputJson(*run.input, r.input);
  run.summary["accumulation"] = json{{"maxAcc", r.accumulation.maxAcc},
                                     {"maxPt", json::array({r.accumulation.maxPt.i, r.accumulation.maxPt.j,
                                                            r.accumulation.maxPt.k})},
                                     {"totalVisits", r.accumulation.totalVisits}};
  run.summary["raw_centerline"] = centerlineJson(r.raw);
  run.summary["refined_centerline"] = centerlineJson(r.refined);
  run.summary["segments"] = decompositionJson(r.decomposition);
  run.summary["errors"] = statsJson(r.errorStats);

  std::vector<NamedMesh> meshes;
  if (!r.reconstruction.faces.empty()) meshes.push_back({"reconstruction", r.reconstruction, {}});
  if (run.input->mesh) meshes.push_back({"error", *run.input->mesh, r.errors});
  ensureOutDir(o);
  const std::vector<std::string> written = writeArtifacts(r.refined, r.decomposition, meshes, o.outDir);
  writeCenterlineCsv(r.raw, outPath(o, "centerline_raw.csv").string());
  if (!run.input->mesh) writeScalarCsv(r.errors, "error", outPath(o, "error_faces.csv").string());
  json files = json::array();
  for (const std::string& w : written) files.push_back(fs::path(w).filename().string());
  run.summary["files"] = files;
  writeSummary(o, run.summary);
  return kOk;
}

void writeTruthCsv(const TubeTruth& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << "index,x,y,z,tx,ty,tz,kind,junction\n";
  std::size_t next = 0;
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const bool junction = next < t.junctions.size() && t.junctions[next] == i;
    if (junction) ++next;
    out << i << ',' << formatReal(t.points[i].x) << ',' << formatReal(t.points[i].y) << ','
        << formatReal(t.points[i].z) << ',' << formatReal(t.tangents[i].x) << ','
        << formatReal(t.tangents[i].y) << ',' << formatReal(t.tangents[i].z) << ','
        << (t.kinds[i] == PieceKind::Arc ? "ARC" : "STRAIGHT") << ',' << (junction ? 1 : 0) << '\n';
  }
}

int cmdSynth(const Options& o) {
  if (!o.radius) throw UsageError("--radius is required");
  json summary;
  summary["command"] = "synth";
  TubeSpec spec;
  spec.pieces = parsePieces(o.pieces);
  spec.radius = *o.radius;
  spec.meshStep = o.meshStep;
  spec.capEnds = o.cap || o.emit == "voxels";
  SyntheticTube tube = genTube(spec);

  constexpr double deg = std::numbers::pi / 180.0;
  if (o.degradeMode == "noise") {
    tube.mesh = degrade(tube.mesh, NoiseMode{o.sigma}, o.seed);
  } else if (o.degradeMode == "partial") {
    if (o.viewDir.size() != 3) throw UsageError("--view-dir expects three numbers");
    tube.mesh = degrade(tube.mesh, PartialScanMode{normalized(Vec3(o.viewDir[0], o.viewDir[1], o.viewDir[2]))}, o.seed);
  } else if (o.degradeMode == "holes") {
    tube.mesh = degrade(tube.mesh, HolesMode{o.holes, o.holeRadius}, o.seed);
  } else if (o.degradeMode == "sector") {
    tube.mesh = degrade(tube.mesh, SectorRemovalMode{o.sectorFrom * deg, o.sectorTo * deg, tube.truth}, o.seed);
  } else if (o.degradeMode != "none") {
    throw UsageError("unknown --degrade '" + o.degradeMode + "'");
  }

  summary["params"] = json{{"pieces", o.pieces},     {"radius", spec.radius}, {"mesh_step", spec.meshStep},
                           {"cap", spec.capEnds},    {"degrade", o.degradeMode}, {"sigma", o.sigma},
                           {"seed", o.seed},         {"emit", o.emit}};
  ensureOutDir(o);
  json produced;
  if (o.emit == "mesh") {
    writeOff(tube.mesh, outPath(o, "tube.off").string());
    produced = json{{"file", "tube.off"}, {"faces", tube.mesh.faces.size()}, {"vertices", tube.mesh.vertices.size()}};
  } else if (o.emit == "voxels") {
    const VoxelSet v = voxelize(tube.mesh, o.resolution);
    writeVolume(v, outPath(o, "tube.vox").string());
    produced = json{{"file", "tube.vox"}, {"voxels", v.points.size()}, {"gridstep", o.resolution}};
  } else if (o.emit == "heightmap") {
    HeightMap hm = renderHeightMap(tube.mesh, o.viewAxis, o.resolution);
    double floorHeight = std::numeric_limits<double>::infinity();
    for (double h : hm.heights) floorHeight = std::min(floorHeight, h);
    for (double& h : hm.heights) h -= floorHeight;
    writeHeightMapPgm(hm, o.heightScale, outPath(o, "tube.pgm").string());
    produced = json{{"file", "tube.pgm"},          {"width", hm.width},         {"height", hm.height},
                    {"spacing", hm.spacing},       {"origin_u", hm.originU},   {"origin_v", hm.originV},
                    {"height_offset", floorHeight}, {"height_scale", o.heightScale}, {"view_axis", o.viewAxis}};
  } else {
    throw UsageError("unknown --emit '" + o.emit + "'");
  }
  writeTruthCsv(tube.truth, outPath(o, "truth.csv").string());
  summary["output"] = produced;
  summary["truth"] = json{{"points", tube.truth.points.size()}, {"junctions", tube.truth.junctions}};
  writeSummary(o, summary);
  return kOk;
}

void addCenterlineOption(CLI::App* sub, Options& o) {
  sub->add_option("--centerline", o.centerline, "Centerline CSV to start from instead of tracking");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Tube centerline extraction by surface-normal accumulation"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--input", o.input, "Input surface, voxel list or PGM height map");
  app.add_option("--input-type", o.inputType, "Input kind")
      ->check(CLI::IsMember({"mesh", "voxels", "heightmap", "auto"}));
  app.add_option("--radius", o.radius, "Tube radius R (world units)")->check(CLI::PositiveNumber);
  app.add_option("--gridstep", o.gridstep, "Voxel size: 'auto' or a value");
  app.add_option("--normals", o.normals, "Voxel normals: facet axes or plane-fit estimates")
      ->check(CLI::IsMember({"faces", "estimate"}));
  app.add_option("--orient", o.orient, "Normal orientation")->check(CLI::IsMember({"auto", "keep", "flip"}));
  app.add_option("--out-dir", o.outDir, "Output directory");
  app.add_option("--seed", o.seed, "Random seed for synthetic degradations");
  app.add_option("--json-summary", o.jsonSummary, "Summary path (default <out-dir>/summary.json)");
  app.add_option("--threads", o.threads, "Worker threads (1 = sequential reference)")->check(CLI::PositiveNumber);
  app.add_option("--height-scale", o.heightScale, "Height per PGM gray level");
  app.add_option("--spacing", o.spacing, "Height map pixel spacing");

  app.add_option("--epsilon-acc", o.epsilonAcc, "Absolute scan overshoot (default 0.1 R)");
  app.add_option("--min-norm", o.minNorm, "Ignore cross products at or below this norm");
  app.add_option("--estimate-radius", o.estimateRadius, "Digital normal neighbourhood radius");
  app.add_option("--track-step", o.trackStep, "Tracking step (default R)");
  app.add_option("--inside-threshold", o.insideThreshold, "Fraction of the seed accumulation");
  app.add_option("--max-angle", o.maxAngleDeg, "Largest step deviation from the axis, degrees");
  app.add_option("--epsilon-o", o.epsilonO, "Refinement convergence threshold");
  app.add_option("--max-iter", o.maxIter, "Refinement iteration cap");
  app.add_flag("--area-weighting", o.areaWeighting, "Weight surface points by face area");
  app.add_option("--alpha-flat", o.alphaFlat, "Largest turning angle of a straight run, radians");
  app.add_option("--nu", o.nu, "Largest midpoint deviation from the arc line");
  app.add_option("--min-len", o.minLen, "Shortest segment, in centerline points");
  app.add_option("--max-arc-residual", o.maxArcResidual, "Planar circle fit tolerance, in gridsteps");
  app.add_option("--sides", o.sides, "Ring resolution of the reconstruction")->check(CLI::Range(3, 4096));

  auto* accumulate = app.add_subcommand("accumulate", "Accumulation and direction images");
  auto* centerline = app.add_subcommand("centerline", "Raw tracked centerline");
  auto* refine = app.add_subcommand("refine", "Least-squares refined centerline");
  auto* decompose = app.add_subcommand("decompose", "Straight/arc decomposition");
  auto* reconstruct = app.add_subcommand("reconstruct", "Swept tube mesh");
  auto* errorMapCmd = app.add_subcommand("error-map", "Per-face squared radial error");
  auto* synth = app.add_subcommand("synth", "Synthetic tube with ground truth");
  auto* pipeline = app.add_subcommand("pipeline", "All stages");
  for (CLI::App* sub : {refine, decompose, reconstruct, errorMapCmd}) addCenterlineOption(sub, o);

  synth->add_option("--pieces", o.pieces, "e.g. S:30,A:25:90,S:30 (arc: radius:degrees[:turn])");
  synth->add_option("--mesh-step", o.meshStep, "Sample spacing along and around the tube")->check(CLI::PositiveNumber);
  synth->add_flag("--cap", o.cap, "Close the tube ends");
  synth->add_option("--degrade", o.degradeMode, "none|noise|partial|holes|sector");
  synth->add_option("--sigma", o.sigma, "Vertex noise standard deviation");
  synth->add_option("--view-dir", o.viewDir, "Scanner direction for partial scans")->expected(3);
  synth->add_option("--holes", o.holes, "Number of holes");
  synth->add_option("--hole-radius", o.holeRadius, "Hole radius");
  synth->add_option("--sector-from", o.sectorFrom, "Removed sector start, degrees");
  synth->add_option("--sector-to", o.sectorTo, "Removed sector end, degrees");
  synth->add_option("--emit", o.emit, "mesh|voxels|heightmap");
  synth->add_option("--view-axis", o.viewAxis, "Height map view axis (0, 1, 2)");
  synth->add_option("--resolution", o.resolution, "Voxel size or height map pixel spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*accumulate) return cmdAccumulate(o);
    if (*centerline) return cmdCenterline(o);
    if (*refine) return cmdRefine(o);
    if (*decompose) return cmdDecompose(o);
    if (*reconstruct) return cmdReconstruct(o);
    if (*errorMapCmd) return cmdErrorMap(o);
    if (*synth) return cmdSynth(o);
    if (*pipeline) return cmdPipeline(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipelineError;
  }
  return kInputError;
}
