#include "tubeaxis/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tubeaxis {

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream openOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

/// Non-empty lines with '#' comments stripped, tokenized on whitespace.
std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++number;
    std::string_view line(text.data() + pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line parsed{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) parsed.tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!parsed.tokens.empty()) lines.push_back(std::move(parsed));
    pos = end + 1;
  }
  return lines;
}

[[noreturn]] void parseFail(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason);
}

template <typename T>
T parseNumber(std::string_view tok, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    parseFail(line, "invalid number '" + std::string(tok) + "'");
  return value;
}

void addFan(TriMesh& mesh, const std::vector<std::uint32_t>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
}

std::size_t dropDegenerate(TriMesh& mesh) {
  const std::size_t before = mesh.faces.size();
  std::vector<std::array<std::uint32_t, 3>> kept;
  kept.reserve(before);
  for (std::size_t f = 0; f < before; ++f)
    if (mesh.faceArea(f) > 1e-12) kept.push_back(mesh.faces[f]);
  mesh.faces = std::move(kept);
  return before - mesh.faces.size();
}

}  // namespace

std::string formatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MeshLoad parseOff(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty()) parseFail(1, "empty OFF file");
  std::size_t li = 0;
  std::vector<std::string_view> counts(lines[0].tokens.begin(), lines[0].tokens.end());
  if (counts.empty() || counts[0] != "OFF") parseFail(lines[0].number, "missing OFF header");
  counts.erase(counts.begin());
  std::size_t countLine = lines[0].number;
  if (counts.empty()) {
    if (lines.size() < 2) parseFail(lines[0].number, "missing element counts");
    li = 1;
    counts = lines[1].tokens;
    countLine = lines[1].number;
  }
  if (counts.size() < 2) parseFail(countLine, "expected vertex and face counts");
  const auto nv = parseNumber<std::size_t>(counts[0], countLine);
  const auto nf = parseNumber<std::size_t>(counts[1], countLine);
  ++li;

  MeshLoad out;
  TriMesh& mesh = out.mesh;
  mesh.vertices.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v, ++li) {
    if (li >= lines.size())
      parseFail(lines.back().number, "declared " + std::to_string(nv) + " vertices, found " +
                                         std::to_string(v));
    const Line& l = lines[li];
    if (l.tokens.size() < 3) parseFail(l.number, "vertex needs 3 coordinates");
    mesh.vertices.push_back({parseNumber<double>(l.tokens[0], l.number),
                             parseNumber<double>(l.tokens[1], l.number),
                             parseNumber<double>(l.tokens[2], l.number)});
  }
  std::vector<std::uint32_t> poly;
  for (std::size_t f = 0; f < nf; ++f, ++li) {
    if (li >= lines.size())
      parseFail(lines.back().number,
                "declared " + std::to_string(nf) + " faces, found " + std::to_string(f));
    const Line& l = lines[li];
    const auto n = parseNumber<std::size_t>(l.tokens[0], l.number);
    if (n < 3 || l.tokens.size() < n + 1) parseFail(l.number, "malformed face record");
    poly.clear();
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = parseNumber<std::uint32_t>(l.tokens[k + 1], l.number);
      if (idx >= nv) parseFail(l.number, "vertex index out of range");
      poly.push_back(idx);
    }
    addFan(mesh, poly);
  }
  out.droppedDegenerate = dropDegenerate(mesh);
  return out;
}

MeshLoad parseObj(const std::string& text) {
  MeshLoad out;
  TriMesh& mesh = out.mesh;
  std::vector<std::pair<std::size_t, std::vector<std::int64_t>>> rawFaces;
  for (const Line& l : tokenize(text)) {
    const auto& t = l.tokens;
    if (t[0] == "v") {
      if (t.size() < 4) parseFail(l.number, "vertex needs 3 coordinates");
      mesh.vertices.push_back({parseNumber<double>(t[1], l.number),
                               parseNumber<double>(t[2], l.number),
                               parseNumber<double>(t[3], l.number)});
    } else if (t[0] == "f") {
      if (t.size() < 4) parseFail(l.number, "face needs at least 3 vertices");
      std::vector<std::int64_t> idx;
      for (std::size_t k = 1; k < t.size(); ++k) {
        auto tok = t[k];
        tok = tok.substr(0, tok.find('/'));
        auto i = parseNumber<std::int64_t>(tok, l.number);
        // negative indices are relative to the vertices read so far
        if (i < 0) i = static_cast<std::int64_t>(mesh.vertices.size()) + i + 1;
        idx.push_back(i);
      }
      rawFaces.emplace_back(l.number, std::move(idx));
    }
    // other records (vn, vt, l, g, o, s, usemtl...) are ignored
  }
  std::vector<std::uint32_t> poly;
  for (const auto& [line, idx] : rawFaces) {
    poly.clear();
    for (std::int64_t i : idx) {
      if (i < 1 || i > static_cast<std::int64_t>(mesh.vertices.size()))
        parseFail(line, "vertex index out of range");
      poly.push_back(static_cast<std::uint32_t>(i - 1));
    }
    addFan(mesh, poly);
  }
  out.droppedDegenerate = dropDegenerate(mesh);
  return out;
}

MeshLoad loadMesh(const std::string& path, MeshFormat format) {
  if (format == MeshFormat::Auto) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") format = MeshFormat::Off;
    else if (ext == ".obj") format = MeshFormat::Obj;
    else throw Error(ErrorCode::UnsupportedFormat, "unknown mesh extension '" + ext + "'");
  }
  const std::string text = readFile(path);
  MeshLoad out = format == MeshFormat::Off ? parseOff(text) : parseObj(text);
  if (out.droppedDegenerate > 0)
    std::cerr << "warning: dropped " << out.droppedDegenerate << " degenerate faces from " << path
              << '\n';
  return out;
}

VolumeLoad parseVolume(const std::string& text) {
  VolumeLoad out;
  auto& pts = out.voxels.points;
  for (const Line& l : tokenize(text)) {
    if (l.tokens.size() != 3) parseFail(l.number, "expected 'x y z'");
    pts.push_back({parseNumber<std::int64_t>(l.tokens[0], l.number),
                   parseNumber<std::int64_t>(l.tokens[1], l.number),
                   parseNumber<std::int64_t>(l.tokens[2], l.number)});
  }
  std::sort(pts.begin(), pts.end());
  const auto last = std::unique(pts.begin(), pts.end());
  out.duplicates = static_cast<std::size_t>(pts.end() - last);
  pts.erase(last, pts.end());
  return out;
}

VolumeLoad loadVolume(const std::string& path) {
  VolumeLoad out = parseVolume(readFile(path));
  if (out.duplicates > 0)
    std::cerr << "warning: " << out.duplicates << " duplicate voxels in " << path << '\n';
  return out;
}

HeightMap loadHeightMap(const std::string& path, double scale, double spacing) {
  const std::string data = readFile(path);
  // header: magic, width, height, maxval, separated by whitespace/comments
  std::size_t pos = 0;
  auto nextToken = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (start == pos) throw Error(ErrorCode::ParseError, "truncated PGM " + path);
    return std::string_view(data.data() + start, pos - start);
  };
  const auto magic = nextToken();
  if (magic != "P2" && magic != "P5") throw Error(ErrorCode::UnsupportedFormat, "not a PGM file");
  HeightMap hm;
  hm.width = parseNumber<std::int64_t>(nextToken(), 1);
  hm.height = parseNumber<std::int64_t>(nextToken(), 1);
  const auto maxval = parseNumber<int>(nextToken(), 1);
  if (hm.width <= 0 || hm.height <= 0 || maxval <= 0 || maxval > 65535)
    throw Error(ErrorCode::ParseError, "bad PGM header in " + path);
  hm.spacing = spacing;
  const auto n = static_cast<std::size_t>(hm.width * hm.height);
  hm.heights.resize(n);
  if (magic == "P2") {
    for (std::size_t k = 0; k < n; ++k) hm.heights[k] = parseNumber<int>(nextToken(), 1) * scale;
  } else {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (data.size() < pos + n * bpp) throw Error(ErrorCode::ParseError, "truncated PGM raster");
    for (std::size_t k = 0; k < n; ++k) {
      const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos + k * bpp);
      const int g = bpp == 2 ? (p[0] << 8) | p[1] : p[0];
      hm.heights[k] = g * scale;
    }
  }
  return hm;
}

TriMesh heightMapToMesh(const HeightMap& hm) {
  if (hm.width < 2 || hm.height < 2)
    throw Error(ErrorCode::TooSmall, "height map needs at least 2x2 samples");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(hm.width * hm.height));
  for (std::int64_t j = 0; j < hm.height; ++j)
    for (std::int64_t i = 0; i < hm.width; ++i)
      mesh.vertices.push_back(hm.toWorld(hm.originU + static_cast<double>(i) * hm.spacing,
                                         hm.originV + static_cast<double>(j) * hm.spacing,
                                         hm.at(i, j)));
  auto id = [&](std::int64_t i, std::int64_t j) { return static_cast<std::uint32_t>(i + hm.width * j); };
  mesh.faces.reserve(static_cast<std::size_t>(2 * (hm.width - 1) * (hm.height - 1)));
  for (std::int64_t j = 0; j + 1 < hm.height; ++j) {
    for (std::int64_t i = 0; i + 1 < hm.width; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

void writeOff(const TriMesh& mesh, const std::string& path) {
  auto out = openOut(path);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const Point3& p : mesh.vertices)
    out << formatReal(p.x) << ' ' << formatReal(p.y) << ' ' << formatReal(p.z) << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

void writeScalarCsv(const std::vector<double>& values, const std::string& header,
                    const std::string& path) {
  auto out = openOut(path);
  out << "index," << header << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << formatReal(values[i]) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

void writeCenterlineObj(const Centerline& cl, const std::string& path) {
  auto out = openOut(path);
  for (const Point3& p : cl.points)
    out << "v " << formatReal(p.x) << ' ' << formatReal(p.y) << ' ' << formatReal(p.z) << '\n';
  if (cl.size() >= 2) {
    out << 'l';
    for (std::size_t i = 1; i <= cl.size(); ++i) out << ' ' << i;
    if (cl.closed) out << " 1";
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

void writeCenterlineCsv(const Centerline& cl, const std::string& path) {
  auto out = openOut(path);
  out << "index,x,y,z,dx,dy,dz\n";
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const Point3& p = cl.points[i];
    const Vec3 d = i < cl.directions.size() ? cl.directions[i] : Vec3{};
    out << i << ',' << formatReal(p.x) << ',' << formatReal(p.y) << ',' << formatReal(p.z) << ','
        << formatReal(d.x) << ',' << formatReal(d.y) << ',' << formatReal(d.z) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

Centerline readCenterlineCsv(const std::string& path) {
  const std::string text = readFile(path);
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  Centerline cl;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 || line.empty()) continue;
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      std::string_view tok(line.data() + start, end - start);
      while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.remove_suffix(1);
      vals.push_back(parseNumber<double>(tok, number));
      start = end + 1;
    }
    if (vals.size() != 7) parseFail(number, "expected index,x,y,z,dx,dy,dz");
    cl.points.push_back({vals[1], vals[2], vals[3]});
    cl.directions.push_back({vals[4], vals[5], vals[6]});
  }
  return cl;
}

void writeDecompositionCsv(const Decomposition& dec, const std::string& path) {
  auto out = openOut(path);
  out << "startIdx,endIdx,kind,cx,cy,cz,radius,ax,ay,az,extent,residual\n";
  for (const Segment& s : dec.segments) {
    out << s.first << ',' << s.last << ',' << s.tag() << ',';
    if (const auto* arc = std::get_if<ArcPart>(&s.kind)) {
      out << formatReal(arc->center.x) << ',' << formatReal(arc->center.y) << ','
          << formatReal(arc->center.z) << ',' << formatReal(arc->radius) << ','
          << formatReal(arc->axis.x) << ',' << formatReal(arc->axis.y) << ','
          << formatReal(arc->axis.z) << ',' << formatReal(arc->angularExtent) << ',';
    } else {
      const auto& st = std::get<StraightPart>(s.kind);
      out << formatReal(st.point.x) << ',' << formatReal(st.point.y) << ','
          << formatReal(st.point.z) << ",," << formatReal(st.direction.x) << ','
          << formatReal(st.direction.y) << ',' << formatReal(st.direction.z) << ",,";
    }
    out << formatReal(s.residual) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

void writeVolume(const VoxelSet& voxels, const std::string& path) {
  auto out = openOut(path);
  for (const Index3& p : voxels.points) out << p.i << ' ' << p.j << ' ' << p.k << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

void writeHeightMapPgm(const HeightMap& hm, double scale, const std::string& path) {
  auto out = openOut(path);
  out << "P2\n" << hm.width << ' ' << hm.height << "\n65535\n";
  for (std::int64_t j = 0; j < hm.height; ++j) {
    for (std::int64_t i = 0; i < hm.width; ++i) {
      const double g = std::clamp(std::round(hm.at(i, j) / scale), 0.0, 65535.0);
      out << static_cast<int>(g) << (i + 1 < hm.width ? ' ' : '\n');
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path);
}

std::vector<std::string> writeArtifacts(const Centerline& cl, const Decomposition& dec,
                                        const std::vector<NamedMesh>& meshes,
                                        const std::string& outDir) {
  if (cl.empty()) throw Error(ErrorCode::InvalidArgument, "centerline is empty");
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + outDir + ": " + ec.message());
  const std::filesystem::path dir(outDir);
  std::vector<std::string> manifest;
  manifest.push_back((dir / "centerline.obj").string());
  writeCenterlineObj(cl, manifest.back());
  manifest.push_back((dir / "centerline.csv").string());
  writeCenterlineCsv(cl, manifest.back());
  manifest.push_back((dir / "decomposition.csv").string());
  writeDecompositionCsv(dec, manifest.back());
  for (const NamedMesh& m : meshes) {
    manifest.push_back((dir / (m.name + ".off")).string());
    writeOff(m.mesh, manifest.back());
    if (!m.faceScalars.empty()) {
      manifest.push_back((dir / (m.name + "_faces.csv")).string());
      writeScalarCsv(m.faceScalars, "value", manifest.back());
    }
  }
  return manifest;
}

}  // namespace tubeaxis
