#include "ipsr/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "ipsr/error.hpp"
#include "ipsr/log.hpp"

namespace ipsr::io {

static_assert(std::endian::native == std::endian::little,
              "binary PLY encoding assumes a little-endian host");

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_double(std::string_view tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view tok) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

// Line-by-line reader tracking the 1-based line number.
class LineReader {
 public:
  explicit LineReader(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto end = text_.find('\n', pos_);
    const auto stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_;
  std::size_t line_no_ = 0;
};

Point3 checked_point(const std::string& path, double x, double y, double z, std::size_t line,
                     std::size_t byte) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    throw ParseError(path, "non-finite coordinate", line, byte);
  return {x, y, z};
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::i8;
  if (s == "uchar" || s == "uint8") return PlyType::u8;
  if (s == "short" || s == "int16") return PlyType::i16;
  if (s == "ushort" || s == "uint16") return PlyType::u16;
  if (s == "int" || s == "int32") return PlyType::i32;
  if (s == "uint" || s == "uint32") return PlyType::u32;
  if (s == "float" || s == "float32") return PlyType::f32;
  if (s == "double" || s == "float64") return PlyType::f64;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8: case PlyType::u8: return 1;
    case PlyType::i16: case PlyType::u16: return 2;
    case PlyType::i32: case PlyType::u32: case PlyType::f32: return 4;
    default: return 8;
  }
}

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double ply_load(PlyType t, const char* p) {
  switch (t) {
    case PlyType::i8: return load<std::int8_t>(p);
    case PlyType::u8: return load<std::uint8_t>(p);
    case PlyType::i16: return load<std::int16_t>(p);
    case PlyType::u16: return load<std::uint16_t>(p);
    case PlyType::i32: return load<std::int32_t>(p);
    case PlyType::u32: return load<std::uint32_t>(p);
    case PlyType::f32: return load<float>(p);
    default: return load<double>(p);
  }
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;

  int find(std::string_view n) const {
    for (std::size_t i = 0; i < props.size(); ++i)
      if (props[i].name == n) return static_cast<int>(i);
    return -1;
  }
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::size_t body_offset = 0;
  std::size_t header_lines = 0;
};

PlyHeader parse_ply_header(const std::string& path, std::string_view text) {
  LineReader lr(text);
  std::string_view line;
  if (!lr.next(line) || line != "ply") throw ParseError(path, "missing 'ply' magic", 1, 0);
  PlyHeader h;
  bool have_format = false;
  while (true) {
    if (!lr.next(line)) throw ParseError(path, "unterminated header", lr.line_no(), 0);
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError(path, "malformed format line", lr.line_no(), 0);
      if (tok[1] == "ascii") {
        h.binary = false;
      } else if (tok[1] == "binary_little_endian") {
        h.binary = true;
      } else if (tok[1] == "binary_big_endian") {
        throw ParseError(path, "big-endian binary PLY is not supported", lr.line_no(), 0);
      } else {
        throw ParseError(path, "unknown PLY format '" + std::string(tok[1]) + "'", lr.line_no(), 0);
      }
      have_format = true;
    } else if (tok[0] == "element") {
      const auto count = tok.size() == 3 ? parse_int(tok[2]) : std::nullopt;
      if (!count || *count < 0) throw ParseError(path, "malformed element line", lr.line_no(), 0);
      h.elements.push_back({std::string(tok[1]), static_cast<std::size_t>(*count), {}});
    } else if (tok[0] == "property") {
      if (h.elements.empty()) throw ParseError(path, "property before element", lr.line_no(), 0);
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = ply_type(tok[2]), it = ply_type(tok[3]);
        if (!ct || !it) throw ParseError(path, "unknown list property type", lr.line_no(), 0);
        prop = {std::string(tok[4]), *it, true, *ct};
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t) throw ParseError(path, "unknown property type '" + std::string(tok[1]) + "'",
                                 lr.line_no(), 0);
        prop = {std::string(tok[2]), *t, false, PlyType::u8};
      } else {
        throw ParseError(path, "malformed property line", lr.line_no(), 0);
      }
      h.elements.back().props.push_back(prop);
    } else {
      throw ParseError(path, "unexpected header keyword '" + std::string(tok[0]) + "'",
                       lr.line_no(), 0);
    }
  }
  if (!have_format) throw ParseError(path, "missing format line", lr.line_no(), 0);
  h.body_offset = lr.pos();
  h.header_lines = lr.line_no();
  return h;
}

// Visits every element record; `on_record(element, values, lists)` gets scalar
// property values in declaration order (NaN for lists) and list contents.
template <typename Fn>
void walk_ply_body(const std::string& path, std::string_view text, const PlyHeader& h, Fn&& on_record) {
  std::vector<double> values;
  std::vector<std::vector<double>> lists;
  if (h.binary) {
    std::size_t pos = h.body_offset;
    const auto need = [&](std::size_t n) {
      if (pos + n > text.size()) throw ParseError(path, "unexpected end of binary data", 0, pos);
    };
    for (const auto& el : h.elements) {
      values.assign(el.props.size(), 0.0);
      lists.assign(el.props.size(), {});
      for (std::size_t r = 0; r < el.count; ++r) {
        for (std::size_t p = 0; p < el.props.size(); ++p) {
          const auto& prop = el.props[p];
          if (prop.is_list) {
            need(ply_size(prop.count_type));
            const double cnt = ply_load(prop.count_type, text.data() + pos);
            if (cnt < 0) throw ParseError(path, "negative list length", 0, pos);
            pos += ply_size(prop.count_type);
            const auto n = static_cast<std::size_t>(cnt);
            need(n * ply_size(prop.type));
            lists[p].resize(n);
            for (std::size_t i = 0; i < n; ++i, pos += ply_size(prop.type))
              lists[p][i] = ply_load(prop.type, text.data() + pos);
          } else {
            need(ply_size(prop.type));
            values[p] = ply_load(prop.type, text.data() + pos);
            pos += ply_size(prop.type);
          }
        }
        on_record(el, values, lists, std::size_t{0}, pos);
      }
    }
    return;
  }
  LineReader lr(text, h.body_offset);
  std::size_t line_base = h.header_lines;
  std::string_view line;
  for (const auto& el : h.elements) {
    values.assign(el.props.size(), 0.0);
    lists.assign(el.props.size(), {});
    for (std::size_t r = 0; r < el.count; ++r) {
      std::vector<std::string_view> tok;
      do {
        if (!lr.next(line))
          throw ParseError(path, "unexpected end of ascii data", line_base + lr.line_no() + 1, 0);
        tok = split_ws(line);
      } while (tok.empty());
      const std::size_t line_no = line_base + lr.line_no();
      std::size_t t = 0;
      const auto take = [&]() -> double {
        if (t >= tok.size()) throw ParseError(path, "too few values in record", line_no, 0);
        const auto v = parse_double(tok[t++]);
        if (!v) throw ParseError(path, "malformed number '" + std::string(tok[t - 1]) + "'", line_no, 0);
        return *v;
      };
      for (std::size_t p = 0; p < el.props.size(); ++p) {
        if (el.props[p].is_list) {
          const double cnt = take();
          if (cnt < 0) throw ParseError(path, "negative list length", line_no, 0);
          lists[p].resize(static_cast<std::size_t>(cnt));
          for (auto& v : lists[p]) v = take();
        } else {
          values[p] = take();
        }
      }
      on_record(el, values, lists, line_no, std::size_t{0});
    }
  }
}

std::vector<Point3> read_ply_points(const std::string& path, std::string_view text,
                                    std::vector<Triangle>* faces) {
  const PlyHeader h = parse_ply_header(path, text);
  const PlyElement* vertex = nullptr;
  for (const auto& el : h.elements)
    if (el.name == "vertex") vertex = &el;
  if (!vertex) throw ParseError(path, "no 'vertex' element", h.header_lines, 0);
  const int ix = vertex->find("x"), iy = vertex->find("y"), iz = vertex->find("z");
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path, "vertex element lacks x/y/z", h.header_lines, 0);
  if (vertex->find("nx") >= 0)
    log::info(path + ": input normals present and discarded (orientation is recomputed)");

  std::vector<Point3> pts;
  pts.reserve(vertex->count);
  walk_ply_body(path, text, h,
                [&](const PlyElement& el, const std::vector<double>& v,
                    const std::vector<std::vector<double>>& lists, std::size_t line,
                    std::size_t byte) {
                  if (&el == vertex) {
                    pts.push_back(checked_point(path, v[ix], v[iy], v[iz], line, byte));
                  } else if (faces && el.name == "face") {
                    int li = el.find("vertex_indices");
                    if (li < 0) li = el.find("vertex_index");
                    if (li < 0) throw ParseError(path, "face element lacks vertex_indices", line, byte);
                    const auto& poly = lists[li];
                    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
                      faces->push_back({static_cast<std::uint32_t>(poly[0]),
                                        static_cast<std::uint32_t>(poly[i]),
                                        static_cast<std::uint32_t>(poly[i + 1])});
                  }
                });
  return pts;
}

// ---------------------------------------------------------------------------
// XYZ / OBJ
// ---------------------------------------------------------------------------

std::vector<Point3> read_xyz(const std::string& path, std::string_view text) {
  std::vector<Point3> pts;
  LineReader lr(text);
  std::string_view line;
  while (lr.next(line)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < 3) throw ParseError(path, "expected 'x y z'", lr.line_no(), 0);
    double c[3];
    for (int a = 0; a < 3; ++a) {
      const auto v = parse_double(tok[a]);
      if (!v) throw ParseError(path, "malformed number '" + std::string(tok[a]) + "'", lr.line_no(), 0);
      c[a] = *v;
    }
    pts.push_back(checked_point(path, c[0], c[1], c[2], lr.line_no(), 0));
  }
  return pts;
}

std::vector<Point3> read_obj(const std::string& path, std::string_view text,
                             std::vector<Triangle>* faces) {
  std::vector<Point3> pts;
  LineReader lr(text);
  std::string_view line;
  while (lr.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError(path, "vertex needs 3 coordinates", lr.line_no(), 0);
      double c[3];
      for (int a = 0; a < 3; ++a) {
        const auto v = parse_double(tok[a + 1]);
        if (!v) throw ParseError(path, "malformed number '" + std::string(tok[a + 1]) + "'", lr.line_no(), 0);
        c[a] = *v;
      }
      pts.push_back(checked_point(path, c[0], c[1], c[2], lr.line_no(), 0));
    } else if (faces && tok[0] == "f") {
      std::vector<std::uint32_t> poly;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto slash = tok[i].find('/');
        const auto idx = parse_int(tok[i].substr(0, slash));
        if (!idx || *idx == 0) throw ParseError(path, "malformed face index", lr.line_no(), 0);
        const long long resolved = *idx > 0 ? *idx - 1 : static_cast<long long>(pts.size()) + *idx;
        if (resolved < 0) throw ParseError(path, "face index out of range", lr.line_no(), 0);
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) faces->push_back({poly[0], poly[i], poly[i + 1]});
    }
  }
  return pts;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

std::vector<Point3> read_points(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext != ".xyz" && ext != ".ply" && ext != ".obj")
    throw IoError("unsupported point file extension '" + ext + "' (" + path.string() + ")");
  const std::string text = slurp(path);
  const std::string name = path.string();
  if (ext == ".xyz") return read_xyz(name, text);
  if (ext == ".ply") return read_ply_points(name, text, nullptr);
  return read_obj(name, text, nullptr);
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext != ".ply" && ext != ".obj")
    throw IoError("unsupported mesh file extension '" + ext + "' (" + path.string() + ")");
  const std::string text = slurp(path);
  std::vector<Triangle> faces;
  auto verts = ext == ".ply" ? read_ply_points(path.string(), text, &faces)
                             : read_obj(path.string(), text, &faces);
  for (const auto& t : faces)
    for (auto i : t)
      if (i >= verts.size()) throw ParseError(path.string(), "face index out of range", 0, 0);
  return TriangleMesh(std::move(verts), std::move(faces));
}

void check_face_index_range(std::size_t vertex_count) {
  if (vertex_count > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()) + 1)
    throw IoError("mesh has too many vertices for int32 face indices");
}

std::string encode_mesh_ply(const TriangleMesh& mesh) {
  check_face_index_range(mesh.vertex_count());
  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                    std::to_string(mesh.vertex_count()) +
                    "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
                    std::to_string(mesh.face_count()) +
                    "\nproperty list uchar int vertex_indices\nend_header\n";
  out.reserve(out.size() + mesh.vertex_count() * 24 + mesh.face_count() * 13);
  for (const auto& p : mesh.vertices()) {
    put(out, p.x);
    put(out, p.y);
    put(out, p.z);
  }
  for (const auto& t : mesh.faces()) {
    put(out, std::uint8_t{3});
    for (auto i : t) put(out, static_cast<std::int32_t>(i));
  }
  return out;
}

std::string encode_mesh_obj(const TriangleMesh& mesh) {
  std::string out;
  char buf[128];
  for (const auto& p : mesh.vertices()) {
    const int n = std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out.append(buf, static_cast<std::size_t>(n));
  }
  for (const auto& t : mesh.faces()) {
    const int n = std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

std::string encode_oriented_points_ply(std::span<const Point3> positions,
                                       std::span<const Vec3> normals) {
  if (positions.size() != normals.size()) throw IoError("positions/normals size mismatch");
  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                    std::to_string(positions.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z"
                    "\nproperty double nx\nproperty double ny\nproperty double nz\nend_header\n";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (int a = 0; a < 3; ++a) put(out, positions[i][a]);
    for (int a = 0; a < 3; ++a) put(out, normals[i][a]);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place: " + path.string());
  }
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".ply") {
    write_file_atomic(path, encode_mesh_ply(mesh));
  } else if (ext == ".obj") {
    write_file_atomic(path, encode_mesh_obj(mesh));
  } else {
    throw IoError("unsupported mesh output extension '" + ext + "'");
  }
}

void write_oriented_points(std::span<const Point3> positions, std::span<const Vec3> normals,
                           const std::filesystem::path& path) {
  write_file_atomic(path, encode_oriented_points_ply(positions, normals));
}

OrientedPoints read_oriented_points(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const std::string name = path.string();
  const PlyHeader h = parse_ply_header(name, text);
  const PlyElement* vertex = nullptr;
  for (const auto& el : h.elements)
    if (el.name == "vertex") vertex = &el;
  if (!vertex) throw ParseError(name, "no 'vertex' element", h.header_lines, 0);
  const int idx[6] = {vertex->find("x"),  vertex->find("y"),  vertex->find("z"),
                      vertex->find("nx"), vertex->find("ny"), vertex->find("nz")};
  for (int i : idx)
    if (i < 0) throw ParseError(name, "vertex element lacks x/y/z/nx/ny/nz", h.header_lines, 0);
  OrientedPoints out;
  walk_ply_body(name, text, h,
                [&](const PlyElement& el, const std::vector<double>& v,
                    const std::vector<std::vector<double>>&, std::size_t line, std::size_t byte) {
                  if (&el != vertex) return;
                  out.positions.push_back(checked_point(name, v[idx[0]], v[idx[1]], v[idx[2]], line, byte));
                  out.normals.push_back({v[idx[3]], v[idx[4]], v[idx[5]]});
                });
  return out;
}

}  // namespace ipsr::io
