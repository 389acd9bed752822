#pragma once

#include "fmcorr/core/mesh.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace fmcorr {

enum class MeshFormat { off, obj, ply_ascii };

namespace detail {

// Line-oriented cursor over the raw bytes; keeps the 1-based line number for
// error messages.
struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  // Next non-empty line with comments ('#') stripped; returns false at EOF.
  bool next(std::string& out) {
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) continue;
      std::size_t e = line.find_last_not_of(" \t\r");
      out.assign(line.substr(b, e - b + 1));
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw io_error("parse error at line " + std::to_string(line_no) + ": " + what);
  }
};

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& tok, LineReader& r) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) r.fail("bad number '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    r.fail("bad number '" + tok + "'");
  }
}

inline long parse_int(const std::string& tok, LineReader& r) {
  long v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    r.fail("bad integer '" + tok + "'");
  return v;
}

inline TriMesh finish(std::vector<Eigen::RowVector3d>& vs,
                      std::vector<Eigen::RowVector3i>& fs, LineReader& r) {
  Points vertices(static_cast<Index>(vs.size()), 3);
  for (std::size_t i = 0; i < vs.size(); ++i) vertices.row(static_cast<Index>(i)) = vs[i];
  Faces faces(static_cast<Index>(fs.size()), 3);
  for (std::size_t i = 0; i < fs.size(); ++i) faces.row(static_cast<Index>(i)) = fs[i];
  try {
    return make_tri_mesh(std::move(vertices), std::move(faces));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

inline TriMesh load_off(std::string_view text) {
  LineReader r{text};
  std::string line;
  if (!r.next(line)) r.fail("empty OFF input");
  if (line != "OFF") r.fail("missing OFF header");
  if (!r.next(line)) r.fail("missing count line");
  auto counts = split_ws(line);
  if (counts.size() < 2) r.fail("count line needs vertex and face counts");
  const long n = parse_int(counts[0], r);
  const long m = parse_int(counts[1], r);
  if (n < 0 || m < 0) r.fail("negative counts");

  std::vector<Eigen::RowVector3d> vs;
  vs.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    if (!r.next(line)) r.fail("unexpected end of vertex list");
    auto toks = split_ws(line);
    if (toks.size() < 3) r.fail("vertex line needs 3 coordinates");
    vs.emplace_back(parse_double(toks[0], r), parse_double(toks[1], r), parse_double(toks[2], r));
  }

  std::vector<Eigen::RowVector3i> fs;
  fs.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    if (!r.next(line)) r.fail("unexpected end of face list");
    auto toks = split_ws(line);
    if (toks.empty()) r.fail("empty face line");
    const long cnt = parse_int(toks[0], r);
    if (cnt != 3) r.fail("non-triangle face with " + std::to_string(cnt) + " vertices");
    if (toks.size() < 4) r.fail("face line truncated");
    fs.emplace_back(static_cast<int>(parse_int(toks[1], r)),
                    static_cast<int>(parse_int(toks[2], r)),
                    static_cast<int>(parse_int(toks[3], r)));
  }
  return finish(vs, fs, r);
}

inline TriMesh load_obj(std::string_view text) {
  LineReader r{text};
  std::string line;
  std::vector<Eigen::RowVector3d> vs;
  std::vector<Eigen::RowVector3i> fs;
  while (r.next(line)) {
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) r.fail("v record needs 3 coordinates");
      vs.emplace_back(parse_double(toks[1], r), parse_double(toks[2], r), parse_double(toks[3], r));
    } else if (toks[0] == "f") {
      if (toks.size() != 4) r.fail("non-triangle face with " + std::to_string(toks.size() - 1) + " vertices");
      Eigen::RowVector3i f;
      for (int c = 0; c < 3; ++c) {
        std::string tok = toks[static_cast<std::size_t>(c) + 1];
        if (const auto slash = tok.find('/'); slash != std::string::npos)
          tok = tok.substr(0, slash);  // v/vt/vn — only the vertex index matters
        const long idx = parse_int(tok, r);
        if (idx < 1) r.fail("OBJ face indices must be positive (1-based)");
        f[c] = static_cast<int>(idx - 1);
      }
      fs.push_back(f);
    }
    // every other record type is ignored
  }
  if (vs.empty()) r.fail("no v records found");
  return finish(vs, fs, r);
}

inline TriMesh load_ply_ascii(std::string_view text) {
  LineReader r{text};
  std::string line;
  if (!r.next(line) || line != "ply") r.fail("missing ply header");
  if (!r.next(line) || split_ws(line) != std::vector<std::string>{"format", "ascii", "1.0"})
    r.fail("only 'format ascii 1.0' is supported");

  long n_vertex = -1, n_face = -1;
  int xi = -1, yi = -1, zi = -1;
  int vertex_props = 0;
  std::string current_element;
  while (true) {
    if (!r.next(line)) r.fail("unexpected end of header");
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "comment") continue;
    if (toks[0] == "element") {
      if (toks.size() < 3) r.fail("bad element line");
      current_element = toks[1];
      if (toks[1] == "vertex") n_vertex = parse_int(toks[2], r);
      else if (toks[1] == "face") n_face = parse_int(toks[2], r);
      else r.fail("unsupported element '" + toks[1] + "'");
    } else if (toks[0] == "property") {
      if (current_element == "vertex") {
        if (toks.size() >= 3) {
          if (toks.back() == "x") xi = vertex_props;
          if (toks.back() == "y") yi = vertex_props;
          if (toks.back() == "z") zi = vertex_props;
        }
        ++vertex_props;
      }
      // face properties: we only read the leading list
    }
  }
  if (n_vertex < 0 || n_face < 0) r.fail("header missing vertex or face element");
  if (xi < 0 || yi < 0 || zi < 0) r.fail("vertex element missing x/y/z properties");

  std::vector<Eigen::RowVector3d> vs;
  vs.reserve(static_cast<std::size_t>(n_vertex));
  for (long i = 0; i < n_vertex; ++i) {
    if (!r.next(line)) r.fail("unexpected end of vertex list");
    auto toks = split_ws(line);
    if (static_cast<int>(toks.size()) < vertex_props) r.fail("vertex line has too few properties");
    vs.emplace_back(parse_double(toks[static_cast<std::size_t>(xi)], r),
                    parse_double(toks[static_cast<std::size_t>(yi)], r),
                    parse_double(toks[static_cast<std::size_t>(zi)], r));
  }
  std::vector<Eigen::RowVector3i> fs;
  fs.reserve(static_cast<std::size_t>(n_face));
  for (long i = 0; i < n_face; ++i) {
    if (!r.next(line)) r.fail("unexpected end of face list");
    auto toks = split_ws(line);
    if (toks.empty()) r.fail("empty face line");
    const long cnt = parse_int(toks[0], r);
    if (cnt != 3) r.fail("non-triangle face with " + std::to_string(cnt) + " vertices");
    if (toks.size() < 4) r.fail("face line truncated");
    fs.emplace_back(static_cast<int>(parse_int(toks[1], r)),
                    static_cast<int>(parse_int(toks[2], r)),
                    static_cast<int>(parse_int(toks[3], r)));
  }
  return finish(vs, fs, r);
}

}  // namespace detail

inline TriMesh load_mesh(std::string_view bytes, MeshFormat format) {
  switch (format) {
    case MeshFormat::off: return detail::load_off(bytes);
    case MeshFormat::obj: return detail::load_obj(bytes);
    case MeshFormat::ply_ascii: return detail::load_ply_ascii(bytes);
  }
  throw std::invalid_argument("unknown mesh format");
}

inline MeshFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "off") return MeshFormat::off;
  if (ext == "obj") return MeshFormat::obj;
  if (ext == "ply") return MeshFormat::ply_ascii;
  throw io_error("cannot infer mesh format from path '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TriMesh load_mesh_file(const std::string& path) {
  return load_mesh(read_file(path), format_from_path(path));
}

inline void save_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.n_vertices() << ' ' << mesh.n_faces() << " 0\n";
  char buf[96];
  for (Index i = 0; i < mesh.n_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", mesh.vertices(i, 0),
                  mesh.vertices(i, 1), mesh.vertices(i, 2));
    out << buf;
  }
  for (Index f = 0; f < mesh.n_faces(); ++f)
    out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' ' << mesh.faces(f, 2) << '\n';
}

inline void save_off_file(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  save_off(mesh, out);
}

}  // namespace fmcorr
