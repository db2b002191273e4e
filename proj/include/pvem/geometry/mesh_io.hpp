// Plain-text mesh format:
//   polymesh 1
//   vertices N
//   x y            (N lines, shortest exact decimal representation)
//   elements M
//   k i1 ... ik    (M lines, 0-based CCW vertex indices)
// Doubles are written with std::to_chars so load(save(m)) == m bit-exactly.

#pragma once

#include <pvem/geometry/mesh.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace pvem {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, int line_no) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                             ": bad number '" + tok + "'");
  return v;
}

}  // namespace detail

inline void save_mesh(const PolyMesh& mesh, std::ostream& os) {
  os << "polymesh 1\n";
  os << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices)
    os << detail::format_double(v.x()) << " " << detail::format_double(v.y()) << "\n";
  os << "elements " << mesh.n_elements() << "\n";
  for (const auto& loop : mesh.elements) {
    os << loop.size();
    for (int v : loop) os << " " << v;
    os << "\n";
  }
}

inline void save_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_mesh: cannot open '" + path + "' for writing");
  save_mesh(mesh, f);
  if (!f) throw std::runtime_error("save_mesh: write failure on '" + path + "'");
}

inline PolyMesh load_mesh(std::istream& is) {
  PolyMesh mesh;
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(is, line))
      throw std::runtime_error("mesh parse error at line " + std::to_string(line_no + 1) +
                               ": unexpected end of file");
    ++line_no;
    return line;
  };

  {
    std::istringstream hdr(next_line());
    std::string magic;
    int version = 0;
    hdr >> magic >> version;
    if (magic != "polymesh" || version != 1)
      throw std::runtime_error("mesh parse error at line 1: expected 'polymesh 1'");
  }
  int nv = -1;
  {
    std::istringstream hs(next_line());
    std::string kw;
    hs >> kw >> nv;
    if (kw != "vertices" || nv < 0)
      throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                               ": expected 'vertices N'");
  }
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    std::istringstream vs(next_line());
    std::string sx, sy;
    if (!(vs >> sx >> sy))
      throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                               ": expected 'x y'");
    mesh.vertices.emplace_back(detail::parse_double(sx, line_no),
                               detail::parse_double(sy, line_no));
  }
  int ne = -1;
  {
    std::istringstream hs(next_line());
    std::string kw;
    hs >> kw >> ne;
    if (kw != "elements" || ne < 0)
      throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                               ": expected 'elements M'");
  }
  mesh.elements.reserve(ne);
  for (int e = 0; e < ne; ++e) {
    std::istringstream es(next_line());
    int k = 0;
    if (!(es >> k) || k < 3)
      throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                               ": element " + std::to_string(e) + " has bad vertex count");
    std::vector<int> loop(k);
    for (int i = 0; i < k; ++i) {
      if (!(es >> loop[i]))
        throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                                 ": element " + std::to_string(e) + " is truncated");
      if (loop[i] < 0 || loop[i] >= nv)
        throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) +
                                 ": element " + std::to_string(e) + " references vertex " +
                                 std::to_string(loop[i]) + " out of range [0," +
                                 std::to_string(nv) + ")");
    }
    mesh.elements.push_back(std::move(loop));
  }
  mesh.finalize();
  return mesh;
}

inline PolyMesh load_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_mesh: cannot open '" + path + "'");
  return load_mesh(f);
}

}  // namespace pvem
