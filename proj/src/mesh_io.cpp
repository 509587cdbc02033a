#include "sobvem/mesh.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace sobvem {

namespace {

void append_double(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

class LineReader {
public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-empty line, split into whitespace tokens.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) {
        tokens.push_back(tok);
      }
      if (!tokens.empty()) {
        return tokens;
      }
    }
    fail(std::string("unexpected end of file, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("mesh parse error at line " + std::to_string(line_no_) + ": " + msg);
  }

  int line() const { return line_no_; }

  long to_int(const std::string& tok) const {
    long value = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      fail("expected integer, got '" + tok + "'");
    }
    return value;
  }

  double to_double(const std::string& tok) const {
    double value = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      fail("expected number, got '" + tok + "'");
    }
    return value;
  }

private:
  std::istringstream in_;
  int line_no_ = 0;
};

} // namespace

std::string format_mesh(const PolyMesh& mesh) {
  std::string out = "polymesh 1\nvertices " + std::to_string(mesh.num_vertices()) + "\n";
  for (const auto& p : mesh.vertices()) {
    append_double(out, p.x());
    out += ' ';
    append_double(out, p.y());
    out += '\n';
  }
  out += "cells " + std::to_string(mesh.num_cells()) + "\n";
  for (const auto& loop : mesh.cells()) {
    out += std::to_string(loop.size());
    for (int v : loop) {
      out += ' ';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

PolyMesh parse_mesh(const std::string& text) {
  LineReader reader(text);
  auto header = reader.next("header");
  if (header.size() != 2 || header[0] != "polymesh" || header[1] != "1") {
    reader.fail("expected header 'polymesh 1'");
  }
  auto vline = reader.next("'vertices <n>'");
  if (vline.size() != 2 || vline[0] != "vertices") {
    reader.fail("expected 'vertices <n>'");
  }
  const long nv = reader.to_int(vline[1]);
  if (nv < 0) {
    reader.fail("negative vertex count");
  }
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    auto tok = reader.next("vertex coordinates");
    if (tok.size() != 2) {
      reader.fail("expected 'x y'");
    }
    verts.emplace_back(reader.to_double(tok[0]), reader.to_double(tok[1]));
  }
  auto cline = reader.next("'cells <m>'");
  if (cline.size() != 2 || cline[0] != "cells") {
    reader.fail("expected 'cells <m>'");
  }
  const long nc = reader.to_int(cline[1]);
  if (nc < 0) {
    reader.fail("negative cell count");
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(nc));
  for (long c = 0; c < nc; ++c) {
    auto tok = reader.next("cell loop");
    const long count = reader.to_int(tok[0]);
    if (count < 3 || static_cast<long>(tok.size()) != count + 1) {
      reader.fail("cell vertex count does not match its index list");
    }
    std::vector<int> loop;
    std::vector<Point> pts;
    for (long i = 0; i < count; ++i) {
      const long v = reader.to_int(tok[i + 1]);
      if (v < 0 || v >= nv) {
        reader.fail("vertex index " + std::to_string(v) + " out of range");
      }
      loop.push_back(static_cast<int>(v));
      pts.push_back(verts[v]);
    }
    if (signed_area(pts) <= 0.0) {
      reader.fail("cell " + std::to_string(c) + " is not counter-clockwise");
    }
    cells.push_back(std::move(loop));
  }
  try {
    return PolyMesh(std::move(verts), std::move(cells));
  } catch (const MeshError& err) {
    throw MeshError(std::string("mesh parse error: ") + err.what());
  }
}

PolyMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeshError("cannot open mesh file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

void write_mesh(const std::string& path, const PolyMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw MeshError("cannot write mesh file '" + path + "'");
  }
  out << format_mesh(mesh);
  if (!out) {
    throw MeshError("error while writing mesh file '" + path + "'");
  }
}

} // namespace sobvem
