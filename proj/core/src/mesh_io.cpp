#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "springfem/mesh.hpp"

namespace springfem {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t a = 0;
  while (a < s.size()) {
    while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    std::size_t b = a;
    while (b < s.size() && !std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    if (b > a) out.push_back(s.substr(a, b - a));
    a = b;
  }
  return out;
}

// Non-blank, non-comment lines with their 1-based line numbers.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto tokens = split_ws(text.substr(pos, end - pos));
    if (!tokens.empty() && tokens.front().front() != '#') lines.push_back({number, std::move(tokens)});
    pos = end + 1;
  }
  return lines;
}

bool parse_int(std::string_view tok, long long& out) {
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && p == end;
}

// Accepts "nan"/"inf" spellings so they can be reported as non-finite rather
// than malformed.
bool parse_double(std::string_view tok, double& out) {
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return (ec == std::errc() || ec == std::errc::result_out_of_range) && p == end;
}

std::size_t expect_count(const std::vector<Line>& lines, std::size_t idx, std::string_view keyword) {
  if (idx >= lines.size())
    throw MeshError(MeshErrorKind::MalformedHeader, lines.empty() ? 0 : lines.back().number,
                    "missing '" + std::string(keyword) + "' section");
  const auto& ln = lines[idx];
  long long n = 0;
  if (ln.tokens.size() != 2 || ln.tokens[0] != keyword || !parse_int(ln.tokens[1], n) || n < 0)
    throw MeshError(MeshErrorKind::MalformedHeader, ln.number, "expected '" + std::string(keyword) + " <count>'");
  return static_cast<std::size_t>(n);
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty() || lines[0].tokens.size() != 2 || lines[0].tokens[0] != "springmesh" || lines[0].tokens[1] != "1")
    throw MeshError(MeshErrorKind::MalformedHeader, lines.empty() ? 0 : lines[0].number,
                    "expected 'springmesh 1'");

  long long dim = 0;
  if (lines.size() < 2 || lines[1].tokens.size() != 2 || lines[1].tokens[0] != "dim" ||
      !parse_int(lines[1].tokens[1], dim) || (dim != 2 && dim != 3))
    throw MeshError(MeshErrorKind::MalformedHeader, lines.size() < 2 ? lines[0].number : lines[1].number,
                    "expected 'dim 2' or 'dim 3'");
  const int d = static_cast<int>(dim);

  std::size_t idx = 2;
  const std::size_t n_nodes = expect_count(lines, idx++, "nodes");
  std::vector<Vec> nodes;
  nodes.reserve(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k, ++idx) {
    if (idx >= lines.size())
      throw MeshError(MeshErrorKind::MalformedLine, lines.back().number, "expected " + std::to_string(n_nodes) + " nodes");
    const auto& ln = lines[idx];
    if (ln.tokens.size() != static_cast<std::size_t>(d))
      throw MeshError(MeshErrorKind::MalformedLine, ln.number, "expected " + std::to_string(d) + " coordinates");
    Vec p(d);
    for (int c = 0; c < d; ++c) {
      if (!parse_double(ln.tokens[c], p[c]))
        throw MeshError(MeshErrorKind::MalformedLine, ln.number, "bad coordinate '" + std::string(ln.tokens[c]) + "'");
      if (!std::isfinite(p[c]))
        throw MeshError(MeshErrorKind::NonFiniteCoordinate, ln.number, std::string(ln.tokens[c]), static_cast<long>(k));
    }
    nodes.push_back(p);
  }

  const std::size_t elements_line = idx;
  const std::size_t n_elements = expect_count(lines, idx++, "elements");
  std::vector<Simplex> elements;
  std::vector<std::size_t> element_lines;
  elements.reserve(n_elements);
  for (std::size_t k = 0; k < n_elements; ++k, ++idx) {
    if (idx >= lines.size())
      throw MeshError(MeshErrorKind::MalformedLine, lines.back().number,
                      "expected " + std::to_string(n_elements) + " elements");
    const auto& ln = lines[idx];
    if (ln.tokens.size() != static_cast<std::size_t>(d + 1))
      throw MeshError(MeshErrorKind::MalformedLine, ln.number, "expected " + std::to_string(d + 1) + " node indices");
    Simplex s{-1, -1, -1, -1};
    for (int c = 0; c <= d; ++c) {
      long long v = 0;
      if (!parse_int(ln.tokens[c], v))
        throw MeshError(MeshErrorKind::MalformedLine, ln.number, "bad index '" + std::string(ln.tokens[c]) + "'");
      if (v < 0 || v >= static_cast<long long>(n_nodes))
        throw MeshError(MeshErrorKind::IndexOutOfRange, ln.number,
                        "node index " + std::to_string(v) + " with " + std::to_string(n_nodes) + " nodes",
                        static_cast<long>(k));
      s[c] = static_cast<int>(v);
    }
    elements.push_back(s);
    element_lines.push_back(ln.number);
  }
  if (idx < lines.size())
    throw MeshError(MeshErrorKind::MalformedLine, lines[idx].number, "trailing content after elements");
  (void)elements_line;

  try {
    return Mesh(d, std::move(nodes), std::move(elements));
  } catch (const MeshError& err) {
    // Re-attach the source line of the offending element.
    const std::size_t line =
        err.item() >= 0 && static_cast<std::size_t>(err.item()) < element_lines.size() ? element_lines[err.item()] : 0;
    throw MeshError(err.kind(), line, "element " + std::to_string(err.item()), err.item());
  }
}

std::string write_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << "springmesh 1\n";
  out << "dim " << mesh.dim() << "\n";
  out << "nodes " << mesh.num_nodes() << "\n";
  char buf[64];
  for (const auto& p : mesh.nodes()) {
    for (int c = 0; c < mesh.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", p[c]);
      out << (c ? " " : "") << buf;
    }
    out << "\n";
  }
  out << "elements " << mesh.num_elements() << "\n";
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (std::size_t a = 0; a < el.size(); ++a) out << (a ? " " : "") << el[a];
    out << "\n";
  }
  return out.str();
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mesh file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write mesh file '" + path + "'");
  out << write_mesh(mesh);
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace springfem
