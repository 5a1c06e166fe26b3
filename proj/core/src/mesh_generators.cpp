#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "springfem/mesh.hpp"

namespace springfem {

namespace {

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

void require_positive(int n, const char* name) {
  if (n < 1) throw InputError(std::string(name) + ": n must be >= 1, got " + std::to_string(n));
}

}  // namespace

Mesh square_right(int n) {
  require_positive(n, "square_right");
  const int m = n + 1;
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * m);
  for (int y = 0; y <= n; ++y)
    for (int x = 0; x <= n; ++x) nodes.push_back(vec2(static_cast<double>(x) / n, static_cast<double>(y) / n));

  std::vector<Simplex> elements;
  elements.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int v00 = y * m + x;
      const int v10 = v00 + 1;
      const int v01 = v00 + m;
      const int v11 = v01 + 1;
      elements.push_back({v00, v10, v11, -1});
      elements.push_back({v00, v11, v01, -1});
    }
  }
  return Mesh(2, std::move(nodes), std::move(elements));
}

Mesh equilateral(int n) {
  require_positive(n, "equilateral");
  const int m = n + 1;
  const double h = std::numbers::sqrt3 / 2.0;
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * m);
  // Lattice spanned by (1,0) and (1/2, sqrt(3)/2).
  for (int b = 0; b <= n; ++b)
    for (int a = 0; a <= n; ++a) nodes.push_back(vec2(a + 0.5 * b, h * b));

  std::vector<Simplex> elements;
  elements.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const int v00 = b * m + a;
      const int v10 = v00 + 1;
      const int v01 = v00 + m;
      const int v11 = v01 + 1;
      elements.push_back({v00, v10, v01, -1});
      elements.push_back({v10, v11, v01, -1});
    }
  }
  return Mesh(2, std::move(nodes), std::move(elements));
}

Mesh cube_kuhn(int n) {
  require_positive(n, "cube_kuhn");
  const int m = n + 1;
  auto id = [m](int x, int y, int z) { return (z * m + y) * m + x; };
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * m * m);
  for (int z = 0; z <= n; ++z)
    for (int y = 0; y <= n; ++y)
      for (int x = 0; x <= n; ++x)
        nodes.push_back(vec3(static_cast<double>(x) / n, static_cast<double>(y) / n, static_cast<double>(z) / n));

  // Each permutation of the axes gives one monotone lattice path from the
  // cell's low corner to its high corner; its vertices span one tetrahedron.
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<Simplex> elements;
  elements.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int z = 0; z < n; ++z) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        for (const auto& p : perms) {
          std::array<int, 3> c{x, y, z};
          Simplex s{id(c[0], c[1], c[2]), 0, 0, 0};
          for (int k = 0; k < 3; ++k) {
            ++c[p[k]];
            s[k + 1] = id(c[0], c[1], c[2]);
          }
          elements.push_back(s);
        }
      }
    }
  }
  return Mesh(3, std::move(nodes), std::move(elements));
}

Mesh patch_equilateral() {
  const double h = std::numbers::sqrt3 / 2.0;
  std::vector<Vec> nodes{vec2(0, 0), vec2(1, 0), vec2(0.5, h), vec2(0.5, -h)};
  std::vector<Simplex> elements{{0, 1, 2, -1}, {0, 3, 1, -1}};
  return Mesh(2, std::move(nodes), std::move(elements));
}

Mesh patch_square() { return square_right(1); }

Mesh patch_regular_tet_ring() {
  constexpr int kRing = 5;
  // Ring edges have unit length; the axis half-length makes spokes unit too.
  const double r = 1.0 / (2.0 * std::sin(std::numbers::pi / kRing));
  const double h = std::sqrt(1.0 - r * r);
  std::vector<Vec> nodes{vec3(0, 0, -h), vec3(0, 0, h)};
  for (int k = 0; k < kRing; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kRing;
    nodes.push_back(vec3(r * std::cos(t), r * std::sin(t), 0.0));
  }
  std::vector<Simplex> elements;
  for (int k = 0; k < kRing; ++k) elements.push_back({0, 1, 2 + k, 2 + (k + 1) % kRing});
  return Mesh(3, std::move(nodes), std::move(elements));
}

Mesh regular_tetrahedron() {
  const double s3 = std::numbers::sqrt3;
  std::vector<Vec> nodes{vec3(0, 0, 0), vec3(1, 0, 0), vec3(0.5, s3 / 2.0, 0),
                         vec3(0.5, s3 / 6.0, std::sqrt(2.0 / 3.0))};
  std::vector<Simplex> elements{{0, 1, 2, 3}};
  return Mesh(3, std::move(nodes), std::move(elements));
}

Mesh jitter(const Mesh& mesh, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw InputError("jitter amplitude must be finite and >= 0");
  constexpr int kMaxAttempts = 20;
  const auto part = classify_boundary(mesh);
  const int d = mesh.dim();

  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Vec> nodes(mesh.nodes().begin(), mesh.nodes().end());
    for (int i : part.interior) {
      for (int c = 0; c < d; ++c) {
        // 53-bit uniform in [0,1), independent of the library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        nodes[i][c] += amplitude * (2.0 * u - 1.0);
      }
    }
    // Every element keeps its orientation and stays non-degenerate.
    bool ok = true;
    for (std::size_t e = 0; e < mesh.num_elements() && ok; ++e) {
      const auto el = mesh.element(e);
      std::array<Vec, 4> v;
      double h = 0.0;
      for (int a = 0; a <= d; ++a) v[a] = nodes[el[a]];
      for (int a = 0; a <= d; ++a)
        for (int b = a + 1; b <= d; ++b) h = std::max(h, (v[a] - v[b]).norm());
      const double vol = signed_volume(d, std::span<const Vec>(v.data(), d + 1));
      ok = vol > 1e-8 * std::pow(h, d);
    }
    if (ok) return Mesh(d, std::move(nodes), mesh.elements());
  }
  throw InputError("jitter amplitude " + std::to_string(amplitude) + " inverts elements after " +
                   std::to_string(kMaxAttempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Generator expressions
// ---------------------------------------------------------------------------

namespace {

class SpecParser {
public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  Mesh parse() {
    Mesh m = mesh_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return m;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("bad mesh spec '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected generator name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view token() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected a number");
    return text_.substr(start, pos_ - start);
  }

  long long integer() {
    const auto tok = token();
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad integer '" + std::string(tok) + "'");
    return v;
  }

  double real() {
    const auto tok = token();
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad number '" + std::string(tok) + "'");
    return v;
  }

  int size_arg() {
    expect('(');
    const long long n = integer();
    expect(')');
    if (n < 1 || n > 100000) fail("size out of range");
    return static_cast<int>(n);
  }

  void optional_empty_parens() {
    if (consume('(')) expect(')');
  }

  Mesh mesh_expr() {
    const std::string name = identifier();
    if (name == "square_right") return square_right(size_arg());
    if (name == "equilateral") return equilateral(size_arg());
    if (name == "cube_kuhn") return cube_kuhn(size_arg());
    if (name == "patch_equilateral") return optional_empty_parens(), patch_equilateral();
    if (name == "patch_square") return optional_empty_parens(), patch_square();
    if (name == "patch_regular_tet_ring") return optional_empty_parens(), patch_regular_tet_ring();
    if (name == "regular_tet") return optional_empty_parens(), regular_tetrahedron();
    if (name == "jitter") {
      expect('(');
      Mesh inner = mesh_expr();
      expect(',');
      const double amplitude = real();
      expect(',');
      const long long seed = integer();
      expect(')');
      return jitter(inner, amplitude, static_cast<std::uint64_t>(seed));
    }
    fail("unknown generator '" + name + "'");
  }
};

}  // namespace

Mesh generate_mesh(std::string_view spec) { return SpecParser(spec).parse(); }

}  // namespace springfem
