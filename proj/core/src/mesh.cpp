#include "springfem/mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace springfem {

const char* to_string(MeshErrorKind kind) noexcept {
  switch (kind) {
    case MeshErrorKind::MalformedHeader: return "malformed header";
    case MeshErrorKind::MalformedLine: return "malformed line";
    case MeshErrorKind::IndexOutOfRange: return "index out of range";
    case MeshErrorKind::DuplicateIndex: return "duplicate index in element";
    case MeshErrorKind::DegenerateElement: return "degenerate element";
    case MeshErrorKind::NonFiniteCoordinate: return "non-finite coordinate";
    case MeshErrorKind::NonManifold: return "non-manifold facet";
  }
  return "mesh error";
}

static std::string format_mesh_error(MeshErrorKind kind, std::size_t line, const std::string& message) {
  std::string out = to_string(kind);
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

MeshError::MeshError(MeshErrorKind kind, std::size_t line, const std::string& message, long item)
    : InputError(format_mesh_error(kind, line, message)), kind_(kind), line_(line), item_(item) {}

namespace {

double edge_matrix_determinant(int dim, std::span<const Vec> v) {
  if (dim == 2) {
    Eigen::Matrix2d e;
    e.col(0) = v[1] - v[0];
    e.col(1) = v[2] - v[0];
    return e.determinant();
  }
  Eigen::Matrix3d e;
  e.col(0) = v[1] - v[0];
  e.col(1) = v[2] - v[0];
  e.col(2) = v[3] - v[0];
  return e.determinant();
}

double max_edge_length(std::span<const Vec> v) {
  double h = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) h = std::max(h, (v[a] - v[b]).norm());
  return h;
}

// Relative tolerance under which a simplex counts as degenerate.
constexpr double kDegenerateTol = 1e-12;

bool is_degenerate(int dim, std::span<const Vec> v, double det) {
  const double h = max_edge_length(v);
  return !(std::abs(det) > kDegenerateTol * std::pow(h, dim));
}

}  // namespace

double signed_volume(int dim, std::span<const Vec> vertices) {
  const double det = edge_matrix_determinant(dim, vertices);
  return dim == 2 ? det / 2.0 : det / 6.0;
}

Mesh::Mesh(int dim, std::vector<Vec> nodes, std::vector<Simplex> elements)
    : dim_(dim), nodes_(std::move(nodes)), elements_(std::move(elements)) {
  if (dim_ != 2 && dim_ != 3) throw InputError("mesh dimension must be 2 or 3, got " + std::to_string(dim_));

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].size() != dim_)
      throw InputError("node " + std::to_string(i) + " has " + std::to_string(nodes_[i].size()) + " coordinates");
    if (!nodes_[i].allFinite())
      throw MeshError(MeshErrorKind::NonFiniteCoordinate, 0, "node " + std::to_string(i), static_cast<long>(i));
  }

  const int n = static_cast<int>(nodes_.size());
  const int nv = dim_ + 1;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& el = elements_[e];
    for (int a = 0; a < nv; ++a) {
      if (el[a] < 0 || el[a] >= n)
        throw MeshError(MeshErrorKind::IndexOutOfRange, 0,
                        "element " + std::to_string(e) + " references node " + std::to_string(el[a]),
                        static_cast<long>(e));
      for (int b = 0; b < a; ++b)
        if (el[a] == el[b])
          throw MeshError(MeshErrorKind::DuplicateIndex, 0, "element " + std::to_string(e), static_cast<long>(e));
    }
    for (int a = nv; a < 4; ++a) el[a] = -1;

    std::array<Vec, 4> v;
    for (int a = 0; a < nv; ++a) v[a] = nodes_[el[a]];
    const std::span<const Vec> verts(v.data(), nv);
    const double det = edge_matrix_determinant(dim_, verts);
    if (is_degenerate(dim_, verts, det))
      throw MeshError(MeshErrorKind::DegenerateElement, 0, "element " + std::to_string(e), static_cast<long>(e));
    if (det < 0.0) std::swap(el[nv - 2], el[nv - 1]);
  }

  // node -> element incidence, CSR
  incidence_offsets_.assign(nodes_.size() + 1, 0);
  for (const auto& el : elements_)
    for (int a = 0; a < nv; ++a) ++incidence_offsets_[el[a] + 1];
  for (std::size_t i = 0; i < nodes_.size(); ++i) incidence_offsets_[i + 1] += incidence_offsets_[i];
  incidence_.resize(incidence_offsets_.back());
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::size_t e = 0; e < elements_.size(); ++e)
    for (int a = 0; a < nv; ++a) incidence_[fill[elements_[e][a]]++] = static_cast<int>(e);
}

std::span<const int> Mesh::node_elements(std::size_t i) const {
  const auto begin = incidence_offsets_.at(i);
  const auto end = incidence_offsets_.at(i + 1);
  return {incidence_.data() + begin, end - begin};
}

BoundaryPartition classify_boundary(const Mesh& mesh) {
  const int d = mesh.dim();
  const int nv = d + 1;

  // Facet keys with the last slot padded so 2D and 3D share one type.
  std::vector<std::array<int, 3>> facets;
  facets.reserve(mesh.num_elements() * nv);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int skip = 0; skip < nv; ++skip) {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int a = 0; a < nv; ++a)
        if (a != skip) key[k++] = el[a];
      std::sort(key.begin(), key.begin() + d);
      facets.push_back(key);
    }
  }
  std::sort(facets.begin(), facets.end());

  BoundaryPartition part;
  part.on_boundary.assign(mesh.num_nodes(), 0);
  for (std::size_t a = 0; a < facets.size();) {
    std::size_t b = a;
    while (b < facets.size() && facets[b] == facets[a]) ++b;
    const std::size_t count = b - a;
    if (count > 2) {
      throw MeshError(MeshErrorKind::NonManifold, 0,
                      "facet shared by " + std::to_string(count) + " elements");
    }
    if (count == 1)
      for (int k = 0; k < d; ++k) part.on_boundary[facets[a][k]] = 1;
    a = b;
  }
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    (part.on_boundary[i] ? part.boundary : part.interior).push_back(static_cast<int>(i));
  return part;
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t e) {
  const int d = mesh.dim();
  const auto el = mesh.element(e);
  std::array<Vec, 4> v;
  for (int a = 0; a <= d; ++a) v[a] = mesh.node(el[a]);
  const std::span<const Vec> verts(v.data(), d + 1);

  ElementGeometry geo;
  geo.num_vertices = d + 1;
  const double det = edge_matrix_determinant(d, verts);
  if (is_degenerate(d, verts, det) || det <= 0.0)
    throw MeshError(MeshErrorKind::DegenerateElement, 0, "element " + std::to_string(e));
  geo.volume = d == 2 ? det / 2.0 : det / 6.0;

  // Rows of the inverse edge matrix are the gradients of the barycentric
  // coordinates of vertices 1..d; vertex 0 takes minus their sum.
  Vec sum = Vec::Zero(d);
  if (d == 2) {
    Eigen::Matrix2d m;
    m.col(0) = v[1] - v[0];
    m.col(1) = v[2] - v[0];
    const Eigen::Matrix2d inv = m.inverse();
    for (int a = 1; a <= 2; ++a) {
      geo.gradients[a] = inv.row(a - 1).transpose();
      sum += geo.gradients[a];
    }
  } else {
    Eigen::Matrix3d m;
    m.col(0) = v[1] - v[0];
    m.col(1) = v[2] - v[0];
    m.col(2) = v[3] - v[0];
    const Eigen::Matrix3d inv = m.inverse();
    for (int a = 1; a <= 3; ++a) {
      geo.gradients[a] = inv.row(a - 1).transpose();
      sum += geo.gradients[a];
    }
  }
  geo.gradients[0] = -sum;
  return geo;
}

int local_index(const Mesh& mesh, std::size_t e, int node) {
  const auto el = mesh.element(e);
  for (std::size_t a = 0; a < el.size(); ++a)
    if (el[a] == node) return static_cast<int>(a);
  return -1;
}

std::vector<SpringPair> spring_adjacency(const Mesh& mesh, const BoundaryPartition& partition) {
  const int nv = mesh.dim() + 1;
  std::vector<std::tuple<int, int, int>> triples;
  triples.reserve(mesh.num_elements() * nv * (nv - 1) / 2);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        triples.emplace_back(std::min(el[a], el[b]), std::max(el[a], el[b]), static_cast<int>(e));
  }
  std::sort(triples.begin(), triples.end());

  std::vector<SpringPair> pairs;
  for (std::size_t a = 0; a < triples.size();) {
    SpringPair p;
    p.i = std::get<0>(triples[a]);
    p.j = std::get<1>(triples[a]);
    std::size_t b = a;
    while (b < triples.size() && std::get<0>(triples[b]) == p.i && std::get<1>(triples[b]) == p.j) {
      p.incident_elements.push_back(std::get<2>(triples[b]));
      ++b;
    }
    p.satisfies_a_pij = !(partition.is_boundary(p.i) && partition.is_boundary(p.j));
    pairs.push_back(std::move(p));
    a = b;
  }
  return pairs;
}

std::vector<SpringPair> spring_adjacency(const Mesh& mesh) {
  return spring_adjacency(mesh, classify_boundary(mesh));
}

double opposite_angle(const Mesh& mesh, std::size_t e, const SpringPair& pair) {
  const int li = local_index(mesh, e, pair.i);
  const int lj = local_index(mesh, e, pair.j);
  if (li < 0 || lj < 0)
    throw InputError("element " + std::to_string(e) + " is not incident to spring (" + std::to_string(pair.i) +
                     "," + std::to_string(pair.j) + ")");
  const ElementGeometry geo = element_geometry(mesh, e);
  // Outward facet normals are n = -grad/|grad|; n_i . n_j = -cos(theta).
  const Vec ni = -geo.gradients[li].normalized();
  const Vec nj = -geo.gradients[lj].normalized();
  const double cos_theta = -ni.dot(nj);
  double sin_theta = 0.0;
  if (mesh.dim() == 2) {
    sin_theta = std::abs(ni[0] * nj[1] - ni[1] * nj[0]);
  } else {
    const Eigen::Vector3d a = ni;
    const Eigen::Vector3d b = nj;
    sin_theta = a.cross(b).norm();
  }
  return std::atan2(sin_theta, cos_theta);
}

std::vector<double> opposite_angles(const Mesh& mesh, const SpringPair& pair) {
  std::vector<double> out;
  out.reserve(pair.incident_elements.size());
  for (int e : pair.incident_elements) out.push_back(opposite_angle(mesh, static_cast<std::size_t>(e), pair));
  return out;
}

}  // namespace springfem
