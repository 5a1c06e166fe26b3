#include "springfem/assembly.hpp"

#include <cmath>
#include <string>

namespace springfem {

namespace {

void require_dims(const Mesh& mesh, const ElasticityTensor& c) {
  if (mesh.dim() != c.dim())
    throw InputError("dimension mismatch: mesh is " + std::to_string(mesh.dim()) + "D, tensor is " +
                     std::to_string(c.dim()) + "D");
}

void add_element_coupling(Mat& K, const ElasticityTensor& coeffs, double volume, const Vec& grad_i, const Vec& grad_j) {
  const int d = coeffs.dim();
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      double sum = 0.0;
      for (int q = 0; q < d; ++q)
        for (int s = 0; s < d; ++s) sum += coeffs(k, l, q, s) * grad_j[s] * grad_i[q];
      K(k, l) -= volume * sum;
    }
}

int require_local(const Mesh& mesh, std::size_t e, int node) {
  const int a = local_index(mesh, e, node);
  if (a < 0) throw InputError("node " + std::to_string(node) + " is not a vertex of element " + std::to_string(e));
  return a;
}

}  // namespace

SpringAssembler::SpringAssembler(const Mesh& mesh, const ElasticityTensor& c)
    : mesh_(&mesh), coeffs_(symmetrized_coefficients(c)) {
  require_dims(mesh, c);
  geometry_.reserve(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) geometry_.push_back(element_geometry(mesh, e));
}

Mat SpringAssembler::coupling(int i, int j, std::span<const int> elements) const {
  Mat K = zero_mat(mesh_->dim());
  for (int e : elements) {
    const auto& geo = geometry_.at(e);
    const int li = require_local(*mesh_, e, i);
    const int lj = require_local(*mesh_, e, j);
    add_element_coupling(K, coeffs_, geo.volume, geo.gradients[li], geo.gradients[lj]);
  }
  return K;
}

SpringConstant SpringAssembler::spring(const SpringPair& pair) const {
  return {pair, coupling(pair.i, pair.j, pair.incident_elements)};
}

Mat SpringAssembler::reversed(const SpringPair& pair) const {
  return coupling(pair.j, pair.i, pair.incident_elements);
}

Mat SpringAssembler::self(int node) const { return coupling(node, node, mesh_->node_elements(node)); }

SpringConstant spring_constant(const Mesh& mesh, const ElasticityTensor& c, const SpringPair& pair) {
  require_dims(mesh, c);
  const ElasticityTensor coeffs = symmetrized_coefficients(c);
  Mat K = zero_mat(mesh.dim());
  for (int e : pair.incident_elements) {
    const auto geo = element_geometry(mesh, e);
    add_element_coupling(K, coeffs, geo.volume, geo.gradients[require_local(mesh, e, pair.i)],
                         geo.gradients[require_local(mesh, e, pair.j)]);
  }
  return {pair, K};
}

Mat reverse_spring_constant(const Mesh& mesh, const ElasticityTensor& c, const SpringPair& pair) {
  SpringPair swapped = pair;
  std::swap(swapped.i, swapped.j);
  return spring_constant(mesh, c, swapped).K;
}

Mat self_coupling(const Mesh& mesh, const ElasticityTensor& c, int node) {
  require_dims(mesh, c);
  const ElasticityTensor coeffs = symmetrized_coefficients(c);
  Mat K = zero_mat(mesh.dim());
  for (int e : mesh.node_elements(node)) {
    const auto geo = element_geometry(mesh, e);
    const int a = require_local(mesh, e, node);
    add_element_coupling(K, coeffs, geo.volume, geo.gradients[a], geo.gradients[a]);
  }
  return K;
}

std::vector<SpringConstant> assemble_springs(const Mesh& mesh, const ElasticityTensor& c,
                                             const std::vector<SpringPair>& pairs) {
  const SpringAssembler assembler(mesh, c);
  std::vector<SpringConstant> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(assembler.spring(p));
  return out;
}

IsotropicDecomposition isotropic_decomposition(const Mesh& mesh, const SpringPair& pair) {
  const int d = mesh.dim();
  IsotropicDecomposition dec{zero_mat(d), 0.0};
  for (int e : pair.incident_elements) {
    const auto geo = element_geometry(mesh, e);
    const Vec& gi = geo.gradients[require_local(mesh, e, pair.i)];
    const Vec& gj = geo.gradients[require_local(mesh, e, pair.j)];
    dec.A.noalias() -= geo.volume * gj * gi.transpose();
  }
  dec.gamma = dec.A.trace();
  return dec;
}

Mat diagonal_constant(std::span<const Mat> springs, std::size_t expected_count) {
  if (springs.empty()) throw InputError("node has no springs");
  if (springs.size() != expected_count)
    throw InputError("incomplete spring set: got " + std::to_string(springs.size()) + ", expected " +
                     std::to_string(expected_count));
  Mat sum = zero_mat(static_cast<int>(springs.front().rows()));
  for (const auto& K : springs) sum += K;
  return -sum;
}

namespace {

Vec evaluate(const VectorField& field, const Vec& x, int dim, const char* what, int node) {
  Vec v;
  try {
    v = field(x);
  } catch (const std::exception& e) {
    throw InputError(std::string(what) + " evaluation failed at node " + std::to_string(node) + ": " + e.what());
  }
  if (v.size() != dim || !v.allFinite())
    throw InputError(std::string(what) + " returned an invalid value at node " + std::to_string(node));
  return v;
}

}  // namespace

std::map<int, Vec> load_vector(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& f) {
  const int d = mesh.dim();
  std::map<int, Vec> F;
  for (int i : partition.interior) {
    const Vec fi = evaluate(f, mesh.node(i), d, "body force", i);
    double weight = 0.0;
    for (int e : mesh.node_elements(i)) weight += element_geometry(mesh, e).volume / (d + 1);
    F.emplace(i, weight * fi);
  }
  return F;
}

std::map<int, Vec> dirichlet_values(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& g) {
  std::map<int, Vec> out;
  for (int i : partition.boundary) out.emplace(i, evaluate(g, mesh.node(i), mesh.dim(), "boundary function", i));
  return out;
}

LoadData make_loads(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& f, const VectorField& g) {
  return {load_vector(mesh, partition, f), dirichlet_values(mesh, partition, g)};
}

VectorField affine_field(const Mat& B, const Vec& c) {
  return [B, c](const Vec& x) -> Vec { return B * x + c; };
}

VectorField constant_field(const Vec& c) {
  return [c](const Vec&) -> Vec { return c; };
}

}  // namespace springfem
