#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "springfem/elasticity.hpp"
#include "springfem/mesh.hpp"
#include "springfem/types.hpp"

namespace springfem {

// K_ij for one spring: K^{kl} = -a(phi_j e_l, phi_i e_k).
struct SpringConstant {
  SpringPair pair;
  Mat K;
};

// Geometric part of an isotropic spring constant:
// K = lambda A^T + mu A + mu gamma I, which is (lambda + mu) A + mu gamma I
// whenever A is symmetric.
struct IsotropicDecomposition {
  Mat A;               // A^{kl} = -int (d_k phi_j)(d_l phi_i)
  double gamma = 0.0;  // -int grad phi_j . grad phi_i = trace(A)
};

// Element-integral kernel shared by every assembly path. Each element's
// integrand is constant, so contributions are exact products.
class SpringAssembler {
public:
  // Precomputes geometry for every element of the mesh.
  SpringAssembler(const Mesh& mesh, const ElasticityTensor& c);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const ElementGeometry& geometry(std::size_t e) const { return geometry_.at(e); }

  // -sum_e |T_e| sum_{q,s} C^{kl}_{qs} (grad phi_j)_s (grad phi_i)_q over the
  // given elements, summed in the order given. i == j yields K_ii.
  Mat coupling(int i, int j, std::span<const int> elements) const;

  SpringConstant spring(const SpringPair& pair) const;
  // K_ji assembled with the roles of the endpoints exchanged.
  Mat reversed(const SpringPair& pair) const;
  // K_ii from its own element integrals, without using any K_ij.
  Mat self(int node) const;

private:
  const Mesh* mesh_;
  ElasticityTensor coeffs_;
  std::vector<ElementGeometry> geometry_;
};

SpringConstant spring_constant(const Mesh& mesh, const ElasticityTensor& c, const SpringPair& pair);
Mat reverse_spring_constant(const Mesh& mesh, const ElasticityTensor& c, const SpringPair& pair);
Mat self_coupling(const Mesh& mesh, const ElasticityTensor& c, int node);

// One SpringConstant per pair, same order as `pairs`.
std::vector<SpringConstant> assemble_springs(const Mesh& mesh, const ElasticityTensor& c,
                                             const std::vector<SpringPair>& pairs);

IsotropicDecomposition isotropic_decomposition(const Mesh& mesh, const SpringPair& pair);

// -sum of the given spring constants of one node. Throws InputError when the
// set is empty or its size differs from the node's neighbour count.
Mat diagonal_constant(std::span<const Mat> springs, std::size_t expected_count);

// ---------------------------------------------------------------------------
// Loads and boundary values
// ---------------------------------------------------------------------------

using VectorField = std::function<Vec(const Vec&)>;

// F_i (i in J0) and g_i (i in J1), keyed by node index.
struct LoadData {
  std::map<int, Vec> F;
  std::map<int, Vec> g;
};

// F_i^k = <f, phi_i e_k> by the vertex rule: sum over elements at node i of
// |T| / (d + 1) f(P_i). Exact when f is constant.
std::map<int, Vec> load_vector(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& f);
// g_i = g(P_i).
std::map<int, Vec> dirichlet_values(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& g);

LoadData make_loads(const Mesh& mesh, const BoundaryPartition& partition, const VectorField& f, const VectorField& g);

// x -> B x + c.
VectorField affine_field(const Mat& B, const Vec& c);
VectorField constant_field(const Vec& c);

}  // namespace springfem
