#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "springfem/assembly.hpp"
#include "springfem/elasticity.hpp"
#include "springfem/mesh.hpp"
#include "springfem/types.hpp"

namespace springfem {

// One spring stored once per unordered pair, oriented i -> j with i < j.
// K_ji is K^T (exactly K itself for springs that passed the symmetry check).
struct StoredSpring {
  int i = 0;
  int j = 0;
  Mat K;
  bool a_pij = false;
};

struct Neighbor {
  int node = 0;
  std::size_t spring = 0;  // index into SpringBlockSystem::springs()
};

// Tensor-valued spring-block system with a Dirichlet boundary, derived from
// P1 finite elements. Immutable after build_system().
class SpringBlockSystem {
public:
  SpringBlockSystem(int dim, std::size_t num_nodes, BoundaryPartition partition, std::vector<StoredSpring> springs,
                    double zero_threshold, std::map<int, Vec> F, std::map<int, Vec> g);

  int dim() const noexcept { return dim_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  const BoundaryPartition& partition() const noexcept { return partition_; }
  const std::vector<StoredSpring>& springs() const noexcept { return springs_; }
  // Lambda_i: neighbours j with ||K_ij||_F above the zero threshold, ascending.
  const std::vector<Neighbor>& neighbors(int i) const { return neighbors_.at(i); }
  const std::map<int, Vec>& forces() const noexcept { return F_; }
  const std::map<int, Vec>& boundary_values() const noexcept { return g_; }

  // K_ij as seen from node `from` towards neighbour n.
  Mat coupling(int from, const Neighbor& n) const;

private:
  int dim_;
  std::size_t num_nodes_;
  BoundaryPartition partition_;
  std::vector<StoredSpring> springs_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::map<int, Vec> F_;
  std::map<int, Vec> g_;
};

struct BuildOptions {
  // Relative tolerance of the K_ij = K_ji check on A-Pij springs.
  double symmetry_tol = 1e-10;
  // K_ij counts as O when ||K_ij||_F <= zero_rel * max ||K||_F.
  double zero_rel = 1e-14;
};

// Assembles every spring, checks symmetry on A-Pij springs (NumericalError if
// violated), and evaluates loads and boundary values. Throws InputError if J0
// or J1 is empty or the tensor is not fully symmetric.
SpringBlockSystem build_system(const Mesh& mesh, const ElasticityTensor& c, const VectorField& f, const VectorField& g,
                               const BuildOptions& options = {});

struct Displacement {
  std::vector<Vec> u;  // one vector per node
};

enum class SolverMethod { Direct, ConjugateGradient };

struct SolverOptions {
  std::size_t direct_max_unknowns = 3000;
  double cg_tolerance = 1e-12;
  std::size_t cg_iteration_factor = 50;
  double residual_rel_tol = 1e-9;
};

struct SolveInfo {
  SolverMethod method = SolverMethod::Direct;
  std::size_t unknowns = 0;
  std::size_t iterations = 0;
  double cg_error = 0.0;
  double max_residual = 0.0;  // max_i |r_i| after the solve
};

// Solves sum_{j in Lambda_i} K_ij (u_j - u_i) + F_i = 0 for i in J0 with u = g
// on J1, by elimination of the boundary unknowns. Throws NumericalError when
// the factorization fails, CG does not converge, or the residual check fails.
Displacement solve(const SpringBlockSystem& system, const SolverOptions& options = {}, SolveInfo* info = nullptr);

// r_i = sum_{j in Lambda_i} K_ij (u_j - u_i) + F_i, aligned with
// partition().interior.
std::vector<Vec> spring_residual(const SpringBlockSystem& system, const Displacement& u);

// <f, phi_i e_k> - a(u_h, phi_i e_k) for i in J0, aligned with
// partition.interior, computed from element strains and stresses only.
std::vector<Vec> fem_residual(const Mesh& mesh, const ElasticityTensor& c, const BoundaryPartition& partition,
                              const Displacement& u, const std::map<int, Vec>& F);

// a(u_h, v_h) = int c_pqrs e_rs(u_h) e_pq(v_h).
double fem_bilinear(const Mesh& mesh, const ElasticityTensor& c, const Displacement& u, const Displacement& v);
// a(u_h, u_h) / 2 - sum_{J0} F_i . u_i
double fem_energy(const Mesh& mesh, const ElasticityTensor& c, const Displacement& u, const std::map<int, Vec>& F);

// (u, v)_K = sum over springs of {K_ij (u_j - u_i)} . (v_j - v_i).
double bilinear_K(const SpringBlockSystem& system, const Displacement& u, const Displacement& v);
// (u, u)_K / 2 - sum_{J0} F_i . u_i
double energy(const SpringBlockSystem& system, const Displacement& u);

double max_abs(const std::vector<Vec>& values);

struct SolvabilityReport {
  bool certified = false;
  std::size_t pd_springs = 0;
  std::size_t unreached = 0;  // J0 nodes with no PD chain to J1
};

// Certified when every J0 node reaches J1 through positive-definite springs.
// Failure does not imply the system is singular.
SolvabilityReport solvability_check(const SpringBlockSystem& system);

// CSV "node,x,y[,z],u1,u2[,u3]" with 17 significant digits.
std::string displacement_csv(const Mesh& mesh, const Displacement& u);

}  // namespace springfem
