#pragma once

#include <span>
#include <vector>

#include "springfem/assembly.hpp"
#include "springfem/elasticity.hpp"
#include "springfem/mesh.hpp"
#include "springfem/types.hpp"

namespace springfem {

// Eigenvalues of (M + M^T)/2 in descending order, by cyclic Jacobi rotations
// run until the off-diagonal norm drops below 1e-14 ||M||_F.
// Throws InputError on non-finite entries.
Vec sym_eigenvalues(const Mat& M);

// Relative tolerance of every positivity decision.
inline constexpr double kPdRelTol = 1e-10;

struct PdClassification {
  bool pd = false;
  double margin = 0.0;     // smallest eigenvalue
  double tolerance = 0.0;  // tau = kPdRelTol * max(||K||_F, scale)
};

// pd iff the smallest eigenvalue exceeds tau. Boundary cases are not pd.
PdClassification classify_pd(const Mat& K, double scale = 0.0);

struct Theorem2Result {
  bool pd_predicted = false;
  double lhs = 0.0;        // -eta_d = max_{|xi|=1} int (grad phi_j . xi)(grad phi_i . xi)
  double rhs = 0.0;        // gamma mu / (lambda + mu)
  double tolerance = 0.0;  // tau of classify_pd, divided by lambda + mu
};

// Exact positivity criterion for isotropic springs: pd iff lhs < rhs.
// Throws InputError if lambda + mu <= 0.
Theorem2Result theorem2_check(const IsotropicDecomposition& dec, const IsotropicMaterial& material);

// Safety gap on the cosine comparison so that exact-boundary configurations
// (equilateral at nu = 1/4, regular tetrahedron at nu = 0) are not certified
// by rounding.
inline constexpr double kTheorem3CosineGap = 1e-9;

// Sufficient angle criterion: cos(theta) > 1 / (3 - 4 nu) for every opposite
// angle. Throws InputError on an empty angle list.
bool theorem3_check(std::span<const double> angles, double nu);

// 1 / (3 - 4 nu).
double theorem3_threshold(double nu);
// Inverse: the nu at which cos(theta) equals the threshold.
double theorem3_critical_nu(double theta);

// Open interval of Poisson ratios for which the spring is positive definite.
// An empty interval is encoded with lo > hi (lo = 1/2, hi = -1).
struct PoissonInterval {
  double lo = -1.0;
  double hi = 0.5;

  bool empty() const noexcept { return !(lo < hi); }
  bool contains(double nu) const noexcept { return nu > lo && nu < hi; }
};

inline constexpr PoissonInterval kEmptyInterval{0.5, -1.0};

// Solves eta_d + (1 - 2 nu) gamma > 0 for nu within (-1, 1/2).
PoissonInterval critical_poisson(const IsotropicDecomposition& dec);

struct Lemma4Result {
  double value = 0.0;
  Vec argmax;               // one maximiser; its negation is the other
  bool degenerate = false;  // a = -b: every unit vector orthogonal to a
};

// max_{|x|=1} (a.x)(b.x) = (1 + a.b) / 2 for unit a, b.
// Throws InputError unless |a| = |b| = 1 within 1e-12.
Lemma4Result lemma4_max(const Vec& a, const Vec& b);

// Brute-force maximum over a uniform angle grid (2D) or a Fibonacci sphere
// (3D) of `samples` directions. Requires samples >= 1000.
double lemma4_bruteforce(const Vec& a, const Vec& b, int samples);

// ---------------------------------------------------------------------------
// Per-spring reports
// ---------------------------------------------------------------------------

struct SpringReport {
  int i = 0;
  int j = 0;
  bool a_pij = false;
  Vec zeta;  // eigenvalues of K, descending
  Vec eta;   // eigenvalues of sym(A), descending
  double gamma = 0.0;
  double sym_residual = 0.0;  // ||K_ij - K_ji||_F / ||K_ij||_F
  PdClassification pd;
  bool theorem3 = false;
  std::vector<double> angles;  // opposite angles, radians
  double theta_max = 0.0;
  PoissonInterval critical;
  double lambda_plus_mu = 1.0;

  double zeta_min() const { return zeta[zeta.size() - 1]; }
  double eta_min() const { return eta[eta.size() - 1]; }
};

// Reports for every pair, in the order given. Uses the full isotropic tensor
// for K and the decomposition for eta, gamma and the critical interval.
std::vector<SpringReport> analyze_springs(const Mesh& mesh, const std::vector<SpringPair>& pairs,
                                          const IsotropicMaterial& material);

// Theorem 3 proof step: lemma4_max of the two outward facet normals of
// element e equals (1 - cos theta) / 2. Returns the pair (lemma value, angle
// based value).
std::pair<double, double> theorem3_element_bound(const Mesh& mesh, std::size_t e, const SpringPair& pair);

}  // namespace springfem
