#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "springfem/errors.hpp"

namespace springfem {

// Homogeneous rank-4 elasticity tensor c_pqrs, stored dense. Indices are
// 0-based.
class ElasticityTensor {
public:
  explicit ElasticityTensor(int dim);

  int dim() const noexcept { return dim_; }

  double operator()(int p, int q, int r, int s) const noexcept { return c_[index(p, q, r, s)]; }
  double& operator()(int p, int q, int r, int s) noexcept { return c_[index(p, q, r, s)]; }

  double max_abs() const noexcept;

private:
  int index(int p, int q, int r, int s) const noexcept { return ((p * dim_ + q) * dim_ + r) * dim_ + s; }

  int dim_;
  std::array<double, 81> c_{};
};

// Largest violation of c_pqrs = c_rspq, c_pqrs = c_qprs and c_pqrs = c_pqsr,
// relative to max |c|. Zero for an all-zero tensor.
double symmetry_defect(const ElasticityTensor& c);

// Throws InputError if symmetry_defect(c) > rel_tol.
void validate_symmetry(const ElasticityTensor& c, double rel_tol = 1e-12);

// Smallest eigenvalue of c acting on symmetric matrices (Mandel form).
double min_symmetric_eigenvalue(const ElasticityTensor& c);
bool is_uniformly_positive_definite(const ElasticityTensor& c);

// True when additionally c_pqrs = c_rqps. An isotropic tensor has this only
// when lambda == mu.
bool has_cauchy_symmetry(const ElasticityTensor& c, double rel_tol = 1e-12);

// C^{kl}_{qs} = (c_kqls + c_qkls + c_kqsl + c_qksl) / 4.
double symmetrized_coeff(const ElasticityTensor& c, int k, int l, int q, int s);

// All d^4 symmetrized coefficients, laid out like the tensor itself with
// index order (k, l, q, s).
ElasticityTensor symmetrized_coefficients(const ElasticityTensor& c);

// Fixed seed gives a bit-identical tensor. One uniform draw in [-1, 1] per
// symmetry orbit, so major and minor symmetries hold exactly.
ElasticityTensor random_full_symmetric_tensor(std::uint64_t seed, int dim);

// ---------------------------------------------------------------------------
// Isotropic materials
// ---------------------------------------------------------------------------

struct IsotropicMaterial {
  double lambda = 0.0;
  double mu = 1.0;

  double nu() const noexcept { return lambda / (2.0 * (lambda + mu)); }
};

// Checks mu > 0 and lambda + (2/d) mu > 0.
void validate_material(const IsotropicMaterial& m, int dim);

// c_pqrs = lambda d_pq d_rs + mu (d_pr d_qs + d_ps d_qr).
ElasticityTensor isotropic_tensor(const IsotropicMaterial& m, int dim);

// lambda = 2 mu nu / (1 - 2 nu). Requires mu > 0 and nu in (-1, 1/2).
IsotropicMaterial material_from_poisson(double nu, double mu);

// Plane-stress Poisson ratio equivalent to a plane-strain one: nu / (1 - nu).
double plane_stress_poisson(double nu);
// Inverse map: nu2d / (1 + nu2d).
double poisson_from_plane_stress(double nu2d);

// ---------------------------------------------------------------------------
// tensor v1 text format: "tensor v1", "dim D", then D^4 floats in row-major
// (p, q, r, s) order. Whitespace and line breaks between floats are free.
// ---------------------------------------------------------------------------

ElasticityTensor parse_tensor(std::string_view text);
std::string write_tensor(const ElasticityTensor& c);

}  // namespace springfem
