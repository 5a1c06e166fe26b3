#include "springfem/elasticity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

namespace springfem {

ElasticityTensor::ElasticityTensor(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3) throw InputError("tensor dimension must be 2 or 3");
}

double ElasticityTensor::max_abs() const noexcept {
  double m = 0.0;
  const int n = dim_ * dim_ * dim_ * dim_;
  for (int a = 0; a < n; ++a) m = std::max(m, std::abs(c_[a]));
  return m;
}

double symmetry_defect(const ElasticityTensor& c) {
  const int d = c.dim();
  const double scale = c.max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) {
          const double v = c(p, q, r, s);
          worst = std::max({worst, std::abs(v - c(r, s, p, q)), std::abs(v - c(q, p, r, s)),
                            std::abs(v - c(p, q, s, r))});
        }
  return worst / scale;
}

void validate_symmetry(const ElasticityTensor& c, double rel_tol) {
  const double defect = symmetry_defect(c);
  if (defect > rel_tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "elasticity tensor violates major/minor symmetry (relative defect %.3e)", defect);
    throw InputError(buf);
  }
}

double min_symmetric_eigenvalue(const ElasticityTensor& c) {
  const int d = c.dim();
  // Mandel basis of symmetric matrices: diagonal units, then sqrt(1/2)(e_pq + e_qp).
  std::vector<std::pair<int, int>> basis;
  for (int p = 0; p < d; ++p) basis.emplace_back(p, p);
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) basis.emplace_back(p, q);
  const int n = static_cast<int>(basis.size());
  auto weight = [](int p, int q) { return p == q ? 1.0 : std::sqrt(2.0); };
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto [p, q] = basis[a];
      const auto [r, s] = basis[b];
      m(a, b) = weight(p, q) * weight(r, s) * c(p, q, r, s);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_uniformly_positive_definite(const ElasticityTensor& c) {
  return min_symmetric_eigenvalue(c) > 1e-12 * c.max_abs();
}

bool has_cauchy_symmetry(const ElasticityTensor& c, double rel_tol) {
  const int d = c.dim();
  const double tol = rel_tol * c.max_abs();
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          if (std::abs(c(p, q, r, s) - c(r, q, p, s)) > tol) return false;
  return true;
}

double symmetrized_coeff(const ElasticityTensor& c, int k, int l, int q, int s) {
  return 0.25 * (c(k, q, l, s) + c(q, k, l, s) + c(k, q, s, l) + c(q, k, s, l));
}

ElasticityTensor symmetrized_coefficients(const ElasticityTensor& c) {
  const int d = c.dim();
  ElasticityTensor out(d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int q = 0; q < d; ++q)
        for (int s = 0; s < d; ++s) out(k, l, q, s) = symmetrized_coeff(c, k, l, q, s);
  return out;
}

ElasticityTensor random_full_symmetric_tensor(std::uint64_t seed, int dim) {
  ElasticityTensor c(dim);
  std::mt19937_64 rng(seed);
  // Canonical representative of each orbit: p <= q, r <= s, (p,q) <= (r,s).
  for (int p = 0; p < dim; ++p)
    for (int q = p; q < dim; ++q)
      for (int r = 0; r < dim; ++r)
        for (int s = r; s < dim; ++s) {
          if (std::make_pair(p, q) > std::make_pair(r, s)) continue;
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          const double v = 2.0 * u - 1.0;
          for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
            for (auto [e, f] : {std::pair{r, s}, std::pair{s, r}}) {
              c(a, b, e, f) = v;
              c(e, f, a, b) = v;
            }
        }
  return c;
}

void validate_material(const IsotropicMaterial& m, int dim) {
  if (!std::isfinite(m.lambda) || !std::isfinite(m.mu)) throw InputError("Lame parameters must be finite");
  if (!(m.mu > 0.0)) throw InputError("shear modulus mu must be positive");
  if (!(m.lambda + (2.0 / dim) * m.mu > 0.0))
    throw InputError("inadmissible material: lambda + (2/d) mu must be positive");
}

ElasticityTensor isotropic_tensor(const IsotropicMaterial& m, int dim) {
  validate_material(m, dim);
  ElasticityTensor c(dim);
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q)
      for (int r = 0; r < dim; ++r)
        for (int s = 0; s < dim; ++s)
          c(p, q, r, s) = m.lambda * delta(p, q) * delta(r, s) + m.mu * (delta(p, r) * delta(q, s) + delta(p, s) * delta(q, r));
  return c;
}

IsotropicMaterial material_from_poisson(double nu, double mu) {
  if (!(nu > -1.0 && nu < 0.5)) throw InputError("Poisson ratio must lie in (-1, 1/2)");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InputError("shear modulus mu must be positive");
  return {2.0 * mu * nu / (1.0 - 2.0 * nu), mu};
}

double plane_stress_poisson(double nu) { return nu / (1.0 - nu); }

double poisson_from_plane_stress(double nu2d) { return nu2d / (1.0 + nu2d); }

ElasticityTensor parse_tensor(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    tokens.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  if (tokens.size() < 4 || tokens[0] != "tensor" || tokens[1] != "v1" || tokens[2] != "dim")
    throw InputError("tensor file: expected 'tensor v1' and 'dim D' header");
  int dim = 0;
  if (tokens[3] == "2") dim = 2;
  else if (tokens[3] == "3") dim = 3;
  else throw InputError("tensor file: dim must be 2 or 3");
  const std::size_t count = static_cast<std::size_t>(dim * dim * dim * dim);
  if (tokens.size() != 4 + count)
    throw InputError("tensor file: expected " + std::to_string(count) + " coefficients, got " +
                     std::to_string(tokens.size() - 4));
  ElasticityTensor c(dim);
  std::size_t t = 4;
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q)
      for (int r = 0; r < dim; ++r)
        for (int s = 0; s < dim; ++s, ++t) {
          double v = 0;
          auto [ptr, ec] = std::from_chars(tokens[t].data(), tokens[t].data() + tokens[t].size(), v);
          if (ec != std::errc() || ptr != tokens[t].data() + tokens[t].size() || !std::isfinite(v))
            throw InputError("tensor file: bad coefficient '" + std::string(tokens[t]) + "'");
          c(p, q, r, s) = v;
        }
  return c;
}

std::string write_tensor(const ElasticityTensor& c) {
  std::ostringstream out;
  const int d = c.dim();
  out << "tensor v1\ndim " << d << "\n";
  char buf[64];
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int r = 0; r < d; ++r) {
        for (int s = 0; s < d; ++s) {
          std::snprintf(buf, sizeof buf, "%.17g", c(p, q, r, s));
          out << (s ? " " : "") << buf;
        }
        out << "\n";
      }
  return out.str();
}

}  // namespace springfem
