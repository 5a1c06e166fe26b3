#include "springfem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "springfem/parallel.hpp"

namespace springfem {

Vec sym_eigenvalues(const Mat& M) {
  if (M.rows() != M.cols()) throw InputError("sym_eigenvalues: matrix is not square");
  if (!M.allFinite()) throw InputError("sym_eigenvalues: non-finite entry");
  const int d = static_cast<int>(M.rows());
  Mat a = 0.5 * (M + M.transpose());
  const double norm = a.norm();
  const double stop = 1e-14 * norm;

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) break;

    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  Vec ev(d);
  for (int k = 0; k < d; ++k) ev[k] = a(k, k);
  std::sort(ev.data(), ev.data() + d, std::greater<>());
  return ev;
}

PdClassification classify_pd(const Mat& K, double scale) {
  const Vec ev = sym_eigenvalues(K);
  PdClassification out;
  out.margin = ev[ev.size() - 1];
  out.tolerance = kPdRelTol * std::max(K.norm(), scale);
  out.pd = out.margin > out.tolerance;
  return out;
}

Theorem2Result theorem2_check(const IsotropicDecomposition& dec, const IsotropicMaterial& material) {
  const double lm = material.lambda + material.mu;
  if (!(lm > 0.0)) throw InputError("theorem2_check: lambda + mu must be positive");
  const int d = static_cast<int>(dec.A.rows());
  const Mat A = 0.5 * (dec.A + dec.A.transpose());
  const Vec eta = sym_eigenvalues(A);

  Theorem2Result out;
  out.lhs = -eta[d - 1];
  out.rhs = dec.gamma * material.mu / lm;
  const Mat K = lm * A + material.mu * dec.gamma * Mat::Identity(d, d);
  out.tolerance = kPdRelTol * K.norm() / lm;
  out.pd_predicted = out.lhs < out.rhs - out.tolerance;
  return out;
}

double theorem3_threshold(double nu) { return 1.0 / (3.0 - 4.0 * nu); }

double theorem3_critical_nu(double theta) { return (3.0 - 1.0 / std::cos(theta)) / 4.0; }

bool theorem3_check(std::span<const double> angles, double nu) {
  if (angles.empty()) throw InputError("theorem3_check: empty angle list");
  const double threshold = theorem3_threshold(nu);
  return std::all_of(angles.begin(), angles.end(),
                     [threshold](double theta) { return std::cos(theta) > threshold + kTheorem3CosineGap; });
}

PoissonInterval critical_poisson(const IsotropicDecomposition& dec) {
  const Mat A = 0.5 * (dec.A + dec.A.transpose());
  const Vec eta = sym_eigenvalues(A);
  const double eta_d = eta[eta.size() - 1];
  const double gamma = dec.gamma;
  const double gamma_tol = 1e-12 * A.norm();

  if (std::abs(gamma) <= gamma_tol) return eta_d > 0.0 ? PoissonInterval{-1.0, 0.5} : kEmptyInterval;

  const double nu_star = 0.5 * (1.0 + eta_d / gamma);
  if (gamma > 0.0) {
    const double hi = std::min(nu_star, 0.5);
    return hi > -1.0 ? PoissonInterval{-1.0, hi} : kEmptyInterval;
  }
  const double lo = std::max(nu_star, -1.0);
  return lo < 0.5 ? PoissonInterval{lo, 0.5} : kEmptyInterval;
}

Lemma4Result lemma4_max(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() < 2) throw InputError("lemma4_max: vectors must share a dimension >= 2");
  if (std::abs(a.norm() - 1.0) > 1e-12 || std::abs(b.norm() - 1.0) > 1e-12)
    throw InputError("lemma4_max: inputs must be unit vectors");

  Lemma4Result out;
  out.value = 0.5 * (1.0 + a.dot(b));
  const Vec s = a + b;
  if (s.norm() > 1e-12) {
    out.argmax = s / s.norm();
    return out;
  }
  out.degenerate = true;
  // Any unit vector orthogonal to a: project the coordinate axis least
  // aligned with a.
  int axis = 0;
  for (int k = 1; k < a.size(); ++k)
    if (std::abs(a[k]) < std::abs(a[axis])) axis = k;
  Vec e = Vec::Zero(a.size());
  e[axis] = 1.0;
  Vec x = e - a.dot(e) * a;
  out.argmax = x / x.norm();
  return out;
}

double lemma4_bruteforce(const Vec& a, const Vec& b, int samples) {
  if (samples < 1000) throw InputError("lemma4_bruteforce: need at least 1000 samples");
  if (a.size() != b.size()) throw InputError("lemma4_bruteforce: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  if (a.size() == 2) {
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * k / samples;
      const double x0 = std::cos(t), x1 = std::sin(t);
      best = std::max(best, (a[0] * x0 + a[1] * x1) * (b[0] * x0 + b[1] * x1));
    }
    return best;
  }
  if (a.size() != 3) throw InputError("lemma4_bruteforce: only 2D and 3D are supported");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < samples; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / samples;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    const double x0 = r * std::cos(phi), x1 = r * std::sin(phi);
    best = std::max(best, (a[0] * x0 + a[1] * x1 + a[2] * z) * (b[0] * x0 + b[1] * x1 + b[2] * z));
  }
  return best;
}

std::vector<SpringReport> analyze_springs(const Mesh& mesh, const std::vector<SpringPair>& pairs,
                                          const IsotropicMaterial& material) {
  const ElasticityTensor c = isotropic_tensor(material, mesh.dim());
  const SpringAssembler assembler(mesh, c);
  const double nu = material.nu();

  std::vector<SpringReport> reports(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const SpringPair& pair = pairs[k];
    SpringReport& r = reports[k];
    r.i = pair.i;
    r.j = pair.j;
    r.a_pij = pair.satisfies_a_pij;
    r.lambda_plus_mu = material.lambda + material.mu;

    const Mat K = assembler.coupling(pair.i, pair.j, pair.incident_elements);
    const Mat K_rev = assembler.coupling(pair.j, pair.i, pair.incident_elements);
    const double knorm = K.norm();
    r.sym_residual = knorm > 0.0 ? (K - K_rev).norm() / knorm : 0.0;
    r.zeta = sym_eigenvalues(K);
    r.pd = classify_pd(K);

    const IsotropicDecomposition dec = isotropic_decomposition(mesh, pair);
    r.eta = sym_eigenvalues(dec.A);
    r.gamma = dec.gamma;
    r.critical = critical_poisson(dec);

    r.angles = opposite_angles(mesh, pair);
    r.theta_max = *std::max_element(r.angles.begin(), r.angles.end());
    r.theorem3 = theorem3_check(r.angles, nu);
  });
  return reports;
}

std::pair<double, double> theorem3_element_bound(const Mesh& mesh, std::size_t e, const SpringPair& pair) {
  const int li = local_index(mesh, e, pair.i);
  const int lj = local_index(mesh, e, pair.j);
  if (li < 0 || lj < 0) throw InputError("element is not incident to the spring");
  const ElementGeometry geo = element_geometry(mesh, e);
  const Vec ni = -geo.gradients[li].normalized();
  const Vec nj = -geo.gradients[lj].normalized();
  const double theta = opposite_angle(mesh, e, pair);
  return {lemma4_max(nj, ni).value, 0.5 * (1.0 - std::cos(theta))};
}

}  // namespace springfem
