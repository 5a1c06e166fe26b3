#include "springfem/spring_system.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "springfem/analysis.hpp"
#include "springfem/parallel.hpp"

namespace springfem {

SpringBlockSystem::SpringBlockSystem(int dim, std::size_t num_nodes, BoundaryPartition partition,
                                     std::vector<StoredSpring> springs, double zero_threshold, std::map<int, Vec> F,
                                     std::map<int, Vec> g)
    : dim_(dim),
      num_nodes_(num_nodes),
      partition_(std::move(partition)),
      springs_(std::move(springs)),
      neighbors_(num_nodes),
      F_(std::move(F)),
      g_(std::move(g)) {
  for (std::size_t s = 0; s < springs_.size(); ++s) {
    const auto& sp = springs_[s];
    if (!(sp.K.norm() > zero_threshold)) continue;
    neighbors_.at(sp.i).push_back({sp.j, s});
    neighbors_.at(sp.j).push_back({sp.i, s});
  }
  for (auto& list : neighbors_)
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

Mat SpringBlockSystem::coupling(int from, const Neighbor& n) const {
  const auto& sp = springs_.at(n.spring);
  return sp.i == from ? sp.K : Mat(sp.K.transpose());
}

SpringBlockSystem build_system(const Mesh& mesh, const ElasticityTensor& c, const VectorField& f, const VectorField& g,
                               const BuildOptions& options) {
  validate_symmetry(c);
  BoundaryPartition partition = classify_boundary(mesh);
  if (partition.interior.empty()) throw InputError("mesh has no interior nodes (J0 is empty)");
  if (partition.boundary.empty()) throw InputError("mesh has no boundary nodes (J1 is empty)");

  const auto pairs = spring_adjacency(mesh, partition);
  const SpringAssembler assembler(mesh, c);
  std::vector<StoredSpring> springs(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto& p = pairs[k];
    springs[k] = {p.i, p.j, assembler.coupling(p.i, p.j, p.incident_elements), p.satisfies_a_pij};
  });

  double scale = 0.0;
  for (const auto& s : springs) scale = std::max(scale, s.K.norm());

  for (auto& s : springs) {
    if (!s.a_pij) continue;
    const double norm = s.K.norm();
    const double defect = (s.K - s.K.transpose()).norm();
    if (defect > options.symmetry_tol * std::max(norm, options.zero_rel * scale)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "spring (%d,%d) violates K_ij = K_ji: relative defect %.3e", s.i, s.j,
                    norm > 0 ? defect / norm : defect);
      throw NumericalError(buf);
    }
    s.K = (0.5 * (s.K + s.K.transpose())).eval();
  }

  LoadData loads = make_loads(mesh, partition, f, g);
  return SpringBlockSystem(mesh.dim(), mesh.num_nodes(), std::move(partition), std::move(springs),
                           options.zero_rel * scale, std::move(loads.F), std::move(loads.g));
}

namespace {

std::vector<Vec> residual_impl(const SpringBlockSystem& system, const Displacement& u) {
  const auto& interior = system.partition().interior;
  std::vector<Vec> r(interior.size());
  for (std::size_t a = 0; a < interior.size(); ++a) {
    const int i = interior[a];
    Vec ri = system.forces().at(i);
    for (const auto& n : system.neighbors(i)) ri += system.coupling(i, n) * (u.u[n.node] - u.u[i]);
    r[a] = ri;
  }
  return r;
}

}  // namespace

Displacement solve(const SpringBlockSystem& system, const SolverOptions& options, SolveInfo* info) {
  const int d = system.dim();
  const auto& part = system.partition();
  std::vector<int> position(system.num_nodes(), -1);
  for (std::size_t a = 0; a < part.interior.size(); ++a) position[part.interior[a]] = static_cast<int>(a);
  const std::size_t n = part.interior.size() * d;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < part.interior.size(); ++a) {
    const int i = part.interior[a];
    const Eigen::Index row = static_cast<Eigen::Index>(a) * d;
    Mat diag = zero_mat(d);
    Vec b = system.forces().at(i);
    for (const auto& nb : system.neighbors(i)) {
      const Mat K = system.coupling(i, nb);
      diag += K;
      if (position[nb.node] >= 0) {
        const Eigen::Index col = static_cast<Eigen::Index>(position[nb.node]) * d;
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            if (K(k, l) != 0.0) triplets.emplace_back(row + k, col + l, -K(k, l));
      } else {
        b += K * system.boundary_values().at(nb.node);
      }
    }
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) triplets.emplace_back(row + k, row + l, diag(k, l));
    rhs.segment(row, d) = b;
  }
  Eigen::SparseMatrix<double> S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  S.setFromTriplets(triplets.begin(), triplets.end());

  SolveInfo local;
  local.unknowns = n;
  Eigen::VectorXd x;
  if (n <= options.direct_max_unknowns) {
    local.method = SolverMethod::Direct;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError("symmetric factorization failed (" + std::to_string(n) + " unknowns)");
    const auto& D = ldlt.vectorD();
    for (Eigen::Index k = 0; k < D.size(); ++k)
      if (D[k] == 0.0 || !std::isfinite(D[k]))
        throw NumericalError("singular system: zero pivot at unknown " + std::to_string(k));
    x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success) throw NumericalError("back substitution failed");
  } else {
    local.method = SolverMethod::ConjugateGradient;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(options.cg_tolerance);
    cg.setMaxIterations(static_cast<Eigen::Index>(options.cg_iteration_factor * n));
    cg.compute(S);
    x = cg.solve(rhs);
    local.iterations = static_cast<std::size_t>(cg.iterations());
    local.cg_error = cg.error();
    if (cg.info() != Eigen::Success) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "conjugate gradient did not converge: %zu iterations, relative residual %.3e",
                    local.iterations, local.cg_error);
      throw NumericalError(buf);
    }
  }

  Displacement u{std::vector<Vec>(system.num_nodes(), zero_vec(d))};
  for (const auto& [i, gi] : system.boundary_values()) u.u[i] = gi;
  for (std::size_t a = 0; a < part.interior.size(); ++a)
    u.u[part.interior[a]] = x.segment(static_cast<Eigen::Index>(a) * d, d);

  double fmax = 0.0;
  for (const auto& [i, Fi] : system.forces()) fmax = std::max(fmax, Fi.cwiseAbs().maxCoeff());
  local.max_residual = max_abs(residual_impl(system, u));
  if (info) *info = local;
  if (!(local.max_residual <= options.residual_rel_tol * (1.0 + fmax))) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "solution residual %.3e exceeds %.3e", local.max_residual,
                  options.residual_rel_tol * (1.0 + fmax));
    throw NumericalError(buf);
  }
  return u;
}

std::vector<Vec> spring_residual(const SpringBlockSystem& system, const Displacement& u) {
  if (u.u.size() != system.num_nodes()) throw InputError("displacement size does not match the system");
  return residual_impl(system, u);
}

namespace {

// Strain of u_h on element e: sym(sum_v u_v (x) grad phi_v).
Mat element_strain(const Mesh& mesh, std::size_t e, const ElementGeometry& geo, const Displacement& u) {
  const int d = mesh.dim();
  const auto el = mesh.element(e);
  Mat G = zero_mat(d);
  for (int a = 0; a <= d; ++a) G.noalias() += u.u.at(el[a]) * geo.gradients[a].transpose();
  return 0.5 * (G + G.transpose());
}

Mat stress(const ElasticityTensor& c, const Mat& strain) {
  const int d = c.dim();
  Mat sigma = zero_mat(d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      double s = 0.0;
      for (int r = 0; r < d; ++r)
        for (int t = 0; t < d; ++t) s += c(p, q, r, t) * strain(r, t);
      sigma(p, q) = s;
    }
  return sigma;
}

}  // namespace

std::vector<Vec> fem_residual(const Mesh& mesh, const ElasticityTensor& c, const BoundaryPartition& partition,
                              const Displacement& u, const std::map<int, Vec>& F) {
  const int d = mesh.dim();
  if (u.u.size() != mesh.num_nodes()) throw InputError("displacement size does not match the mesh");
  std::vector<Vec> a_form(mesh.num_nodes(), zero_vec(d));
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const Mat sigma = stress(c, element_strain(mesh, e, geo, u));
    const Mat sym_sigma = 0.5 * (sigma + sigma.transpose());
    const auto el = mesh.element(e);
    // a(u_h, phi_v e_k) = |T| sum_q (sigma_kq + sigma_qk)/2 (grad phi_v)_q
    for (int v = 0; v <= d; ++v) a_form[el[v]] += geo.volume * (sym_sigma * geo.gradients[v]);
  }
  std::vector<Vec> out;
  out.reserve(partition.interior.size());
  for (int i : partition.interior) {
    const auto it = F.find(i);
    const Vec Fi = it == F.end() ? zero_vec(d) : it->second;
    out.push_back(Fi - a_form[i]);
  }
  return out;
}

double fem_bilinear(const Mesh& mesh, const ElasticityTensor& c, const Displacement& u, const Displacement& v) {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const Mat sigma = stress(c, element_strain(mesh, e, geo, u));
    const Mat ev = element_strain(mesh, e, geo, v);
    total += geo.volume * sigma.cwiseProduct(ev).sum();
  }
  return total;
}

double fem_energy(const Mesh& mesh, const ElasticityTensor& c, const Displacement& u, const std::map<int, Vec>& F) {
  double work = 0.0;
  for (const auto& [i, Fi] : F) work += Fi.dot(u.u.at(i));
  return 0.5 * fem_bilinear(mesh, c, u, u) - work;
}

double bilinear_K(const SpringBlockSystem& system, const Displacement& u, const Displacement& v) {
  double total = 0.0;
  for (const auto& s : system.springs()) {
    const Vec du = u.u.at(s.j) - u.u.at(s.i);
    const Vec dv = v.u.at(s.j) - v.u.at(s.i);
    total += (s.K * du).dot(dv);
  }
  return total;
}

double energy(const SpringBlockSystem& system, const Displacement& u) {
  double work = 0.0;
  for (const auto& [i, Fi] : system.forces()) work += Fi.dot(u.u.at(i));
  return 0.5 * bilinear_K(system, u, u) - work;
}

double max_abs(const std::vector<Vec>& values) {
  double m = 0.0;
  for (const auto& v : values)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

SolvabilityReport solvability_check(const SpringBlockSystem& system) {
  SolvabilityReport report;
  std::vector<std::uint8_t> pd_spring(system.springs().size(), 0);
  for (std::size_t s = 0; s < system.springs().size(); ++s) {
    pd_spring[s] = classify_pd(system.springs()[s].K).pd ? 1 : 0;
    report.pd_springs += pd_spring[s];
  }

  // Multi-source BFS from J1 over PD springs.
  std::vector<std::uint8_t> reached(system.num_nodes(), 0);
  std::deque<int> queue;
  for (int b : system.partition().boundary) {
    reached[b] = 1;
    queue.push_back(b);
  }
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (const auto& n : system.neighbors(i)) {
      if (!pd_spring[n.spring] || reached[n.node]) continue;
      reached[n.node] = 1;
      queue.push_back(n.node);
    }
  }
  for (int i : system.partition().interior)
    if (!reached[i]) ++report.unreached;
  report.certified = report.unreached == 0;
  return report;
}

std::string displacement_csv(const Mesh& mesh, const Displacement& u) {
  const int d = mesh.dim();
  std::ostringstream out;
  out << "node,x,y" << (d == 3 ? ",z" : "") << ",u1,u2" << (d == 3 ? ",u3" : "") << "\n";
  char buf[64];
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    out << i;
    for (int c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", mesh.node(i)[c]);
      out << buf;
    }
    for (int c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", u.u.at(i)[c]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace springfem
