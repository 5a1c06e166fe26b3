#include "springfem/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "springfem/analysis.hpp"
#include "springfem/assembly.hpp"
#include "springfem/experiments.hpp"
#include "springfem/spring_system.hpp"

namespace springfem {

namespace {

std::vector<NamedMesh> builtin_meshes(std::uint64_t seed) {
  std::vector<NamedMesh> out;
  const std::string s = std::to_string(seed);
  for (const std::string& spec : std::vector<std::string>{
           "square_right(4)", "equilateral(5)", "cube_kuhn(2)", "jitter(square_right(6),0.03," + s + ")",
           "jitter(equilateral(5),0.08," + s + ")", "jitter(cube_kuhn(3),0.04," + s + ")"})
    out.push_back({spec, generate_mesh(spec)});
  return out;
}

std::vector<ElasticityTensor> test_tensors(int dim, std::uint64_t seed, const std::optional<ElasticityTensor>& extra) {
  std::vector<ElasticityTensor> out;
  out.push_back(isotropic_tensor({1.3, 0.7}, dim));
  for (std::uint64_t k = 0; k < 4; ++k) out.push_back(random_full_symmetric_tensor(seed * 1000 + k, dim));
  if (extra && extra->dim() == dim) out.push_back(*extra);
  return out;
}

VerifyGroupResult check_symmetry(const std::vector<NamedMesh>& meshes, const VerifyOptions& options) {
  VerifyGroupResult res{"symmetry", true, 0, 0.0, 1e-10, "max ||K_ij-K_ji||/||K_ij|| over A-Pij springs"};
  for (const auto& nm : meshes) {
    const auto pairs = spring_adjacency(nm.mesh);
    for (const auto& c : test_tensors(nm.mesh.dim(), options.seed, options.tensor)) {
      const SpringAssembler as(nm.mesh, c);
      for (const auto& p : pairs) {
        if (!p.satisfies_a_pij) continue;
        const Mat K = as.spring(p).K;
        const double n = K.norm();
        if (n == 0.0) continue;
        res.worst = std::max(res.worst, (K - as.reversed(p)).norm() / n);
        ++res.cases;
      }
    }
  }
  res.pass = res.worst <= res.limit;
  return res;
}

VerifyGroupResult check_row_sum(const std::vector<NamedMesh>& meshes, const VerifyOptions& options) {
  VerifyGroupResult res{"row-sum", true, 0, 0.0, 1e-12, "max ||K_ii + sum_j K_ij|| / max_j ||K_ij|| per node"};
  for (const auto& nm : meshes) {
    const auto pairs = spring_adjacency(nm.mesh);
    for (const auto& c : test_tensors(nm.mesh.dim(), options.seed, options.tensor)) {
      const SpringAssembler as(nm.mesh, c);
      std::vector<Mat> sum(nm.mesh.num_nodes(), zero_mat(nm.mesh.dim()));
      std::vector<double> scale(nm.mesh.num_nodes(), 0.0);
      for (const auto& p : pairs) {
        const Mat K = as.spring(p).K;
        const Mat Kt = as.reversed(p);
        sum[p.i] += K;
        sum[p.j] += Kt;
        scale[p.i] = std::max(scale[p.i], K.norm());
        scale[p.j] = std::max(scale[p.j], Kt.norm());
      }
      for (std::size_t i = 0; i < nm.mesh.num_nodes(); ++i) {
        const Mat Kii = as.self(static_cast<int>(i));
        scale[i] = std::max(scale[i], Kii.norm());
        res.worst = std::max(res.worst, (Kii + sum[i]).norm() / scale[i]);
        ++res.cases;
      }
    }
  }
  res.pass = res.worst <= res.limit;
  return res;
}

VerifyGroupResult check_theorem2(const std::vector<NamedMesh>& meshes) {
  VerifyGroupResult res{"thm2-equivalence", true, 0, 0.0, 0.0, "hard disagreements (|margin| > 2 tau)"};
  const auto grid = default_poisson_grid();
  for (const auto& nm : meshes) {
    const auto pairs = spring_adjacency(nm.mesh);
    std::vector<IsotropicDecomposition> decs;
    for (const auto& p : pairs) decs.push_back(isotropic_decomposition(nm.mesh, p));
    for (double nu : grid) {
      const IsotropicMaterial m = material_from_poisson(nu, 1.0);
      const SpringAssembler as(nm.mesh, isotropic_tensor(m, nm.mesh.dim()));
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!pairs[k].satisfies_a_pij) continue;
        const auto direct = classify_pd(as.spring(pairs[k]).K);
        const auto thm2 = theorem2_check(decs[k], m);
        ++res.cases;
        if (direct.pd != thm2.pd_predicted && std::abs(direct.margin) > 2.0 * direct.tolerance) res.worst += 1.0;
      }
    }
  }
  res.pass = res.worst == 0.0;
  return res;
}

VerifyGroupResult check_theorem3(const std::vector<NamedMesh>& meshes) {
  VerifyGroupResult res{"thm3-implication", true, 0, 0.0, 0.0, "counterexamples (theorem3 and not pd)"};
  const auto grid = default_poisson_grid();
  std::size_t certified = 0;
  for (const auto& nm : meshes) {
    const auto pairs = spring_adjacency(nm.mesh);
    std::vector<std::vector<double>> angles;
    for (const auto& p : pairs) angles.push_back(opposite_angles(nm.mesh, p));
    for (double nu : grid) {
      const IsotropicMaterial m = material_from_poisson(nu, 1.0);
      const SpringAssembler as(nm.mesh, isotropic_tensor(m, nm.mesh.dim()));
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!pairs[k].satisfies_a_pij) continue;
        ++res.cases;
        if (!theorem3_check(angles[k], nu)) continue;
        ++certified;
        if (!classify_pd(as.spring(pairs[k]).K).pd) res.worst += 1.0;
      }
    }
  }
  res.note += "; " + std::to_string(certified) + " certified cases";
  res.pass = res.worst == 0.0 && res.cases >= 10000;
  return res;
}

VerifyGroupResult check_lemma4(std::uint64_t seed) {
  VerifyGroupResult res{"lemma4", true, 0, 0.0, 1e-3, "max |brute force - (1+a.b)/2|"};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_unit = [&](int d) {
    Vec v(d);
    do {
      for (int k = 0; k < d; ++k) v[k] = normal(rng);
    } while (v.norm() < 1e-8);
    return Vec(v / v.norm());
  };
  for (int k = 0; k < 100; ++k) {
    const int d = k % 2 == 0 ? 2 : 3;
    const Vec a = random_unit(d);
    const Vec b = random_unit(d);
    const double brute = lemma4_bruteforce(a, b, d == 2 ? 10000 : 100000);
    res.worst = std::max(res.worst, std::abs(brute - lemma4_max(a, b).value));
    ++res.cases;
  }
  // Exact cases.
  double exact_err = 0.0;
  for (int d = 2; d <= 3; ++d) {
    const Vec a = random_unit(d);
    exact_err = std::max(exact_err, std::abs(lemma4_max(a, a).value - 1.0));
    exact_err = std::max(exact_err, std::abs(lemma4_max(a, Vec(-a)).value));
    res.cases += 2;
  }
  res.pass = res.worst <= res.limit && exact_err <= 1e-12;
  return res;
}

VerifyGroupResult check_proposition1(const std::vector<NamedMesh>& meshes, std::uint64_t seed) {
  VerifyGroupResult res{"proposition1", true, 0, 0.0, 1e-10, "max |fem residual - spring residual|; solves at 1e-9"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  bool solves_ok = true;
  for (const auto& nm : meshes) {
    const int d = nm.mesh.dim();
    const IsotropicMaterial m = material_from_poisson(0.3, 1.0);
    const ElasticityTensor c = isotropic_tensor(m, d);
    Vec f0(d);
    for (int k = 0; k < d; ++k) f0[k] = unif(rng);
    const auto sys = build_system(nm.mesh, c, constant_field(f0), constant_field(zero_vec(d)));
    for (int trial = 0; trial < 10; ++trial) {
      Displacement u{std::vector<Vec>(nm.mesh.num_nodes(), zero_vec(d))};
      for (auto& ui : u.u)
        for (int k = 0; k < d; ++k) ui[k] = unif(rng);
      const auto rs = spring_residual(sys, u);
      const auto rf = fem_residual(nm.mesh, c, sys.partition(), u, sys.forces());
      for (std::size_t a = 0; a < rs.size(); ++a) res.worst = std::max(res.worst, (rs[a] - rf[a]).cwiseAbs().maxCoeff());
      ++res.cases;
    }
    try {
      const auto u = solve(sys);
      const double tol = 1e-9 * (1.0 + max_abs([&] {
                                   std::vector<Vec> v;
                                   for (const auto& [i, Fi] : sys.forces()) v.push_back(Fi);
                                   return v;
                                 }()));
      solves_ok = solves_ok && max_abs(spring_residual(sys, u)) <= tol &&
                  max_abs(fem_residual(nm.mesh, c, sys.partition(), u, sys.forces())) <= tol;
    } catch (const Error&) {
      solves_ok = false;
    }
    ++res.cases;
  }
  if (!solves_ok) res.note += "; solve residual check FAILED";
  res.pass = res.worst <= res.limit && solves_ok;
  return res;
}

}  // namespace

std::vector<VerifyGroupResult> run_verification(const VerifyOptions& options) {
  std::vector<std::string> groups = options.groups.empty() ? kVerifyGroups : options.groups;
  for (const auto& g : groups)
    if (std::find(kVerifyGroups.begin(), kVerifyGroups.end(), g) == kVerifyGroups.end())
      throw InputError("unknown verification group '" + g + "'");

  const auto meshes = builtin_meshes(options.seed);
  std::vector<VerifyGroupResult> out;
  for (const auto& g : groups) {
    if (g == "symmetry") out.push_back(check_symmetry(meshes, options));
    else if (g == "row-sum") out.push_back(check_row_sum(meshes, options));
    else if (g == "thm2-equivalence") out.push_back(check_theorem2(meshes));
    else if (g == "thm3-implication") out.push_back(check_theorem3(meshes));
    else if (g == "lemma4") out.push_back(check_lemma4(options.seed));
    else if (g == "proposition1") out.push_back(check_proposition1(meshes, options.seed));
  }
  return out;
}

std::string verification_csv(const std::vector<VerifyGroupResult>& results) {
  std::ostringstream out;
  out << kVerifyCsvHeader << "\n";
  for (const auto& r : results)
    out << r.group << ',' << (r.pass ? "pass" : "FAIL") << ',' << r.cases << ',' << format_real(r.worst) << ','
        << format_real(r.limit) << ',' << csv_field(r.note) << "\n";
  return out.str();
}

}  // namespace springfem
