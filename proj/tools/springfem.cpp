// springfem: command-line front end for spring-constant analysis, Poisson
// sweeps, colormaps, spring-block solves and the verification suites.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "springfem/analysis.hpp"
#include "springfem/experiments.hpp"
#include "springfem/mesh.hpp"
#include "springfem/spring_system.hpp"
#include "springfem/verification.hpp"

namespace {

using namespace springfem;

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3, kVerification = 4 };

struct MeshFlags {
  std::string path;
  std::string gen;
};

struct MaterialFlags {
  std::optional<double> nu;
  std::optional<double> lambda;
  double mu = 1.0;
  bool plane_stress = false;
};

void add_mesh_flags(CLI::App* cmd, MeshFlags& m) {
  auto* mesh = cmd->add_option("--mesh", m.path, "springmesh v1 file");
  auto* gen = cmd->add_option("--gen", m.gen, "generator spec, e.g. square_right(8)");
  mesh->excludes(gen);
}

void add_material_flags(CLI::App* cmd, MaterialFlags& m) {
  auto* nu = cmd->add_option("--nu", m.nu, "Poisson ratio (default 0.3)");
  auto* lambda = cmd->add_option("--lambda", m.lambda, "Lame lambda");
  nu->excludes(lambda);
  cmd->add_option("--mu", m.mu, "shear modulus (default 1)");
  cmd->add_flag("--plane-stress", m.plane_stress, "interpret --nu and report thresholds as plane-stress ratios");
}

Mesh load_mesh(const MeshFlags& m) {
  if (!m.path.empty()) return read_mesh_file(m.path);
  if (!m.gen.empty()) return generate_mesh(m.gen);
  throw InputError("one of --mesh or --gen is required");
}

std::string mesh_label(const MeshFlags& m) { return m.path.empty() ? m.gen : m.path; }

IsotropicMaterial resolve_material(const MaterialFlags& f, int dim) {
  if (f.plane_stress && dim != 2) throw InputError("--plane-stress applies to 2D meshes only");
  IsotropicMaterial m;
  if (f.lambda) {
    m = {*f.lambda, f.mu};
  } else {
    const double nu = f.nu.value_or(0.3);
    m = material_from_poisson(f.plane_stress ? poisson_from_plane_stress(nu) : nu, f.mu);
  }
  validate_material(m, dim);
  return m;
}

double reported_nu(const MaterialFlags& f, const IsotropicMaterial& m) {
  return f.plane_stress ? plane_stress_poisson(m.nu()) : m.nu();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw InputError("write failed for '" + path + "'");
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": bad number '" + item + "'");
    }
  }
  if (out.size() != expected)
    throw InputError(std::string(flag) + ": expected " + std::to_string(expected) + " comma-separated values");
  return out;
}

struct FieldFlags {
  std::string constant;
  std::string matrix;
};

VectorField resolve_field(const FieldFlags& f, int dim, const char* name) {
  Vec c = zero_vec(dim);
  Mat B = zero_mat(dim);
  const std::string cflag = std::string("--") + name;
  const std::string bflag = std::string("--") + name + "-matrix";
  if (!f.constant.empty()) {
    const auto v = parse_list(f.constant, dim, cflag.c_str());
    for (int k = 0; k < dim; ++k) c[k] = v[k];
  }
  if (!f.matrix.empty()) {
    const auto v = parse_list(f.matrix, static_cast<std::size_t>(dim * dim), bflag.c_str());
    for (int r = 0; r < dim; ++r)
      for (int s = 0; s < dim; ++s) B(r, s) = v[r * dim + s];
  }
  return affine_field(B, c);
}

int run(int argc, char** argv) {
  CLI::App app{"Spring constants derived from P1 finite elements for linear elasticity"};
  app.require_subcommand(1);

  // analyze
  MeshFlags analyze_mesh;
  MaterialFlags analyze_mat;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "per-spring eigen/positivity report (CSV)");
  add_mesh_flags(analyze, analyze_mesh);
  add_material_flags(analyze, analyze_mat);
  analyze->add_option("--out", analyze_out, "output CSV (default stdout)");

  // sweep
  std::vector<std::string> sweep_gens;
  std::vector<std::string> sweep_paths;
  double nu_min = -0.95, nu_max = 0.49, nu_step = 0.01, sweep_mu = 1.0;
  bool count_all = false, sweep_plane_stress = false;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "percentage of PD springs over a Poisson-ratio grid (CSV)");
  sweep_cmd->add_option("--gen", sweep_gens, "generator spec (repeatable)");
  sweep_cmd->add_option("--mesh", sweep_paths, "springmesh v1 file (repeatable)");
  sweep_cmd->add_option("--nu-min", nu_min, "first grid value (default -0.95)");
  sweep_cmd->add_option("--nu-max", nu_max, "last grid value (default 0.49)");
  sweep_cmd->add_option("--nu-step", nu_step, "grid step (default 0.01)");
  sweep_cmd->add_option("--mu", sweep_mu, "shear modulus (default 1)");
  sweep_cmd->add_flag("--count-all", count_all, "count every spring, not only A-Pij springs");
  sweep_cmd->add_flag("--plane-stress", sweep_plane_stress, "grid values are plane-stress ratios");
  sweep_cmd->add_option("--out", sweep_out, "output CSV (default stdout)");

  // colormap
  MeshFlags cmap_mesh;
  MaterialFlags cmap_mat;
  std::string cmap_out;
  auto* colormap = app.add_subcommand("colormap", "SVG of springs coloured by smallest eigenvalue");
  add_mesh_flags(colormap, cmap_mesh);
  add_material_flags(colormap, cmap_mat);
  colormap->add_option("--out", cmap_out, "output SVG (default stdout)");

  // solve
  MeshFlags solve_mesh;
  MaterialFlags solve_mat;
  FieldFlags f_flags, g_flags;
  std::string solve_out;
  std::size_t direct_max = 3000;
  auto* solve_cmd = app.add_subcommand("solve", "solve the spring-block Dirichlet problem");
  add_mesh_flags(solve_cmd, solve_mesh);
  add_material_flags(solve_cmd, solve_mat);
  solve_cmd->add_option("--f", f_flags.constant, "body force constant part, e.g. 0,-1");
  solve_cmd->add_option("--f-matrix", f_flags.matrix, "body force linear part B (row-major)");
  solve_cmd->add_option("--g", g_flags.constant, "boundary displacement constant part c");
  solve_cmd->add_option("--g-matrix", g_flags.matrix, "boundary displacement linear part B (row-major)");
  solve_cmd->add_option("--direct-max", direct_max, "largest unknown count solved by factorization");
  solve_cmd->add_option("--out", solve_out, "displacement CSV (default stdout)");

  // verify
  std::vector<std::string> verify_groups;
  std::uint64_t verify_seed = 1;
  std::string verify_tensor, verify_out;
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--group", verify_groups, "restrict to a group (repeatable)");
  verify->add_option("--seed", verify_seed, "seed for random fixtures");
  verify->add_option("--tensor", verify_tensor, "extra tensor v1 file for symmetry/row-sum checks");
  verify->add_option("--out", verify_out, "report CSV (default stdout)");

  // generate
  std::string gen_spec, gen_out;
  auto* generate = app.add_subcommand("generate", "write a generated mesh in springmesh v1 format");
  generate->add_option("--gen", gen_spec, "generator spec")->required();
  generate->add_option("--out", gen_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*analyze) {
    const Mesh mesh = load_mesh(analyze_mesh);
    const IsotropicMaterial m = resolve_material(analyze_mat, mesh.dim());
    const auto reports = analyze_springs(mesh, spring_adjacency(mesh), m);
    emit(analyze_out, springs_csv(reports, {analyze_mat.plane_stress}));
    return kOk;
  }

  if (*sweep_cmd) {
    if (sweep_gens.empty() && sweep_paths.empty()) throw InputError("sweep needs at least one --gen or --mesh");
    std::vector<NamedMesh> meshes;
    for (const auto& g : sweep_gens) meshes.push_back({g, generate_mesh(g)});
    for (const auto& p : sweep_paths) meshes.push_back({p, read_mesh_file(p)});
    if (sweep_plane_stress)
      for (const auto& nm : meshes)
        if (nm.mesh.dim() != 2) throw InputError("--plane-stress applies to 2D meshes only");
    SweepOptions opts;
    opts.policy = count_all ? CountingPolicy::All : CountingPolicy::APij;
    opts.mu = sweep_mu;
    opts.plane_stress = sweep_plane_stress;
    const auto result = sweep(meshes, poisson_grid(nu_min, nu_max, nu_step), opts);
    emit(sweep_out, sweep_csv(result));
    for (std::size_t row : monotonicity_violations(result))
      std::cerr << "warning: percent_pd increases at row " << row << " (" << result.rows[row].mesh
                << ", nu=" << result.rows[row].nu << ")\n";
    return kOk;
  }

  if (*colormap) {
    const Mesh mesh = load_mesh(cmap_mesh);
    if (mesh.dim() != 2) throw InputError("colormap supports 2D meshes only");
    const IsotropicMaterial m = resolve_material(cmap_mat, mesh.dim());
    ColormapOptions opts;
    opts.legend_nu = reported_nu(cmap_mat, m);
    emit(cmap_out, colormap_svg(mesh, m, opts));
    return kOk;
  }

  if (*solve_cmd) {
    const Mesh mesh = load_mesh(solve_mesh);
    const int d = mesh.dim();
    const IsotropicMaterial m = resolve_material(solve_mat, d);
    const ElasticityTensor c = isotropic_tensor(m, d);
    const auto system = build_system(mesh, c, resolve_field(f_flags, d, "f"), resolve_field(g_flags, d, "g"));
    const auto cert = solvability_check(system);
    if (!cert.certified)
      std::cerr << "warning: solvability uncertified (" << cert.unreached
                << " interior nodes lack a positive-definite spring chain to the boundary); solving anyway\n";
    SolverOptions sopts;
    sopts.direct_max_unknowns = direct_max;
    // Residuals are reported below; the exit code carries the verdict.
    sopts.residual_rel_tol = std::numeric_limits<double>::infinity();
    SolveInfo info;
    const auto u = solve(system, sopts, &info);
    const double spring_res = max_abs(spring_residual(system, u));
    const double fem_res = max_abs(fem_residual(mesh, c, system.partition(), u, system.forces()));
    emit(solve_out, displacement_csv(mesh, u));
    std::ostream& log = (solve_out.empty() || solve_out == "-") ? std::cerr : std::cout;
    log << "solver: " << (info.method == SolverMethod::Direct ? "direct LDLT" : "conjugate gradient")
        << ", unknowns: " << info.unknowns << "\n";
    log << "max_spring_residual: " << format_real(spring_res) << "\n";
    log << "max_fem_residual: " << format_real(fem_res) << "\n";
    return spring_res <= 1e-8 && fem_res <= 1e-8 ? kOk : kNumerical;
  }

  if (*verify) {
    VerifyOptions opts;
    opts.seed = verify_seed;
    opts.groups = verify_groups;
    if (!verify_tensor.empty()) {
      std::ifstream in(verify_tensor, std::ios::binary);
      if (!in) throw InputError("cannot open tensor file '" + verify_tensor + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      opts.tensor = parse_tensor(buf.str());
      validate_symmetry(*opts.tensor);
    }
    const auto results = run_verification(opts);
    emit(verify_out, verification_csv(results));
    for (const auto& r : results)
      if (!r.pass) return kVerification;
    return kOk;
  }

  if (*generate) {
    emit(gen_out, write_mesh(generate_mesh(gen_spec)));
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const springfem::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const springfem::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
