#include "springfem/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "springfem/parallel.hpp"

namespace springfem {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

PoissonInterval reported_interval(const PoissonInterval& interval, bool plane_stress) {
  if (!plane_stress || interval.empty()) return interval;
  return {plane_stress_poisson(interval.lo), plane_stress_poisson(interval.hi)};
}

std::string springs_csv(const std::vector<SpringReport>& reports, const ReportOptions& options) {
  std::ostringstream out;
  out << kSpringsCsvHeader << "\n";
  for (const auto& r : reports) {
    const PoissonInterval crit = reported_interval(r.critical, options.plane_stress);
    out << r.i << ',' << r.j << ',' << (r.a_pij ? 1 : 0) << ',' << format_real(r.gamma) << ','
        << format_real(r.eta_min()) << ',' << format_real(r.zeta_min()) << ',' << (r.pd.pd ? 1 : 0) << ','
        << (r.theorem3 ? 1 : 0) << ',' << format_real(r.theta_max * 180.0 / std::numbers::pi) << ','
        << format_real(crit.lo) << ',' << format_real(crit.hi) << ',' << format_real(r.sym_residual) << "\n";
  }
  return out.str();
}

std::vector<double> poisson_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || !(step > 0.0))
    throw InputError("Poisson grid needs finite bounds and a positive step");
  constexpr double kUnit = 1e6;
  const long long lo_u = std::llround(lo * kUnit);
  const long long hi_u = std::llround(hi * kUnit);
  const long long step_u = std::llround(step * kUnit);
  if (step_u <= 0) throw InputError("Poisson grid step below 1e-6");
  if (hi_u < lo_u) throw InputError("empty Poisson grid");
  std::vector<double> grid;
  for (long long v = lo_u; v <= hi_u; v += step_u) grid.push_back(static_cast<double>(v) / kUnit);
  if (grid.empty()) throw InputError("empty Poisson grid");
  return grid;
}

std::vector<double> default_poisson_grid() { return poisson_grid(-0.95, 0.49, 0.01); }

SweepResult sweep(const std::vector<NamedMesh>& meshes, const std::vector<double>& grid, const SweepOptions& options) {
  if (grid.empty()) throw InputError("empty Poisson grid");
  std::vector<double> material_nu;
  for (double v : grid) {
    const double nu = options.plane_stress ? poisson_from_plane_stress(v) : v;
    if (!(nu > -1.0 && nu < 0.5))
      throw InputError("Poisson ratio " + format_real(v) + " outside the admissible range");
    material_nu.push_back(nu);
  }

  SweepResult result;
  for (const auto& nm : meshes) {
    const Mesh& mesh = nm.mesh;
    const auto pairs = spring_adjacency(mesh);
    std::vector<const SpringPair*> counted;
    for (const auto& p : pairs)
      if (options.policy == CountingPolicy::All || p.satisfies_a_pij) counted.push_back(&p);

    bool monotone = true;
    for (const auto* p : counted) monotone = monotone && isotropic_decomposition(mesh, *p).gamma > 0.0;

    std::vector<SweepRow> rows(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t g) {
          const IsotropicMaterial material = material_from_poisson(material_nu[g], options.mu);
          const SpringAssembler assembler(mesh, isotropic_tensor(material, mesh.dim()));
          std::size_t pd = 0;
          for (const auto* p : counted)
            if (classify_pd(assembler.coupling(p->i, p->j, p->incident_elements)).pd) ++pd;
          SweepRow& row = rows[g];
          row.mesh = nm.name;
          row.nu = grid[g];
          row.springs_counted = counted.size();
          row.springs_pd = pd;
          row.percent_pd = counted.empty() ? 0.0 : 100.0 * static_cast<double>(pd) / static_cast<double>(counted.size());
          row.monotone_expected = monotone;
        },
        1);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\n";
  for (const auto& r : result.rows)
    out << csv_field(r.mesh) << ',' << format_real(r.nu) << ',' << r.springs_counted << ',' << r.springs_pd << ','
        << format_real(r.percent_pd) << ',' << (r.monotone_expected ? 1 : 0) << "\n";
  return out.str();
}

std::vector<std::size_t> monotonicity_violations(const SweepResult& result) {
  std::vector<std::size_t> bad;
  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    const auto& prev = result.rows[k - 1];
    const auto& cur = result.rows[k];
    if (cur.mesh != prev.mesh || !cur.monotone_expected) continue;
    if (cur.nu > prev.nu && cur.springs_pd > prev.springs_pd) bad.push_back(k);
  }
  return bad;
}

}  // namespace springfem
