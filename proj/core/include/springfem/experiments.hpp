#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "springfem/analysis.hpp"
#include "springfem/elasticity.hpp"
#include "springfem/mesh.hpp"

namespace springfem {

// Formats a double with 17 significant digits ("%.17g").
std::string format_real(double v);

// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

// ---------------------------------------------------------------------------
// Per-spring analysis report
// ---------------------------------------------------------------------------

struct ReportOptions {
  // Report critical intervals as plane-stress ratios nu / (1 - nu).
  bool plane_stress = false;
};

inline constexpr const char* kSpringsCsvHeader =
    "i,j,a_pij,gamma,eta_min,zeta_min,pd,theorem3,theta_max_deg,nu_crit_lo,nu_crit_hi,sym_residual";

// Critical interval as reported: converted to plane-stress ratios when
// requested; the empty sentinel (lo > hi) is kept as is.
PoissonInterval reported_interval(const PoissonInterval& interval, bool plane_stress);

std::string springs_csv(const std::vector<SpringReport>& reports, const ReportOptions& options = {});

// ---------------------------------------------------------------------------
// Poisson-ratio sweeps
// ---------------------------------------------------------------------------

enum class CountingPolicy { APij, All };

// lo, lo + step, ..., hi. Values are rounded to micro-units before division
// so that grid points are the doubles nearest to their decimal spelling.
// Throws InputError for an empty or ill-formed grid.
std::vector<double> poisson_grid(double lo, double hi, double step);
std::vector<double> default_poisson_grid();  // -0.95 : 0.01 : 0.49

struct NamedMesh {
  std::string name;
  Mesh mesh;
};

struct SweepRow {
  std::string mesh;
  double nu = 0.0;
  std::size_t springs_counted = 0;
  std::size_t springs_pd = 0;
  double percent_pd = 0.0;
  // Every counted spring has gamma > 0, so percent_pd must be nonincreasing.
  bool monotone_expected = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grouped by mesh, ascending nu
};

struct SweepOptions {
  CountingPolicy policy = CountingPolicy::APij;
  double mu = 1.0;
  // Grid values are plane-stress ratios, converted before building materials.
  bool plane_stress = false;
};

// PD percentage per (mesh, nu), classifying K assembled from the full
// isotropic tensor at each grid point.
SweepResult sweep(const std::vector<NamedMesh>& meshes, const std::vector<double>& grid, const SweepOptions& options = {});

inline constexpr const char* kSweepCsvHeader = "mesh,nu,springs_counted,springs_pd,percent_pd,monotone_expected";
std::string sweep_csv(const SweepResult& result);

// Rows of one mesh whose percent_pd increases with nu although
// monotone_expected is set. Empty on a healthy sweep.
std::vector<std::size_t> monotonicity_violations(const SweepResult& result);

// ---------------------------------------------------------------------------
// Smallest-eigenvalue colormap
// ---------------------------------------------------------------------------

struct ColormapOptions {
  double canvas = 1000.0;      // longer mesh extent in SVG user units
  double stroke_width = 1.5;   // user units
  double margin = 0.05;        // fraction of each extent
  double legend_nu = 0.0;      // nu printed in the legend
};

// One <line> per spring coloured by zeta_min / (lambda + mu): red below zero,
// white at zero, blue above, normalised by the largest magnitude m. 2D only;
// throws InputError for 3D meshes and NumericalError when m == 0.
std::string colormap_svg(const Mesh& mesh, const IsotropicMaterial& material, const ColormapOptions& options = {});

// "#rrggbb" for a value t in [-1, 1].
std::string diverging_color(double t);

}  // namespace springfem
