#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "springfem/experiments.hpp"

namespace springfem {

std::string diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  // Linear blend from white to pure red (t < 0) or pure blue (t > 0).
  const auto channel = [](double x) { return static_cast<int>(std::lround(255.0 * x)); };
  int r = 255, g = 255, b = 255;
  if (t < 0.0) {
    g = channel(1.0 + t);
    b = channel(1.0 + t);
  } else if (t > 0.0) {
    r = channel(1.0 - t);
    g = channel(1.0 - t);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string colormap_svg(const Mesh& mesh, const IsotropicMaterial& material, const ColormapOptions& options) {
  if (mesh.dim() != 2) throw InputError("colormap supports 2D meshes only");
  const auto pairs = spring_adjacency(mesh);
  const auto reports = analyze_springs(mesh, pairs, material);

  const double lm = material.lambda + material.mu;
  std::vector<double> values;
  values.reserve(reports.size());
  double m = 0.0;
  for (const auto& r : reports) {
    values.push_back(r.zeta_min() / lm);
    m = std::max(m, std::abs(values.back()));
  }
  if (!(m > 0.0)) throw NumericalError("colormap: every spring constant has zero smallest eigenvalue");

  double xmin = mesh.node(0)[0], xmax = xmin, ymin = mesh.node(0)[1], ymax = ymin;
  for (const auto& p : mesh.nodes()) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double scale = options.canvas / std::max(xmax - xmin, ymax - ymin);
  const double width = (xmax - xmin) * scale;
  const double height = (ymax - ymin) * scale;
  const double mx = options.margin * width;
  const double my = options.margin * height;
  auto X = [&](double x) { return (x - xmin) * scale; };
  auto Y = [&](double y) { return (ymax - y) * scale; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << num(-mx) << ' ' << num(-my) << ' '
      << num(width + 2 * mx) << ' ' << num(height + 2 * my) << "\">\n";
  out << "<defs>\n<linearGradient id=\"scale\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = -1.0 + 0.5 * k;
    out << "<stop offset=\"" << num(0.25 * k) << "\" stop-color=\"" << diverging_color(t) << "\"/>\n";
  }
  out << "</linearGradient>\n</defs>\n";
  out << "<rect x=\"" << num(-mx) << "\" y=\"" << num(-my) << "\" width=\"" << num(width + 2 * mx) << "\" height=\""
      << num(height + 2 * my) << "\" fill=\"#d9d9d9\"/>\n";

  out << "<g id=\"springs\" stroke-width=\"" << num(options.stroke_width) << "\" stroke-linecap=\"round\">\n";
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Vec& a = mesh.node(pairs[k].i);
    const Vec& b = mesh.node(pairs[k].j);
    out << "<line x1=\"" << num(X(a[0])) << "\" y1=\"" << num(Y(a[1])) << "\" x2=\"" << num(X(b[0])) << "\" y2=\""
        << num(Y(b[1])) << "\" stroke=\"" << diverging_color(values[k] / m) << "\"/>\n";
  }
  out << "</g>\n";

  // Legend in the top margin band.
  const double band = std::max(my, 1e-9);
  const double font = 0.35 * band;
  out << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"" << num(font) << "\">\n";
  out << "<rect x=\"0\" y=\"" << num(-0.9 * band) << "\" width=\"" << num(0.3 * width) << "\" height=\""
      << num(0.4 * band) << "\" fill=\"url(#scale)\" stroke=\"#000000\" stroke-width=\"" << num(0.02 * band)
      << "\"/>\n";
  out << "<text x=\"" << num(0.32 * width) << "\" y=\"" << num(-0.5 * band) << "\">zeta_min/(lambda+mu) in [-m, m], m = "
      << format_real(m) << ", nu = " << format_real(options.legend_nu) << "</text>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace springfem
