#include <gtest/gtest.h>

#include <map>
#include <regex>
#include <sstream>

#include "springfem/experiments.hpp"
#include "test_support.hpp"

using namespace springfem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char ch = line[k];
      if (quoted) {
        if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
          field += '"';
          ++k;
        } else if (ch == '"') {
          quoted = false;
        } else {
          field += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        row.push_back(field);
        field.clear();
      } else {
        field += ch;
      }
    }
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

// Minimal XML well-formedness check: balanced, properly nested tags, quoted
// attributes, no stray '<' or '&' in text.
bool well_formed_xml(const std::string& xml, std::string* why) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  bool root_seen = false;
  while (pos < xml.size()) {
    const std::size_t lt = xml.find('<', pos);
    const std::string text = xml.substr(pos, lt == std::string::npos ? std::string::npos : lt - pos);
    for (std::size_t k = 0; k < text.size(); ++k)
      if (text[k] == '&' && !std::regex_search(text.substr(k, 8), std::regex("^&(amp|lt|gt|quot|apos);"))) {
        *why = "bare ampersand";
        return false;
      }
    if (lt == std::string::npos) break;
    if (stack.empty() && root_seen && text.find_first_not_of(" \t\r\n") != std::string::npos) {
      *why = "text after root";
      return false;
    }
    const std::size_t gt = xml.find('>', lt);
    if (gt == std::string::npos) {
      *why = "unterminated tag";
      return false;
    }
    const std::string tag = xml.substr(lt + 1, gt - lt - 1);
    pos = gt + 1;
    if (tag.starts_with("?")) {
      if (!tag.ends_with("?")) {
        *why = "bad declaration";
        return false;
      }
      continue;
    }
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) {
        *why = "mismatched close " + tag;
        return false;
      }
      stack.pop_back();
      continue;
    }
    static const std::regex open(R"(^([A-Za-z][\w:-]*)((\s+[A-Za-z][\w:-]*="[^"<]*")*)\s*(/?)$)");
    std::smatch m;
    if (!std::regex_match(tag, m, open)) {
      *why = "bad tag <" + tag + ">";
      return false;
    }
    if (stack.empty() && root_seen) {
      *why = "second root";
      return false;
    }
    root_seen = true;
    if (m[4].str().empty()) stack.push_back(m[1].str());
  }
  if (!stack.empty()) {
    *why = "unclosed " + stack.back();
    return false;
  }
  return root_seen;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(CsvFormat, RealsAndFields) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(-1.0), "-1");
  EXPECT_EQ(format_real(0.25), "0.25");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("jitter(a,0.1,2)"), "\"jitter(a,0.1,2)\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(PoissonGrid, DefaultGrid) {
  const auto g = default_poisson_grid();
  ASSERT_EQ(g.size(), 145u);
  EXPECT_EQ(g.front(), -0.95);
  EXPECT_EQ(g.back(), 0.49);
  EXPECT_TRUE(std::find(g.begin(), g.end(), 0.24) != g.end());
  EXPECT_TRUE(std::find(g.begin(), g.end(), 0.26) != g.end());
  EXPECT_TRUE(std::find(g.begin(), g.end(), 0.2) != g.end());
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g[k], g[k - 1]);
}

TEST(PoissonGrid, Errors) {
  EXPECT_THROW(poisson_grid(0.3, 0.2, 0.01), InputError);
  EXPECT_THROW(poisson_grid(0.0, 0.2, 0.0), InputError);
  EXPECT_THROW(poisson_grid(0.0, 0.2, -0.1), InputError);
  EXPECT_THROW(poisson_grid(0.0, std::nan(""), 0.1), InputError);
  EXPECT_EQ(poisson_grid(0.1, 0.1, 0.5).size(), 1u);
}

TEST(SpringsCsv, PatchEquilateral) {
  const Mesh m = patch_equilateral();
  const auto rows = parse_csv(springs_csv(analyze_springs(m, spring_adjacency(m), material_from_poisson(0.2, 1.0))));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].size(), 12u);
  const std::vector<std::string> header{"i", "j", "a_pij", "gamma", "eta_min", "zeta_min", "pd", "theorem3",
                                        "theta_max_deg", "nu_crit_lo", "nu_crit_hi", "sym_residual"};
  EXPECT_EQ(rows[0], header);
  const auto& shared = rows[1];
  EXPECT_EQ(shared[0], "0");
  EXPECT_EQ(shared[1], "1");
  EXPECT_EQ(shared[6], "1");
  EXPECT_EQ(shared[7], "1");
  EXPECT_NEAR(std::stod(shared[10]), 0.25, 1e-12);
  EXPECT_NEAR(std::stod(shared[8]), 60.0, 1e-12);
}

TEST(SpringsCsv, PatchSquareDiagonalEmptyInterval) {
  const Mesh m = patch_square();
  const auto rows = parse_csv(springs_csv(analyze_springs(m, spring_adjacency(m), {1.0, 1.0})));
  bool found = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][0] != "0" || rows[r][1] != "3") continue;
    found = true;
    EXPECT_EQ(rows[r][6], "0");
    EXPECT_GT(std::stod(rows[r][9]), std::stod(rows[r][10]));
    EXPECT_NEAR(std::stod(rows[r][5]), -1.0, 1e-15);
  }
  EXPECT_TRUE(found);
}

TEST(SpringsCsv, SymmetryResidualOnAPijRows) {
  for (const Mesh& m : {generate_mesh("jitter(square_right(6),0.07,2)"), generate_mesh("jitter(cube_kuhn(3),0.05,2)")}) {
    const auto rows = parse_csv(springs_csv(analyze_springs(m, spring_adjacency(m), material_from_poisson(0.3, 1.0))));
    for (std::size_t r = 1; r < rows.size(); ++r)
      if (rows[r][2] == "1") EXPECT_LE(std::stod(rows[r][11]), 1e-10);
  }
}

TEST(SpringsCsv, PlaneStressInterval) {
  const Mesh m = patch_equilateral();
  const auto reports = analyze_springs(m, spring_adjacency(m), material_from_poisson(0.2, 1.0));
  const auto rows = parse_csv(springs_csv(reports, {true}));
  EXPECT_NEAR(std::stod(rows[1][10]), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(std::stod(rows[1][9]), -0.5);
  const auto empty = reported_interval(kEmptyInterval, true);
  EXPECT_TRUE(empty.empty());
}

TEST(SpringsCsv, ByteIdenticalAcrossRuns) {
  const Mesh m = generate_mesh("jitter(equilateral(6),0.1,3)");
  const auto pairs = spring_adjacency(m);
  const auto mat = material_from_poisson(0.22, 1.0);
  EXPECT_EQ(springs_csv(analyze_springs(m, pairs, mat)), springs_csv(analyze_springs(m, pairs, mat)));
}

TEST(Sweep, EquilateralSharpDrop) {
  const auto result = sweep({{"equilateral(8)", equilateral(8)}}, default_poisson_grid());
  ASSERT_EQ(result.rows.size(), 145u);
  for (const auto& r : result.rows) {
    if (r.nu <= 0.24) EXPECT_EQ(r.percent_pd, 100.0) << r.nu;
    if (r.nu >= 0.26) EXPECT_EQ(r.percent_pd, 0.0) << r.nu;
    EXPECT_EQ(r.springs_counted, result.rows.front().springs_counted);
    EXPECT_TRUE(r.monotone_expected);
  }
  EXPECT_TRUE(monotonicity_violations(result).empty());
}

TEST(Sweep, CubeIsMorePessimistic) {
  const auto grid = poisson_grid(0.2, 0.3, 0.1);
  const auto result = sweep({{"cube_kuhn(4)", cube_kuhn(4)}, {"equilateral(8)", equilateral(8)}}, grid);
  ASSERT_EQ(result.rows.size(), 4u);
  EXPECT_LT(result.rows[1].percent_pd, 100.0);
  EXPECT_LT(result.rows[1].percent_pd, 75.0);
  EXPECT_LT(result.rows[0].percent_pd, result.rows[2].percent_pd);
}

TEST(Sweep, CountingPolicies) {
  const Mesh m = square_right(4);
  const auto grid = poisson_grid(0.0, 0.4, 0.1);
  const auto apij = sweep({{"sq", m}}, grid);
  SweepOptions all;
  all.policy = CountingPolicy::All;
  const auto every = sweep({{"sq", m}}, grid, all);
  std::size_t apij_count = 0;
  for (const auto& p : spring_adjacency(m)) apij_count += p.satisfies_a_pij;
  EXPECT_EQ(apij.rows[0].springs_counted, apij_count);
  EXPECT_EQ(every.rows[0].springs_counted, spring_adjacency(m).size());
  for (const auto& r : every.rows) {
    EXPECT_GE(r.percent_pd, 0.0);
    EXPECT_LE(r.percent_pd, 100.0);
  }
}

TEST(Sweep, MuDoesNotChangeClassification) {
  const Mesh m = generate_mesh("jitter(square_right(5),0.08,4)");
  SweepOptions heavy;
  heavy.mu = 250.0;
  const auto a = sweep({{"m", m}}, default_poisson_grid());
  const auto b = sweep({{"m", m}}, default_poisson_grid(), heavy);
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].springs_pd, b.rows[k].springs_pd);
}

TEST(Sweep, PlaneStressThreshold) {
  SweepOptions ps;
  ps.plane_stress = true;
  const auto r = sweep({{"eq", equilateral(5)}}, poisson_grid(0.32, 0.34, 0.01), ps);
  EXPECT_EQ(r.rows[0].percent_pd, 100.0);
  EXPECT_EQ(r.rows[2].percent_pd, 0.0);
}

TEST(Sweep, InvalidGrid) {
  EXPECT_THROW(sweep({{"eq", equilateral(2)}}, {}), InputError);
  EXPECT_THROW(sweep({{"eq", equilateral(2)}}, {0.5}), InputError);
  EXPECT_THROW(sweep({{"eq", equilateral(2)}}, {-1.0}), InputError);
}

TEST(Sweep, MonotoneFlagFollowsGamma) {
  // Obtuse jitter can produce gamma <= 0 springs; the flag must reflect that.
  for (const std::string spec : {"jitter(square_right(6),0.1,1)", "square_right(4)", "equilateral(4)"}) {
    const Mesh m = generate_mesh(spec);
    bool expect = true;
    for (const auto& p : spring_adjacency(m))
      if (p.satisfies_a_pij) expect = expect && isotropic_decomposition(m, p).gamma > 0;
    const auto r = sweep({{spec, m}}, poisson_grid(0.0, 0.1, 0.1));
    EXPECT_EQ(r.rows[0].monotone_expected, expect) << spec;
  }
}

TEST(Sweep, OfflineJoinWithSpringsCsv) {
  const std::vector<NamedMesh> meshes{{"jitter(equilateral(4),0.1,7)", generate_mesh("jitter(equilateral(4),0.1,7)")},
                                      {"cube_kuhn(2)", cube_kuhn(2)}};
  const auto grid = default_poisson_grid();
  const auto swept = parse_csv(sweep_csv(sweep(meshes, grid)));
  ASSERT_EQ(swept.size(), 1 + meshes.size() * grid.size());
  std::size_t row = 1;
  for (const auto& nm : meshes) {
    const auto pairs = spring_adjacency(nm.mesh);
    for (double nu : grid) {
      const auto rows = parse_csv(springs_csv(analyze_springs(nm.mesh, pairs, material_from_poisson(nu, 1.0))));
      std::size_t counted = 0, pd = 0;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][2] != "1") continue;
        ++counted;
        pd += rows[r][6] == "1";
      }
      const auto& s = swept[row++];
      EXPECT_EQ(s[0], nm.name);
      EXPECT_EQ(std::stod(s[1]), nu);
      EXPECT_EQ(s[2], std::to_string(counted));
      EXPECT_EQ(s[3], std::to_string(pd)) << nm.name << " nu=" << nu;
      EXPECT_EQ(s[4], format_real(100.0 * static_cast<double>(pd) / static_cast<double>(counted)));
    }
  }
}

TEST(Sweep, CsvHeaderAndDeterminism) {
  const std::vector<NamedMesh> meshes{{"equilateral(3)", equilateral(3)}};
  const std::string a = sweep_csv(sweep(meshes, default_poisson_grid()));
  EXPECT_EQ(a, sweep_csv(sweep(meshes, default_poisson_grid())));
  EXPECT_EQ(a.substr(0, a.find('\n')), "mesh,nu,springs_counted,springs_pd,percent_pd,monotone_expected");
}

TEST(Colormap, DivergingScale) {
  EXPECT_EQ(diverging_color(-1.0), "#ff0000");
  EXPECT_EQ(diverging_color(0.0), "#ffffff");
  EXPECT_EQ(diverging_color(1.0), "#0000ff");
  EXPECT_EQ(diverging_color(5.0), "#0000ff");
  EXPECT_EQ(diverging_color(-0.5), "#ff8080");
}

TEST(Colormap, WellFormedWithOneLinePerSpring) {
  for (const Mesh& m : {equilateral(4), square_right(4), generate_mesh("jitter(square_right(7),0.08,2)"),
                        patch_square()}) {
    const std::string svg = colormap_svg(m, material_from_poisson(0.3, 1.0));
    std::string why;
    EXPECT_TRUE(well_formed_xml(svg, &why)) << why;
    EXPECT_EQ(count(svg, "<line "), spring_adjacency(m).size());
    EXPECT_NE(svg.find("stroke-width=\"1.500000\""), std::string::npos);
    EXPECT_NE(svg.find("viewBox=\"-50.000000 -"), std::string::npos);
  }
}

TEST(Colormap, ColoursMatchClassification) {
  {
    const Mesh m = equilateral(4);
    const auto pairs = spring_adjacency(m);
    const std::string svg = colormap_svg(m, material_from_poisson(0.1, 1.0));
    std::regex stroke("<line [^>]*stroke=\"#([0-9a-f]{6})\"");
    std::size_t k = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), stroke); it != std::sregex_iterator(); ++it, ++k) {
      const std::string c = (*it)[1];
      if (pairs[k].satisfies_a_pij) EXPECT_TRUE(c.substr(4) == "ff" && c.substr(0, 2) != "ff") << c;
    }
    EXPECT_EQ(k, pairs.size());
  }
  {
    const Mesh m = square_right(4);
    const auto pairs = spring_adjacency(m);
    const std::string svg = colormap_svg(m, material_from_poisson(0.45, 1.0));
    std::regex stroke("<line [^>]*stroke=\"#([0-9a-f]{6})\"");
    std::size_t k = 0, red_diagonals = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), stroke); it != std::sregex_iterator(); ++it, ++k) {
      const Vec d = m.node(pairs[k].j) - m.node(pairs[k].i);
      const bool diagonal = std::abs(d[0]) > 1e-12 && std::abs(d[1]) > 1e-12;
      if (diagonal && pairs[k].satisfies_a_pij) {
        EXPECT_EQ((*it)[1].str().substr(0, 2), "ff");
        EXPECT_NE((*it)[1].str().substr(2), "ffff");
        ++red_diagonals;
      }
    }
    EXPECT_GT(red_diagonals, 0u);
  }
}

TEST(Colormap, LegendCarriesScaleAndNu) {
  ColormapOptions opts;
  opts.legend_nu = 0.3;
  const std::string svg = colormap_svg(equilateral(3), material_from_poisson(0.3, 1.0), opts);
  EXPECT_NE(svg.find("nu = 0.29999999999999999"), std::string::npos);
  EXPECT_NE(svg.find("m = "), std::string::npos);
  EXPECT_NE(svg.find("linearGradient"), std::string::npos);
}

TEST(Colormap, Rejects3D) { EXPECT_THROW(colormap_svg(cube_kuhn(1), {1.0, 1.0}), InputError); }
