#include "doctest.h"
#include "test_support.hpp"

#include "abc_rods/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace abc_rods;

namespace {

const char* kMinimal = R"(
[scenario]
name = two_beams

[mesh]
fiber = from=-1,0,0 to=1,0,0 elements=4
fiber = from=0,-1,0.025 to=0,1,0.025 elements=4   # crossing beam

[loads]
dirichlet = node=f0.start components=0,1,2
dirichlet = node=f0.end components=0,1,2
dirichlet = node=f1.start components=0,1,2
dirichlet = node=f1.end components=0,1,2
)";

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "abc_rods_scenario_test";
  std::filesystem::create_directories(p);
  return p;
}

// Minimal legacy-VTK reader independent of the writer: keyword driven, whitespace tokenized.
struct VtkPolyData {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> lines;
  std::vector<std::vector<int>> vertices;
  std::vector<Vec3> vectors;
  std::vector<int> scalars;
};

VtkPolyData read_vtk(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("# vtk DataFile", 0) == 0);
  std::getline(in, line);  // title
  std::getline(in, line);
  REQUIRE(line == "ASCII");
  VtkPolyData out;
  std::string word;
  auto read_cells = [&](std::vector<std::vector<int>>& cells) {
    size_t n = 0, size = 0;
    in >> n >> size;
    size_t seen = 0;
    for (size_t i = 0; i < n; ++i) {
      int k = 0;
      in >> k;
      std::vector<int> c(k);
      for (int& v : c) in >> v;
      seen += k + 1;
      cells.push_back(c);
    }
    REQUIRE(seen == size);
  };
  while (in >> word) {
    if (word == "DATASET") {
      in >> word;
      REQUIRE(word == "POLYDATA");
    } else if (word == "POINTS") {
      size_t n = 0;
      in >> n >> word;
      out.points.resize(n);
      for (auto& p : out.points) in >> p.x() >> p.y() >> p.z();
    } else if (word == "LINES") {
      read_cells(out.lines);
    } else if (word == "VERTICES") {
      read_cells(out.vertices);
    } else if (word == "POINT_DATA") {
      size_t n = 0;
      in >> n;
    } else if (word == "VECTORS") {
      in >> word >> word;
      out.vectors.resize(out.points.size());
      for (auto& v : out.vectors) in >> v.x() >> v.y() >> v.z();
    } else if (word == "SCALARS") {
      std::getline(in, line);
      std::getline(in, line);  // LOOKUP_TABLE
      out.scalars.resize(out.points.size());
      for (int& s : out.scalars) in >> s;
    } else {
      FAIL("unexpected token " << word);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("minimal scenario parses with defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.name == "two_beams");
  REQUIRE(s.fibers.size() == 2);
  CHECK(s.fibers[1].elements == 4);
  CHECK(s.sections.size() == 1);
  CHECK(s.dirichlet.size() == 12);
  CHECK(s.dirichlet[3].node == 4);
  const Scenario defaults;
  CHECK(s.contact.settings.transition.alpha1 == defaults.contact.settings.transition.alpha1);
  CHECK(s.solver.tol_R == defaults.solver.tol_R);
  CHECK_FALSE(s.solver.dynamic);
  const Model m = s.build_model();
  CHECK(m.mesh.n_nodes() == 10);
  CHECK(m.constrained_dofs().size() == 12);
}

TEST_CASE("alpha2 not above alpha1 is rejected with the field and line") {
  const std::string text = std::string(kMinimal) + "\n[contact]\nalpha1 = 12\nalpha2 = 10\n";
  try {
    parse_scenario(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.items().size() == 1);
    CHECK(e.items()[0].find("line 17") != std::string::npos);
    CHECK(e.items()[0].find("contact.alpha2") != std::string::npos);
  }
}

TEST_CASE("unknown keys and malformed values are itemized") {
  const std::string text = std::string(kMinimal) + "\n[solver]\ndt = abc\nbogus = 1\n[nowhere]\n";
  try {
    parse_scenario(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.items().size() == 3);
    CHECK(e.items()[0].find("line 16") != std::string::npos);
    CHECK(e.items()[1].find("unknown key 'solver.bogus'") != std::string::npos);
    CHECK(e.items()[2].find("unknown section [nowhere]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("[mesh]\nfiber = section=missing from=0,0,0 to=1,0,0 elements=2\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[mesh]\nfiber = from=0,0,0 to=1,0,0 elements=2\n[loads]\nnodal = node=7\n"),
                  ParseError);
}

TEST_CASE("impact example expands to its parameter block") {
  const Scenario s = builtin_scenario("example2_impact");
  REQUIRE(s.sections.size() == 2);
  for (const auto& sec : s.sections) {
    CHECK(sec.radius == 0.01);
    CHECK(sec.youngs_modulus == 1e-6);
  }
  CHECK(s.sections[0].density == 0.1);
  CHECK(s.sections[1].density == 0.05);
  REQUIRE(s.fibers.size() == 2);
  CHECK((s.fibers[0].to - s.fibers[0].from).norm() == doctest::Approx(2.0));
  CHECK(s.fibers[1].from.z() == doctest::Approx(0.1));
  CHECK(s.contact.settings.g_bar == 1e-3);
  CHECK(s.contact.settings.transition.alpha1 == 5.0);
  CHECK(s.contact.settings.transition.alpha2 == 10.0);
  CHECK(s.contact.settings.transition.eps_par == 3e-3);
  CHECK(s.contact.settings.transition.eps_perp == 3.1e-4);
  CHECK(s.contact.settings.n_gr == 5);
  CHECK(s.solver.dt == 1e-3);
  CHECK(s.solver.t_end == 2.0);
  CHECK(s.solver.dynamic);
  REQUIRE(s.line_loads.size() == 2);
  CHECK(s.line_loads[0].value.z() == -5e-7);
  CHECK(s.line_loads[0].profile(0.03) == 1.0);
  CHECK(s.line_loads[0].profile(0.06) == 0.0);
  CHECK(s.line_loads[1].value.y() == 2.5e-6);
  CHECK(s.line_loads[1].linear_in_coordinate);
  CHECK(s.line_loads[1].profile(0.04) == 0.0);
  for (const auto& name : builtin_scenarios()) CHECK_NOTHROW(builtin_scenario(name));
  CHECK_THROWS_AS(builtin_scenario("nope"), InputError);
}

TEST_CASE("serialize then parse is idempotent on the canonical form") {
  for (const auto& name : builtin_scenarios()) {
    const std::string a = serialize_scenario(builtin_scenario(name));
    const std::string b = serialize_scenario(parse_scenario(a));
    CHECK(a == b);
  }
  const std::string c = serialize_scenario(parse_scenario(kMinimal));
  CHECK(serialize_scenario(parse_scenario(c)) == c);
}

TEST_CASE("overrides") {
  Scenario s = builtin_scenario("example2_impact");
  apply_override(s, "contact.eps_perp=3.1e-6");
  CHECK(s.contact.settings.transition.eps_perp == 3.1e-6);
  apply_override(s, "contact.variant=potential_based");
  CHECK(s.contact.settings.transition.variant == TransitionVariant::potential_based);
  apply_override(s, "solver.rho=0.5");
  CHECK(s.solver.genalpha.alpha_f == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(apply_override(s, "contact.alpha2=1"), InputError);
  CHECK_THROWS_AS(apply_override(s, "contact.nothing=1"), InputError);
  CHECK_THROWS_AS(apply_override(s, "noequals"), InputError);
}

TEST_CASE("csv has one row per accepted step plus header") {
  Scenario s = parse_scenario(kMinimal);
  s.solver.t_end = 3.0;
  s.line_loads.push_back({1, Vec3(0, 0, -1e-9), false, TimeProfile::ramp(0.0, 3.0)});
  Simulation sim(s.build_model(), s.contact, s.solver);
  const auto path = (temp_dir() / "steps.csv").string();
  {
    CsvWriter w(path);
    sim.run([&](const StepReport& r) { w.write(r); });
  }
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == sim.reports().size() + 1);
  CHECK(lines[0].rfind("step,t,E_kin,E_int,Pi_c,W_con,Lx,Ly,Lz,Hx,Hy,Hz,n_point", 0) == 0);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string cell;
    size_t n = 0;
    while (std::getline(ss, cell, ',')) ++n;
    CHECK(n == csv_columns().size());
  }
  CHECK(lines[1].find("e+") != std::string::npos);
  CHECK_THROWS_AS(CsvWriter("/nonexistent/dir/x.csv"), InputError);
}

TEST_CASE("vtk files round-trip through an independent reader") {
  const Scenario s = builtin_scenario("example2_impact");
  const Model m = s.build_model();
  const Eigen::VectorXd d = m.mesh.reference_dofs();
  const auto path = (temp_dir() / "centerlines.vtk").string();
  write_vtk_centerlines(path, m.mesh, d, 4);
  const VtkPolyData v = read_vtk(path);
  REQUIRE(v.lines.size() == 2);
  const size_t per_fiber = 8 * 4 + 1;
  CHECK(v.points.size() == 2 * per_fiber);
  for (size_t f = 0; f < 2; ++f) {
    REQUIRE(v.lines[f].size() == per_fiber);
    for (size_t k = 0; k < per_fiber; ++k) CHECK(v.lines[f][k] == static_cast<int>(f * per_fiber + k));
  }
  CHECK((v.points.front() - Vec3(-1, 0, 0)).norm() < 1e-14);
  CHECK((v.points[per_fiber - 1] - Vec3(1, 0, 0)).norm() < 1e-14);
  CHECK((v.points.back() - Vec3(1, 0, 0.1)).norm() < 1e-14);
  CHECK_THROWS_AS(write_vtk_centerlines("/nonexistent/dir/x.vtk", m.mesh, d), InputError);
}

TEST_CASE("contact force export, including an empty active set") {
  Scenario s = parse_scenario(kMinimal);
  const auto path = (temp_dir() / "forces.vtk").string();
  {
    Simulation sim(s.build_model(), s.contact, s.solver);
    const auto& c = sim.last_contact();
    CHECK(c.n_point + c.n_line_gp + c.n_endpoint + c.n_fallback == 0);
    write_vtk_contact_forces(path, sim.last_contact());
    const VtkPolyData v = read_vtk(path);
    CHECK(v.points.empty());
    CHECK(v.vertices.empty());
  }
  // Lower the crossing beam into contact.
  s.fibers[1].from.z() = s.fibers[1].to.z() = 0.0195;
  Simulation sim(s.build_model(), s.contact, s.solver);
  const auto& c = sim.last_contact();
  REQUIRE(c.pairs.size() >= 1);
  write_vtk_contact_forces(path, c);
  const VtkPolyData v = read_vtk(path);
  REQUIRE(v.points.size() >= 1);
  CHECK(v.vertices.size() == v.points.size());
  CHECK(v.scalars[0] == 0);
  Vec3 total = Vec3::Zero();
  for (const auto& f : v.vectors) total += f;
  // Force on the lower beam points down.
  CHECK(total.z() < 0.0);
}
