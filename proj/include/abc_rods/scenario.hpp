#pragma once

#include "abc_rods/solver.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace abc_rods {

// Parse failure carrying one message per offending line ("line N: ...").
class ParseError : public InputError {
 public:
  explicit ParseError(std::vector<std::string> items);
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

struct SectionSpec {
  std::string name = "default";
  double radius = 0.01;
  double youngs_modulus = 1.0;
  double density = 1.0;
  double area_scale = 1.0;     // scales A (mass and axial stiffness)
  double inertia_scale = 1.0;  // scales I

  BeamSection section() const;
};

struct FiberSpec {
  std::string section = "default";
  // Straight fibers: from/to and element count. Otherwise explicit nodes and lengths.
  bool straight = true;
  Vec3 from = Vec3::Zero();
  Vec3 to = Vec3::UnitX();
  int elements = 1;
  std::vector<NodalDof> nodes;
  std::vector<double> lengths;
};

struct OutputSpec {
  bool csv = true;
  bool vtk = false;
  int vtk_every = 1;
};

struct Scenario {
  std::string name = "custom";
  std::vector<SectionSpec> sections{SectionSpec{}};
  std::vector<FiberSpec> fibers;
  std::vector<LineLoad> line_loads;
  std::vector<NodalLoad> nodal_loads;
  std::vector<Prescription> dirichlet;
  ContactConfig contact;
  SolverConfig solver;
  OutputSpec output;

  Model build_model() const;
  void validate() const;
};

// INI-style text with sections [scenario] [section] [mesh] [contact] [solver] [loads] [output].
Scenario parse_scenario(const std::string& text);
// Canonical text form; parse(serialize(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

// "contact.eps_perp=5" style override of a scalar key.
void apply_override(Scenario& s, const std::string& assignment);

std::vector<std::string> builtin_scenarios();
Scenario builtin_scenario(const std::string& name);
// Built-in name or path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

// Result export.
std::vector<std::string> csv_columns();
std::string csv_row(const StepReport& r);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void write(const StepReport& r);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

// Legacy ASCII VTK polydata: one polyline per fiber, sampled per element.
void write_vtk_centerlines(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& d,
                           int samples_per_element = 8);
// Point cloud of contact forces with force vectors and unit kind (0 point, 1 endpoint, 2 line GP, 3 fallback).
void write_vtk_contact_forces(const std::string& path, const ContactSet& contact);

}  // namespace abc_rods
