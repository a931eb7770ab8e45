#pragma once

#include "abc_rods/beam_element.hpp"
#include "abc_rods/search.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace abc_rods {

// Piecewise-linear scalar function of time; constant beyond the first and
// last breakpoints. An empty profile is identically zero.
struct TimeProfile {
  std::vector<std::pair<double, double>> points;

  double operator()(double t) const;
  static TimeProfile constant(double v) { return {{{0.0, v}}}; }
  static TimeProfile ramp(double t0, double t1, double v1 = 1.0) { return {{{t0, 0.0}, {t1, v1}}}; }
  static TimeProfile hat(double t0, double t_peak, double t1) { return {{{t0, 0.0}, {t_peak, 1.0}, {t1, 0.0}}}; }
};

struct MeshElement {
  std::array<int, 2> nodes{0, 0};
  double l0 = 1.0;
  double s0 = 0.0;
  int section = 0;
  int fiber = 0;
  std::array<bool, 2> physical_end{false, false};
};

struct Fiber {
  int first_node = 0;
  int first_element = 0;
  int n_elements = 0;
  double length = 0.0;
};

class Mesh {
 public:
  int add_section(const BeamSection& section);
  // Consecutive nodes joined by elements with the given reference lengths.
  int add_fiber(const std::vector<NodalDof>& nodes, const std::vector<double>& lengths, int section);
  int add_straight_fiber(const Vec3& a, const Vec3& b, int n_elements, int section);

  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_dofs() const { return 6 * n_nodes(); }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  const std::vector<MeshElement>& elements() const { return elements_; }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  const std::vector<BeamSection>& sections() const { return sections_; }
  const BeamSection& section_of(int e) const { return sections_[elements_[e].section]; }
  const NodalDof& reference_node(int n) const { return nodes_[n]; }

  Eigen::VectorXd reference_dofs() const;
  std::array<int, 12> dof_map(int e) const;
  ElementDofs element_dofs(const Eigen::VectorXd& d, int e) const;
  Vec12 gather(const Eigen::VectorXd& d, int e) const;
  double min_radius() const;
  std::vector<SearchElement> search_elements(const Eigen::VectorXd& d) const;

  // Fiber coordinate in [-1, 1] of element parameter xi.
  double fiber_coordinate(int e, double xi) const;

 private:
  std::vector<NodalDof> nodes_;
  std::vector<MeshElement> elements_;
  std::vector<Fiber> fibers_;
  std::vector<BeamSection> sections_;
};

// Distributed force per unit reference length on a fiber:
// value * (linear ? fiber coordinate : 1) * profile(t).
struct LineLoad {
  int fiber = 0;
  Vec3 value = Vec3::Zero();
  bool linear_in_coordinate = false;
  TimeProfile profile = TimeProfile::constant(1.0);
};

struct NodalLoad {
  int node = 0;
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  TimeProfile profile = TimeProfile::constant(1.0);
};

enum class PathShape { linear, sine, one_minus_cosine };

// Prescribed dof value D0 + offset(t) with offset = amplitude * shape(profile(t)).
struct Prescription {
  int node = 0;
  int component = 0;  // 0..2 position, 3..5 tangent
  double amplitude = 0.0;
  TimeProfile profile;
  PathShape shape = PathShape::linear;

  int dof() const { return 6 * node + component; }
  double offset(double t) const;
};

struct Model {
  Mesh mesh;
  std::vector<LineLoad> line_loads;
  std::vector<NodalLoad> nodal_loads;
  std::vector<Prescription> dirichlet;

  void validate() const;
  // Sorted constrained dofs.
  std::vector<int> constrained_dofs() const;
  // Prescribed values at time t for the constrained dofs, in constrained_dofs() order.
  Eigen::VectorXd prescribed_values(double t) const;
};

const char* to_string(PathShape s);

}  // namespace abc_rods
