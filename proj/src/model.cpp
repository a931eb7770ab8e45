#include "abc_rods/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace abc_rods {

double TimeProfile::operator()(double t) const {
  if (points.empty()) return 0.0;
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  auto hi = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return (1.0 - w) * lo->second + w * hi->second;
}

int Mesh::add_section(const BeamSection& section) {
  section.validate();
  sections_.push_back(section);
  return static_cast<int>(sections_.size()) - 1;
}

int Mesh::add_fiber(const std::vector<NodalDof>& nodes, const std::vector<double>& lengths, int section) {
  if (nodes.size() < 2 || lengths.size() != nodes.size() - 1)
    throw InputError("fiber needs n + 1 nodes for n element lengths");
  if (section < 0 || section >= static_cast<int>(sections_.size())) throw InputError("unknown section id");
  Fiber f;
  f.first_node = n_nodes();
  f.first_element = n_elements();
  f.n_elements = static_cast<int>(lengths.size());
  for (const auto& n : nodes) {
    n.validate();
    nodes_.push_back(n);
  }
  double s = 0.0;
  for (int i = 0; i < f.n_elements; ++i) {
    if (!(lengths[i] > 0.0)) throw InputError("element reference length must be positive");
    MeshElement e;
    e.nodes = {f.first_node + i, f.first_node + i + 1};
    e.l0 = lengths[i];
    e.s0 = s;
    e.section = section;
    e.fiber = static_cast<int>(fibers_.size());
    e.physical_end = {i == 0, i == f.n_elements - 1};
    elements_.push_back(e);
    s += lengths[i];
  }
  f.length = s;
  fibers_.push_back(f);
  return static_cast<int>(fibers_.size()) - 1;
}

int Mesh::add_straight_fiber(const Vec3& a, const Vec3& b, int n_elements, int section) {
  if (n_elements < 1) throw InputError("fiber needs at least one element");
  const Vec3 t = (b - a).normalized();
  std::vector<NodalDof> nodes;
  for (int i = 0; i <= n_elements; ++i) nodes.push_back({a + (b - a) * (static_cast<double>(i) / n_elements), t});
  return add_fiber(nodes, std::vector<double>(n_elements, (b - a).norm() / n_elements), section);
}

Eigen::VectorXd Mesh::reference_dofs() const {
  Eigen::VectorXd d(n_dofs());
  for (int n = 0; n < n_nodes(); ++n) {
    d.segment<3>(6 * n) = nodes_[n].position;
    d.segment<3>(6 * n + 3) = nodes_[n].tangent;
  }
  return d;
}

std::array<int, 12> Mesh::dof_map(int e) const {
  std::array<int, 12> m{};
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 6; ++j) m[6 * k + j] = 6 * elements_[e].nodes[k] + j;
  return m;
}

Vec12 Mesh::gather(const Eigen::VectorXd& d, int e) const {
  Vec12 v;
  const auto m = dof_map(e);
  for (int i = 0; i < 12; ++i) v[i] = d[m[i]];
  return v;
}

ElementDofs Mesh::element_dofs(const Eigen::VectorXd& d, int e) const {
  ElementDofs out;
  out.d = gather(d, e);
  out.l0 = elements_[e].l0;
  out.s0 = elements_[e].s0;
  return out;
}

double Mesh::min_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& e : elements_) r = std::min(r, sections_[e.section].radius);
  return r;
}

std::vector<SearchElement> Mesh::search_elements(const Eigen::VectorXd& d) const {
  std::vector<SearchElement> out(elements_.size());
  for (int e = 0; e < n_elements(); ++e) {
    out[e].id = e;
    out[e].dofs = element_dofs(d, e);
    out[e].radius = section_of(e).radius;
    out[e].nodes = elements_[e].nodes;
  }
  return out;
}

double Mesh::fiber_coordinate(int e, double xi) const {
  const auto& el = elements_[e];
  const double s = el.s0 + 0.5 * (xi + 1.0) * el.l0;
  return 2.0 * s / fibers_[el.fiber].length - 1.0;
}

double Prescription::offset(double t) const {
  const double p = profile(t);
  switch (shape) {
    case PathShape::linear: return amplitude * p;
    case PathShape::sine: return amplitude * std::sin(p);
    case PathShape::one_minus_cosine: return amplitude * (1.0 - std::cos(p));
  }
  return 0.0;
}

const char* to_string(PathShape s) {
  switch (s) {
    case PathShape::linear: return "linear";
    case PathShape::sine: return "sine";
    case PathShape::one_minus_cosine: return "one_minus_cosine";
  }
  return "?";
}

void Model::validate() const {
  if (mesh.n_elements() == 0) throw InputError("model has no elements");
  std::set<int> seen;
  for (const auto& p : dirichlet) {
    if (p.node < 0 || p.node >= mesh.n_nodes()) throw InputError("dirichlet node " + std::to_string(p.node) + " out of range");
    if (p.component < 0 || p.component > 5) throw InputError("dirichlet component must be 0..5");
    if (!seen.insert(p.dof()).second) throw InputError("dof prescribed twice at node " + std::to_string(p.node));
  }
  for (const auto& l : line_loads)
    if (l.fiber < 0 || l.fiber >= static_cast<int>(mesh.fibers().size()))
      throw InputError("line load fiber " + std::to_string(l.fiber) + " out of range");
  for (const auto& l : nodal_loads)
    if (l.node < 0 || l.node >= mesh.n_nodes()) throw InputError("nodal load node " + std::to_string(l.node) + " out of range");
}

std::vector<int> Model::constrained_dofs() const {
  std::vector<int> out;
  for (const auto& p : dirichlet) out.push_back(p.dof());
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd Model::prescribed_values(double t) const {
  std::vector<std::pair<int, double>> v;
  const Eigen::VectorXd d0 = mesh.reference_dofs();
  for (const auto& p : dirichlet) v.emplace_back(p.dof(), d0[p.dof()] + p.offset(t));
  std::sort(v.begin(), v.end());
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].second;
  return out;
}

}  // namespace abc_rods
