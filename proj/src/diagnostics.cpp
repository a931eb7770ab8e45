#include "abc_rods/diagnostics.hpp"

namespace abc_rods {

std::pair<Vec3, Vec3> momenta(const Mesh& mesh, const Eigen::VectorXd& d, const Eigen::VectorXd& v) {
  const GaussRule& rule = GaussRule::legendre(4);
  Vec3 l = Vec3::Zero();
  Vec3 h = Vec3::Zero();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementDofs x = mesh.element_dofs(d, e);
    ElementDofs xd = x;
    xd.d = mesh.gather(v, e);
    const double rho_a = mesh.section_of(e).line_mass();
    const double j = x.jacobian();
    for (int g = 0; g < rule.size(); ++g) {
      const Vec3 r = interpolate(x, rule.points[g], 0);
      const Vec3 rd = interpolate(xd, rule.points[g], 0);
      const double w = rule.weights[g] * j * rho_a;
      l += w * rd;
      h += w * r.cross(rd);
    }
  }
  return {l, h};
}

double kinetic_energy(const Mesh& mesh, const Eigen::VectorXd& v) {
  double t = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat12 m = mass_matrix(mesh.element_dofs(mesh.reference_dofs(), e), mesh.section_of(e));
    const Vec12 ve = mesh.gather(v, e);
    t += 0.5 * ve.dot(m * ve);
  }
  return t;
}

double internal_energy(const Mesh& mesh, const Eigen::VectorXd& d, AxialTreatment axial, const GaussRule& rule) {
  double u = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    u += abc_rods::internal_energy(mesh.element_dofs(d, e), mesh.section_of(e), rule, axial);
  return u;
}

double contact_work_increment(const Eigen::VectorXd& dD, const Eigen::VectorXd& r_con) { return dD.dot(r_con); }

double quarter_circle_energy(double bending_stiffness, double length) {
  return bending_stiffness * kPi * kPi / (8.0 * length);
}

double total_mass(const Mesh& mesh) {
  double m = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) m += mesh.section_of(e).line_mass() * mesh.elements()[e].l0;
  return m;
}

}  // namespace abc_rods
