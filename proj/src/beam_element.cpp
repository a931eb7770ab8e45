#include "abc_rods/beam_element.hpp"

#include <cmath>

namespace abc_rods {

namespace {

struct Kinematics {
  Vec3 a;  // r'
  Vec3 b;  // r''
  double na;
  Eigen::Matrix<double, 3, 12> n1;  // N'
  Eigen::Matrix<double, 3, 12> n2;  // N''
  std::array<double, 4> c1;
  std::array<double, 4> c2;
};

Kinematics kinematics(const ElementDofs& dofs, double xi) {
  const double j = dofs.jacobian();
  Kinematics k;
  k.c1 = shape_coefficients(xi, 1, dofs.l0);
  k.c2 = shape_coefficients(xi, 2, dofs.l0);
  k.a.setZero();
  k.b.setZero();
  k.n1.setZero();
  k.n2.setZero();
  for (int i = 0; i < 4; ++i) {
    k.c1[i] /= j;
    k.c2[i] /= j * j;
    k.a += k.c1[i] * dofs.d.segment<3>(3 * i);
    k.b += k.c2[i] * dofs.d.segment<3>(3 * i);
    k.n1.block<3, 3>(0, 3 * i) = k.c1[i] * Mat3::Identity();
    k.n2.block<3, 3>(0, 3 * i) = k.c2[i] * Mat3::Identity();
  }
  k.na = k.a.norm();
  if (k.na < 1e-12) throw SingularConfiguration("centerline tangent vanishes at a Gauss point");
  return k;
}

// Accumulates B^T v where B = N' (or N''), exploiting the scalar-identity block structure.
void add_bt(Vec12& r, const std::array<double, 4>& c, const Vec3& v, double w) {
  for (int i = 0; i < 4; ++i) r.segment<3>(3 * i) += (w * c[i]) * v;
}

void add_btb(Mat12& k, const std::array<double, 4>& cl, const Mat3& h, const std::array<double, 4>& cr, double w) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k.block<3, 3>(3 * i, 3 * j) += (w * cl[i] * cr[j]) * h;
}

struct BendingTerms {
  Vec3 t2;
  Vec3 t3;
  Mat3 t2a, t2b, t3a, t3b;
  double energy;  // per unit EI
};

BendingTerms bending(const Vec3& a, const Vec3& b, bool with_tangent) {
  const Mat3 id = Mat3::Identity();
  const double aa = a.squaredNorm();
  const double a4 = aa * aa;
  const double a6 = a4 * aa;
  const double ab = a.dot(b);
  const double bb = b.squaredNorm();
  BendingTerms t;
  t.t2 = 2.0 * a * ab * ab / a6 - (a * bb + b * ab) / a4;
  t.t3 = b / aa - a * ab / a4;
  t.energy = 0.5 * (bb / aa - ab * ab / a4);
  if (with_tangent) {
    const double a8 = a6 * aa;
    t.t2a = (2.0 * ab * ab / a6 - bb / a4) * id + (-12.0 * ab * ab / a8 + 4.0 * bb / a6) * a * a.transpose() +
            (4.0 * ab / a6) * (a * b.transpose() + b * a.transpose()) - b * b.transpose() / a4;
    t.t2b = -(ab / a4) * id + (4.0 * ab / a6) * a * a.transpose() - (2.0 / a4) * a * b.transpose() -
            (1.0 / a4) * b * a.transpose();
    t.t3a = t.t2b.transpose();
    t.t3b = id / aa - a * a.transpose() / a4;
  }
  return t;
}

void add_bending(ElementForces& out, const Kinematics& k, double ei, double w, bool with_stiffness) {
  const BendingTerms t = bending(k.a, k.b, with_stiffness);
  add_bt(out.residual, k.c1, ei * t.t2, w);
  add_bt(out.residual, k.c2, ei * t.t3, w);
  out.energy += w * ei * t.energy;
  if (with_stiffness) {
    add_btb(out.stiffness, k.c1, ei * t.t2a, k.c1, w);
    add_btb(out.stiffness, k.c1, ei * t.t2b, k.c2, w);
    add_btb(out.stiffness, k.c2, ei * t.t3a, k.c1, w);
    add_btb(out.stiffness, k.c2, ei * t.t3b, k.c2, w);
  }
}

void add_axial_standard(ElementForces& out, const Kinematics& k, double ea, double w, bool with_stiffness) {
  const Vec3 e = k.a / k.na;
  const double eps = k.na - 1.0;
  add_bt(out.residual, k.c1, ea * eps * e, w);
  out.energy += w * 0.5 * ea * eps * eps;
  if (with_stiffness) {
    const Mat3 t1a = (eps / k.na) * Mat3::Identity() + k.a * k.a.transpose() / (k.na * k.na * k.na);
    add_btb(out.stiffness, k.c1, ea * t1a, k.c1, w);
  }
}

}  // namespace

ElementForces internal_forces(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule,
                              AxialTreatment axial, bool with_stiffness) {
  ElementForces out;
  const double j = dofs.jacobian();
  const double ea = section.axial_stiffness();
  const double ei = section.bending_stiffness();
  for (int g = 0; g < rule.size(); ++g) {
    const Kinematics k = kinematics(dofs, rule.points[g]);
    const double w = rule.weights[g] * j;
    add_bending(out, k, ei, w, with_stiffness);
    if (axial == AxialTreatment::standard) add_axial_standard(out, k, ea, w, with_stiffness);
  }
  if (axial == AxialTreatment::mcs) {
    // Collocated axial strains eps_i, gradients g_i and Hessians h_i at xi = -1, 0, 1.
    const std::array<double, 3> nodes{-1.0, 0.0, 1.0};
    std::array<double, 3> eps{};
    std::array<Row12, 3> grad;
    std::array<Mat12, 3> hess;
    for (int i = 0; i < 3; ++i) {
      const Kinematics k = kinematics(dofs, nodes[i]);
      eps[i] = k.na - 1.0;
      const Vec3 e = k.a / k.na;
      grad[i] = e.transpose() * k.n1;
      if (with_stiffness) {
        const Mat3 p = (Mat3::Identity() - e * e.transpose()) / k.na;
        hess[i] = k.n1.transpose() * p * k.n1;
      }
    }
    // Lagrange mass matrix m_ij = int L_i L_j J dxi.
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int g = 0; g < rule.size(); ++g) {
      const double x = rule.points[g];
      const Eigen::Vector3d l(0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0));
      m += rule.weights[g] * j * l * l.transpose();
    }
    const Eigen::Vector3d ev(eps[0], eps[1], eps[2]);
    const Eigen::Vector3d me = m * ev;
    out.energy += 0.5 * ea * ev.dot(me);
    for (int i = 0; i < 3; ++i) {
      out.residual += ea * me[i] * grad[i].transpose();
      if (with_stiffness) {
        out.stiffness += ea * me[i] * hess[i];
        for (int jj = 0; jj < 3; ++jj) out.stiffness += ea * m(i, jj) * grad[i].transpose() * grad[jj];
      }
    }
  }
  return out;
}

Vec12 internal_residual(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule) {
  return internal_forces(dofs, section, rule, AxialTreatment::standard, false).residual;
}

Mat12 internal_stiffness(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule) {
  return internal_forces(dofs, section, rule, AxialTreatment::standard, true).stiffness;
}

double internal_energy(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule,
                       AxialTreatment axial) {
  return internal_forces(dofs, section, rule, axial, false).energy;
}

ElementForces mcs_internal_residual_stiffness(const ElementDofs& dofs, const BeamSection& section,
                                              const GaussRule& rule) {
  return internal_forces(dofs, section, rule, AxialTreatment::mcs, true);
}

Mat12 mass_matrix(const ElementDofs& dofs0, const BeamSection& section, const GaussRule& rule) {
  Mat12 m = Mat12::Zero();
  const double j = dofs0.jacobian();
  for (int g = 0; g < rule.size(); ++g) {
    const auto c = shape_coefficients(rule.points[g], 0, dofs0.l0);
    add_btb(m, c, section.line_mass() * Mat3::Identity(), c, rule.weights[g] * j);
  }
  return m;
}

Vec12 kinetic_residual(const Mat12& mass, const Vec12& accel) { return mass * accel; }

namespace {

void check_moment(const Vec3& m, const Vec3& a) {
  if (std::abs(a.dot(m)) > 1e-10 * m.norm() * a.norm())
    throw InputError("applied moment is not perpendicular to the centerline tangent");
}

void add_moment(ExternalForces& out, const std::array<double, 4>& c1, const Vec3& a, const Vec3& m, double w) {
  check_moment(m, a);
  const double aa = a.squaredNorm();
  const Vec3 t4 = a / aa;
  add_bt(out.residual, c1, -m.cross(t4), w);
  const Mat3 dt4 = Mat3::Identity() / aa - 2.0 * a * a.transpose() / (aa * aa);
  add_btb(out.stiffness, c1, -skew(m) * dt4, c1, w);
}

}  // namespace

ExternalForces external_residual_stiffness(const ElementDofs& dofs, const ElementLoad& load, const GaussRule& rule) {
  ExternalForces out;
  const double j = dofs.jacobian();
  if (load.distributed_force || load.distributed_moment) {
    for (int g = 0; g < rule.size(); ++g) {
      const double xi = rule.points[g];
      const double w = rule.weights[g] * j;
      if (load.distributed_force) {
        const auto c0 = shape_coefficients(xi, 0, dofs.l0);
        add_bt(out.residual, c0, -load.distributed_force(xi), w);
      }
      if (load.distributed_moment) {
        const Kinematics k = kinematics(dofs, xi);
        add_moment(out, k.c1, k.a, load.distributed_moment(xi), w);
      }
    }
  }
  for (int node = 0; node < 2; ++node) {
    const double xi = node == 0 ? -1.0 : 1.0;
    if (load.point_force[node].squaredNorm() > 0.0)
      add_bt(out.residual, shape_coefficients(xi, 0, dofs.l0), -load.point_force[node], 1.0);
    if (load.point_moment[node].squaredNorm() > 0.0) {
      const Kinematics k = kinematics(dofs, xi);
      add_moment(out, k.c1, k.a, load.point_moment[node], 1.0);
    }
  }
  return out;
}

}  // namespace abc_rods
