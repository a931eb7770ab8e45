#include "abc_rods/geometry.hpp"

#include <cmath>
#include <sstream>

namespace abc_rods {

void NodalDof::validate() const {
  if (!(tangent.norm() > 0.0)) throw InputError("nodal tangent must be nonzero");
  if (!position.allFinite() || !tangent.allFinite()) throw InputError("nodal dof is not finite");
}

BeamSection BeamSection::circular(double radius, double youngs_modulus, double density) {
  BeamSection s;
  s.radius = radius;
  s.youngs_modulus = youngs_modulus;
  s.area = kPi * radius * radius;
  s.inertia = kPi * std::pow(radius, 4) / 4.0;
  s.density = density;
  return s;
}

void BeamSection::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InputError(std::string("section ") + name + " must be positive");
  };
  positive(radius, "radius");
  positive(youngs_modulus, "youngs_modulus");
  positive(area, "area");
  positive(inertia, "inertia");
  positive(density, "density");
}

ElementDofs ElementDofs::from_nodes(const NodalDof& n1, const NodalDof& n2, double l0, double s0) {
  n1.validate();
  n2.validate();
  if (!(l0 > 0.0)) throw InputError("element reference length must be positive");
  ElementDofs e;
  e.d << n1.position, n1.tangent, n2.position, n2.tangent;
  e.l0 = l0;
  e.s0 = s0;
  return e;
}

ElementDofs ElementDofs::straight(const Vec3& a, const Vec3& b) {
  const Vec3 t = (b - a).normalized();
  return from_nodes({a, t}, {b, t}, (b - a).norm());
}

void check_parameter(double xi) {
  if (!(xi >= -1.0 && xi <= 1.0)) {
    std::ostringstream os;
    os << "element parameter " << xi << " outside [-1, 1]";
    throw DomainError(os.str());
  }
}

ShapeValues shape_values(double xi, int derivative_order) {
  check_parameter(xi);
  const double m = 1.0 - xi;
  const double p = 1.0 + xi;
  ShapeValues s;
  switch (derivative_order) {
    case 0:
      s.n1d = 0.25 * (2.0 + xi) * m * m;
      s.n2d = 0.25 * (2.0 - xi) * p * p;
      s.n1t = 0.25 * p * m * m;
      s.n2t = -0.25 * m * p * p;
      break;
    case 1:
      s.n1d = 0.75 * (xi * xi - 1.0);
      s.n2d = 0.75 * (1.0 - xi * xi);
      s.n1t = 0.25 * (3.0 * xi * xi - 2.0 * xi - 1.0);
      s.n2t = 0.25 * (3.0 * xi * xi + 2.0 * xi - 1.0);
      break;
    case 2:
      s.n1d = 1.5 * xi;
      s.n2d = -1.5 * xi;
      s.n1t = 0.5 * (3.0 * xi - 1.0);
      s.n2t = 0.5 * (3.0 * xi + 1.0);
      break;
    default:
      throw DomainError("derivative order must be 0, 1 or 2");
  }
  return s;
}

std::array<double, 4> shape_coefficients(double xi, int derivative_order, double l0) {
  const ShapeValues s = shape_values(xi, derivative_order);
  const double h = 0.5 * l0;
  return {s.n1d, h * s.n1t, s.n2d, h * s.n2t};
}

Mat3x12 shape_matrix(double xi, int derivative_order, double l0) {
  const auto c = shape_coefficients(xi, derivative_order, l0);
  Mat3x12 n = Mat3x12::Zero();
  for (int k = 0; k < 4; ++k) n.block<3, 3>(0, 3 * k) = c[k] * Mat3::Identity();
  return n;
}

Vec3 interpolate(const ElementDofs& dofs, double xi, int derivative_order) {
  const auto c = shape_coefficients(xi, derivative_order, dofs.l0);
  Vec3 r = Vec3::Zero();
  for (int k = 0; k < 4; ++k) r += c[k] * dofs.d.segment<3>(3 * k);
  return r;
}

double scaled_curvature(const ElementDofs& dofs, double xi) {
  const double j = dofs.jacobian();
  const Vec3 r1 = interpolate(dofs, xi, 1) / j;
  const Vec3 r2 = interpolate(dofs, xi, 2) / (j * j);
  const double n = r1.norm();
  if (n < 1e-12) throw SingularConfiguration("zero centerline tangent");
  return r1.cross(r2).norm() / (n * n * n);
}

}  // namespace abc_rods
