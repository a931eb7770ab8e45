#pragma once

#include "abc_rods/types.hpp"

#include <array>

namespace abc_rods {

struct NodalDof {
  Vec3 position = Vec3::Zero();
  Vec3 tangent = Vec3::UnitX();

  void validate() const;
};

struct BeamSection {
  double radius = 0.0;
  double youngs_modulus = 0.0;
  double area = 0.0;
  double inertia = 0.0;
  double density = 0.0;

  // Full circular section: A = pi R^2, I = pi R^4 / 4.
  static BeamSection circular(double radius, double youngs_modulus, double density);
  void validate() const;
  double axial_stiffness() const { return youngs_modulus * area; }
  double bending_stiffness() const { return youngs_modulus * inertia; }
  double line_mass() const { return density * area; }
};

// Dof layout: (d1, t1, d2, t2), three components each.
struct ElementDofs {
  Vec12 d = Vec12::Zero();
  double l0 = 1.0;
  double s0 = 0.0;

  static ElementDofs from_nodes(const NodalDof& n1, const NodalDof& n2, double l0, double s0 = 0.0);
  static ElementDofs straight(const Vec3& a, const Vec3& b);

  Vec3 node_position(int node) const { return d.segment<3>(6 * node); }
  Vec3 node_tangent(int node) const { return d.segment<3>(6 * node + 3); }
  double jacobian() const { return 0.5 * l0; }
};

// Hermite polynomials (N1d, N2d, N1t, N2t) or their xi-derivatives.
struct ShapeValues {
  double n1d = 0.0;
  double n2d = 0.0;
  double n1t = 0.0;
  double n2t = 0.0;
};

ShapeValues shape_values(double xi, int derivative_order);

// Scalar coefficients multiplying d1, t1, d2, t2 in the interpolation, including
// the l0/2 factor on the tangent terms.
std::array<double, 4> shape_coefficients(double xi, int derivative_order, double l0);

// 3x12 matrix N, N^| or N^|| such that r = N d.
Mat3x12 shape_matrix(double xi, int derivative_order, double l0);

Vec3 interpolate(const ElementDofs& dofs, double xi, int derivative_order);

double scaled_curvature(const ElementDofs& dofs, double xi);

void check_parameter(double xi);

}  // namespace abc_rods
