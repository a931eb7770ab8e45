#pragma once

#include "abc_rods/geometry.hpp"
#include "abc_rods/quadrature.hpp"

#include <functional>

namespace abc_rods {

enum class AxialTreatment { standard, mcs };

struct ElementForces {
  Vec12 residual = Vec12::Zero();
  Mat12 stiffness = Mat12::Zero();
  double energy = 0.0;
};

// Internal forces of the torsion-free Kirchhoff element. The residual is the
// gradient of the discrete strain energy evaluated with the same rule.
Vec12 internal_residual(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule);
Mat12 internal_stiffness(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule);
double internal_energy(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule,
                       AxialTreatment axial = AxialTreatment::standard);

// Axial term replaced by the strain interpolated with quadratic Lagrange
// polynomials through xi = -1, 0, 1.
ElementForces mcs_internal_residual_stiffness(const ElementDofs& dofs, const BeamSection& section,
                                              const GaussRule& rule);

ElementForces internal_forces(const ElementDofs& dofs, const BeamSection& section, const GaussRule& rule,
                              AxialTreatment axial, bool with_stiffness = true);

Mat12 mass_matrix(const ElementDofs& dofs0, const BeamSection& section, const GaussRule& rule = GaussRule::legendre(4));
Vec12 kinetic_residual(const Mat12& mass, const Vec12& accel);

// Loads on one element. Fields are functions of the element parameter.
// Moments must be perpendicular to the centerline tangent.
struct ElementLoad {
  std::function<Vec3(double xi)> distributed_force;
  std::function<Vec3(double xi)> distributed_moment;
  std::array<Vec3, 2> point_force{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> point_moment{Vec3::Zero(), Vec3::Zero()};
};

struct ExternalForces {
  Vec12 residual = Vec12::Zero();
  Mat12 stiffness = Mat12::Zero();
};

// Sign convention: the returned residual enters R_tot with a plus sign, so a
// dead load f yields r = -int N^T f.
ExternalForces external_residual_stiffness(const ElementDofs& dofs, const ElementLoad& load, const GaussRule& rule);

}  // namespace abc_rods
