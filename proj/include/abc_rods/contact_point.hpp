#pragma once

#include "abc_rods/closest_point.hpp"
#include "abc_rods/penalty.hpp"

namespace abc_rods {

// Location of one contact evaluation point and how it moves with the pair
// dofs. scale is 1 for point contact and w_j J for a line Gauss point.
struct UnitGeometry {
  double xi = 0.0;
  double eta = 0.0;
  Row24 dxi = Row24::Zero();
  Row24 deta = Row24::Zero();
  double scale = 1.0;
  Row24 dscale = Row24::Zero();
};

// Unweighted contribution r_u = -scale f(g) [N1^T n; -N2^T n] and its full
// derivative, chained through the parameter sensitivities in UnitGeometry.
struct ContactKernel {
  bool active = false;
  double gap = 0.0;
  double force = 0.0;
  double potential = 0.0;  // law potential Pi(g), without scale
  Vec3 normal = Vec3::Zero();
  Vec3 r1 = Vec3::Zero();
  Vec3 r2 = Vec3::Zero();
  Vec24 residual = Vec24::Zero();
  Mat24 stiffness = Mat24::Zero();
  Row24 dgap = Row24::Zero();  // total derivative of the gap
};

ContactKernel contact_kernel(const ElementPair& pair, const UnitGeometry& geo, const PenaltyLaw& law,
                             bool with_stiffness);

UnitGeometry point_geometry(const ElementPair& pair, const ClosestPointSolution& sol);

struct PointContactState {
  ClosestPointSolution solution;
  bool active = false;
  double force = 0.0;   // f(g), before weighting
  double weight = 1.0;  // transition weight applied
  Vec24 residual = Vec24::Zero();
  Mat24 stiffness = Mat24::Zero();
};

// Point or endpoint contact at a converged projection; the kind of the
// solution selects the sensitivities.
PointContactState point_contact(const ElementPair& pair, const ClosestPointSolution& sol, const PenaltyLaw& law,
                                double weight, bool with_stiffness = true);

std::pair<Vec12, Vec12> point_residual(const ElementPair& pair, const ClosestPointSolution& sol,
                                       const PenaltyLaw& law, double weight);
Mat24 point_stiffness(const ElementPair& pair, const ClosestPointSolution& sol, const PenaltyLaw& law, double weight);
PointContactState endpoint_residual_stiffness(const ElementPair& pair, const ClosestPointSolution& sol,
                                              const PenaltyLaw& law, double weight);

}  // namespace abc_rods
