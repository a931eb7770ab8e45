#include "abc_rods/contact_point.hpp"

namespace abc_rods {

namespace {

// [N1(xi), -N2(eta)] as a 3x24 matrix.
Mat3x24 pair_shape(const ElementPair& pair, double xi, double eta, int order1, int order2) {
  Mat3x24 g = Mat3x24::Zero();
  if (order1 >= 0) g.leftCols<12>() = shape_matrix(xi, order1, pair.first.l0);
  if (order2 >= 0) g.rightCols<12>() = -shape_matrix(eta, order2, pair.second.l0);
  return g;
}

}  // namespace

ContactKernel contact_kernel(const ElementPair& pair, const UnitGeometry& geo, const PenaltyLaw& law,
                             bool with_stiffness) {
  ContactKernel k;
  k.r1 = interpolate(pair.first, geo.xi, 0);
  k.r2 = interpolate(pair.second, geo.eta, 0);
  const Vec3 dr = k.r1 - k.r2;
  const double d = dr.norm();
  if (d < 1e-14 * std::max(1.0, pair.first.l0 + pair.second.l0))
    throw SingularConfiguration("coincident centerline points, contact normal undefined");
  k.normal = dr / d;
  k.gap = d - pair.radius1 - pair.radius2;
  const Mat3x24 g = pair_shape(pair, geo.xi, geo.eta, 0, 0);
  const Vec3 r1x = interpolate(pair.first, geo.xi, 1);
  const Vec3 r2e = interpolate(pair.second, geo.eta, 1);
  // Total derivative of r1 - r2 with respect to the pair dofs.
  const Mat3x24 ddr = g + r1x * geo.dxi - r2e * geo.deta;
  k.dgap = k.normal.transpose() * ddr;
  k.active = law.active(k.gap);
  if (!k.active) return k;
  k.force = law.force(k.gap);
  k.potential = law.potential(k.gap);
  const Vec24 q = g.transpose() * k.normal;
  k.residual = -geo.scale * k.force * q;
  if (with_stiffness) {
    const Mat3 p = (Mat3::Identity() - k.normal * k.normal.transpose()) / d;
    const Vec24 qx = pair_shape(pair, geo.xi, geo.eta, 1, -1).transpose() * k.normal;
    const Vec24 qe = pair_shape(pair, geo.xi, geo.eta, -1, 1).transpose() * k.normal;
    Mat24 dq = g.transpose() * p * ddr;
    dq += qx * geo.dxi + qe * geo.deta;
    k.stiffness = -k.force * q * geo.dscale - geo.scale * law.stiffness(k.gap) * q * k.dgap -
                  geo.scale * k.force * dq;
  }
  return k;
}

UnitGeometry point_geometry(const ElementPair& pair, const ClosestPointSolution& sol) {
  const ProjectionSensitivity s = cpp_sensitivities(pair, sol);
  UnitGeometry geo;
  geo.xi = sol.xi;
  geo.eta = sol.eta;
  geo.dxi = s.dxi;
  geo.deta = s.deta;
  return geo;
}

PointContactState point_contact(const ElementPair& pair, const ClosestPointSolution& sol, const PenaltyLaw& law,
                                double weight, bool with_stiffness) {
  if (!sol.converged()) throw ContactEvaluationError("point contact requires a converged projection");
  PointContactState st;
  st.solution = sol;
  st.weight = weight;
  if (!law.active(sol.gap)) return st;
  const ContactKernel k = contact_kernel(pair, point_geometry(pair, sol), law, with_stiffness);
  st.active = k.active;
  st.force = k.force;
  st.residual = weight * k.residual;
  if (with_stiffness) st.stiffness = weight * k.stiffness;
  return st;
}

std::pair<Vec12, Vec12> point_residual(const ElementPair& pair, const ClosestPointSolution& sol,
                                       const PenaltyLaw& law, double weight) {
  const PointContactState st = point_contact(pair, sol, law, weight, false);
  return {st.residual.head<12>(), st.residual.tail<12>()};
}

Mat24 point_stiffness(const ElementPair& pair, const ClosestPointSolution& sol, const PenaltyLaw& law, double weight) {
  return point_contact(pair, sol, law, weight, true).stiffness;
}

PointContactState endpoint_residual_stiffness(const ElementPair& pair, const ClosestPointSolution& sol,
                                              const PenaltyLaw& law, double weight) {
  if (sol.kind == ProjectionKind::bilateral || sol.kind == ProjectionKind::unilateral)
    throw DomainError("endpoint contact requires an endpoint projection kind");
  return point_contact(pair, sol, law, weight, true);
}

}  // namespace abc_rods
