#pragma once

#include "abc_rods/geometry.hpp"

#include <optional>

namespace abc_rods {

// Two elements in contact evaluation. Beam 1 is the slave, beam 2 the master;
// the 24 pair dofs are (d of element 1, d of element 2).
struct ElementPair {
  ElementDofs first;
  ElementDofs second;
  double radius1 = 0.0;
  double radius2 = 0.0;

  Vec24 dofs() const;
  void set_dofs(const Vec24& d);
};

enum class ProjectionKind { bilateral, unilateral, endpoint_slave, endpoint_master, endpoint_both };
enum class ProjectionStatus { converged, unconverged, out_of_domain, singular };

const char* to_string(ProjectionKind kind);
const char* to_string(ProjectionStatus status);

struct ClosestPointSolution {
  double xi = 0.0;
  double eta = 0.0;
  double gap = 0.0;
  double distance = 0.0;
  Vec3 normal = Vec3::Zero();
  double z = 0.0;
  double alpha_deg = 0.0;
  ProjectionKind kind = ProjectionKind::bilateral;
  ProjectionStatus status = ProjectionStatus::unconverged;
  int iterations = 0;

  bool converged() const { return status == ProjectionStatus::converged; }
};

struct ProjectionOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

// Fills gap, normal and angle from (xi, eta). Throws SingularConfiguration for
// coincident centerline points.
void evaluate_solution(const ElementPair& pair, ClosestPointSolution& sol);

ClosestPointSolution bilateral_cpp(const ElementPair& pair, double xi0, double eta0,
                                   const ProjectionOptions& opts = {});

// Slave parameter xi fixed, Newton in eta.
ClosestPointSolution unilateral_cpp(const ElementPair& pair, double xi, double eta0,
                                    const ProjectionOptions& opts = {});

// Closest point with one or both parameters fixed at element ends.
ClosestPointSolution endpoint_cpp(const ElementPair& pair, ProjectionKind kind, double xi_fixed, double eta_fixed,
                                  double start, const ProjectionOptions& opts = {});

struct ProjectionSensitivity {
  Row24 dxi = Row24::Zero();
  Row24 deta = Row24::Zero();
  double deta_dxi = 0.0;  // unilateral only: partial of eta w.r.t. the slave parameter
};

ProjectionSensitivity cpp_sensitivities(const ElementPair& pair, const ClosestPointSolution& sol);

struct BoundaryProjection {
  double eta_ep = 0.0;
  double xi_b = 0.0;
  Row24 dxi_b = Row24::Zero();
  int iterations = 0;
};

// Solves p2(xi, eta_ep) = 0 for xi. Empty result signals no overlap inside [-1, 1].
std::optional<BoundaryProjection> master_endpoint_projection(const ElementPair& pair, double eta_ep, double xi0,
                                                             const ProjectionOptions& opts = {});

struct ContactAngle {
  double z = 0.0;
  double alpha_deg = 0.0;
};

ContactAngle contact_angle(const Vec3& r1_prime, const Vec3& r2_prime);

// Orthogonality residuals and their partials at (xi, eta).
struct OrthogonalityTerms {
  Vec3 r1, r1x, r1xx, r2, r2e, r2ee;
  double p1, p2;
  Eigen::Matrix2d a;  // rows d p1, d p2 with respect to (xi, eta)
  Row24 p1d, p2d;     // partial derivatives with respect to the pair dofs
};

OrthogonalityTerms orthogonality_terms(const ElementPair& pair, double xi, double eta, bool with_dofs);

}  // namespace abc_rods
