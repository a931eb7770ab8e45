#pragma once

#include "abc_rods/contact_point.hpp"
#include "abc_rods/quadrature.hpp"

#include <functional>
#include <vector>

namespace abc_rods {

enum class BoundKind { fixed, boundary_projected };

struct IntervalBound {
  double xi = 0.0;
  BoundKind kind = BoundKind::fixed;
  double eta_ep = 0.0;  // master endpoint for projected bounds
  Row24 dxi = Row24::Zero();
};

struct IntegrationInterval {
  IntervalBound lower;
  IntervalBound upper;
};

struct IntegrationScheme {
  int n_ii = 1;
  int n_gr = 1;
  std::vector<IntegrationInterval> intervals;
  GaussRule rule;

  // Gauss coordinate xi_ij in the slave element.
  double gauss_coordinate(int i, int j) const;
};

// Master endpoint projection with the side of the slave parameter on which the
// slave overlaps the master (+1: xi > xi_B, -1: xi < xi_B).
struct EndpointSegmentation {
  BoundaryProjection projection;
  int overlap_side = 1;
};

// Equidistant intervals with master-endpoint segmentation applied.
IntegrationScheme build_scheme(int n_ii, int n_gr, const std::vector<EndpointSegmentation>& endpoints);

// Computes the master-endpoint projections for the physical master ends
// flagged in master_ends ([0]: eta = -1, [1]: eta = +1) and builds the scheme.
IntegrationScheme build_scheme(const ElementPair& pair, int n_ii, int n_gr, const std::array<bool, 2>& master_ends,
                               const ProjectionOptions& opts = {});

std::optional<EndpointSegmentation> segment_at_master_end(const ElementPair& pair, double eta_ep,
                                                          const ProjectionOptions& opts = {});

// J = J_ele (xi_2 - xi_1) / 2.
double total_jacobian(double l0_slave, const IntegrationInterval& interval);
double total_jacobian(const IntegrationScheme& scheme, int i, double l0_slave);

// Per Gauss point state after the unilateral projection.
struct LineGaussPoint {
  int interval = 0;
  int index = 0;
  double xi_bar = 0.0;
  double weight = 0.0;
  ClosestPointSolution solution;
  UnitGeometry geometry;
  bool valid = false;  // projection inside the master element
};

// Projects one Gauss point and computes its parameter sensitivities. Throws
// ContactEvaluationError if the projection is unconverged.
LineGaussPoint locate_gauss_point(const ElementPair& pair, const IntegrationScheme& scheme, int i, int j,
                                  double eta_start, const ProjectionOptions& opts = {});

// Start value for the unilateral projection: slave point projected onto the master chord.
double chord_start(const ElementPair& pair, double xi);

struct LineContactResult {
  Vec24 residual = Vec24::Zero();
  Mat24 stiffness = Mat24::Zero();
  int active_points = 0;
};

// Residual and stiffness with per-Gauss-point weights k (empty: all ones).
LineContactResult line_contact(const ElementPair& pair, const IntegrationScheme& scheme, const PenaltyLaw& law,
                               const std::vector<double>& weights = {}, bool with_stiffness = true,
                               const ProjectionOptions& opts = {});

std::pair<Vec12, Vec12> line_residual(const ElementPair& pair, const IntegrationScheme& scheme,
                                      const PenaltyLaw& law, const std::vector<double>& weights = {});
Mat24 line_stiffness(const ElementPair& pair, const IntegrationScheme& scheme, const PenaltyLaw& law,
                     const std::vector<double>& weights = {});

// Re-evaluates the bounds of an existing scheme at new pair dofs, keeping the
// interval structure (used for finite-difference checks of the linearization).
IntegrationScheme reevaluate_scheme(const ElementPair& pair, const IntegrationScheme& scheme,
                                    const ProjectionOptions& opts = {});

}  // namespace abc_rods
