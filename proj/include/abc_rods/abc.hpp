#pragma once

#include "abc_rods/contact_line.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace abc_rods {

enum class TransitionVariant { force_based, potential_based };
enum class ContactMode { abc, point_only, line_only };
enum class UnitClass { point, line };

const char* to_string(TransitionVariant v);
const char* to_string(ContactMode m);

struct TransitionConfig {
  double alpha1 = 10.0;  // degrees
  double alpha2 = 12.0;  // degrees
  TransitionVariant variant = TransitionVariant::force_based;
  double eps_perp = 1.0;
  double eps_par = 1.0;
  double k_alpha1 = 1.0;
  double mu_max = 0.0;

  double z1() const;
  double z2() const;
  void validate() const;
};

double transition_factor(double z, const TransitionConfig& cfg);
double transition_factor_dz(double z, const TransitionConfig& cfg);
double transition_factor_dzz(double z, const TransitionConfig& cfg);

// Weight a(z) of a point or line unit and its first two z-derivatives.
struct TransitionWeight {
  double a = 0.0;
  double da = 0.0;
  double dda = 0.0;
};

TransitionWeight unit_weight(UnitClass cls, double z, const TransitionConfig& cfg, ContactMode mode);

// Signed derivative of z = |r1^|.r2^|| / (|r1^|| |r2^||) with respect to the
// pair dofs, including the chain terms through the projection parameters.
Row24 delta_z_row(const ElementPair& pair, const UnitGeometry& geo);
Row24 delta_z_row(const ElementPair& pair, const ClosestPointSolution& sol);

// Re-locates a contact unit at perturbed pair dofs.
using UnitLocator = std::function<std::optional<UnitGeometry>(const ElementPair&)>;

// Central finite difference of delta_z_row with re-projection.
Mat24 delta_z_jacobian_fd(const ElementPair& pair, const UnitLocator& locate);

struct UnitContribution {
  bool active = false;
  double z = 0.0;
  TransitionWeight weight;
  ContactKernel kernel;
  Vec24 residual = Vec24::Zero();
  Mat24 stiffness = Mat24::Zero();
  double potential = 0.0;  // scale * a * Pi(g)
};

UnitContribution combine_unit(const ElementPair& pair, const UnitGeometry& geo, const PenaltyLaw& law, UnitClass cls,
                              const TransitionConfig& cfg, ContactMode mode, const UnitLocator& relocate,
                              bool with_stiffness);

struct ContactSettings {
  PenaltyVariant law_variant = PenaltyVariant::linear;
  double g_bar = 0.0;
  TransitionConfig transition;
  ContactMode mode = ContactMode::abc;
  int n_ii = 8;
  int n_gr = 5;
  ProjectionOptions cpp;

  PenaltyLaw point_law() const;
  PenaltyLaw line_law() const;
  void validate() const;
};

// Physical beam ends: [0] at parameter -1, [1] at parameter +1.
struct PairEnds {
  std::array<bool, 2> slave{false, false};
  std::array<bool, 2> master{false, false};
};

enum class UnitKind { point, endpoint, line_gp, fallback };

struct ForceRecord {
  Vec3 position = Vec3::Zero();
  Vec3 force = Vec3::Zero();  // on beam 1
  UnitKind kind = UnitKind::point;
};

struct PairEvaluation {
  Vec24 residual = Vec24::Zero();
  Mat24 stiffness = Mat24::Zero();
  double potential = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  int n_point = 0;
  int n_line_gp = 0;
  int n_endpoint = 0;
  int n_fallback = 0;
  double alpha_min = std::numeric_limits<double>::infinity();
  double alpha_max = -std::numeric_limits<double>::infinity();
  std::vector<ForceRecord> forces;
  std::optional<ClosestPointSolution> point_solution;
  IntegrationScheme scheme;
};

struct PairRequest {
  bool point = true;
  bool line = true;
  double xi0 = 0.0;
  double eta0 = 0.0;
};

// Full ABC contribution of one slave/master element pair.
PairEvaluation evaluate_pair(const ElementPair& pair, const PairEnds& ends, const ContactSettings& settings,
                             const PairRequest& request, bool with_stiffness);

// Force-based and potential-based combinations on a given pair with explicit
// point solution and integration scheme.
PairEvaluation abc_force_based(const ElementPair& pair, const std::optional<ClosestPointSolution>& point,
                               const IntegrationScheme& scheme, const ContactSettings& settings);
PairEvaluation abc_potential_based(const ElementPair& pair, const std::optional<ClosestPointSolution>& point,
                                   const IntegrationScheme& scheme, const ContactSettings& settings);

// Parameter selection.
double choose_alpha1(double mu_max, double k_alpha1);
int min_gauss_points(double g_n_min, double alpha_max_deg, double rho_slave, double k_gp);
double min_gauss_points_real(double g_n_min, double alpha_max_deg, double rho_slave, double k_gp);
double penalty_ratio_analytic(double radius, double alpha_bar_deg);
double penalty_ratio_numeric(const PenaltyLaw& law_par, double g_min, double alpha_bar_deg, double radius);

}  // namespace abc_rods
