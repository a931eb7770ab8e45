#pragma once

#include "abc_rods/abc.hpp"

#include <functional>
#include <random>
#include <vector>

namespace abc_rods {
class Simulation;
}

// Finite-difference verification tools shared by the CLI and the test suites.
namespace abc_rods::verification {

// Central finite-difference Jacobian of f at x.
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h);
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h);

double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& reference);

// Rigid-body test vectors for a stack of element dof vectors (d1, t1, d2, t2, ...).
Eigen::VectorXd translation_vector(int n_nodes, const Vec3& direction);
Eigen::VectorXd rotation_vector(const Eigen::VectorXd& dofs, const Vec3& axis);

ElementDofs perturbed_element(const Vec3& center, const Vec3& direction, double length, double noise,
                              std::mt19937& rng);

enum class ConfigType {
  point,
  line_fixed,
  line_projected,
  endpoint_slave,
  endpoint_master,
  endpoint_both,
  transition
};

const char* to_string(ConfigType t);

struct PairConfig {
  ConfigType type = ConfigType::point;
  ElementPair pair;
  PairEnds ends;
  PairRequest request;
  ContactSettings settings;
};

// Randomized two-element configuration with an active contact of the given type.
PairConfig make_config(ConfigType type, std::mt19937& rng);

// Residual of a pair configuration evaluated at new pair dofs, started from the
// base solution so that the classification is stable.
PairEvaluation evaluate_at(const PairConfig& cfg, const Vec24& d, bool with_stiffness);

struct PairCheck {
  ConfigType type = ConfigType::point;
  TransitionVariant variant = TransitionVariant::force_based;
  bool active = false;
  double stiffness_error = 0.0;    // analytic tangent vs FD of the residual
  double gradient_error = 0.0;     // residual vs FD gradient of the potential
  double contraction_error = 0.0;  // largest rigid-body contraction relative to |r|
};

PairCheck check_pair(const PairConfig& cfg, double h = 1e-7);

// Randomized pair suite cycling through all configuration types and both variants.
std::vector<PairCheck> pair_suite(int n_configs, unsigned seed);

struct AssemblyCheck {
  double stiffness_error = 0.0;
  double residual_norm = 0.0;
  int active_units = 0;
};

// Static tangent of a simulation vs central differences of its assembled residual at d.
AssemblyCheck check_assembly(Simulation& sim, const Eigen::VectorXd& d, double t, double h = 1e-7);

}  // namespace abc_rods::verification
