#pragma once

#include "abc_rods/model.hpp"

#include <limits>
#include <utility>

namespace abc_rods {

struct StepReport {
  int step = 0;
  double t = 0.0;
  double e_kin = 0.0;
  double e_int = 0.0;
  double pi_c = 0.0;
  double w_con = 0.0;
  Vec3 linear_momentum = Vec3::Zero();
  Vec3 angular_momentum = Vec3::Zero();
  int n_point = 0;
  int n_line_gp = 0;
  int n_endpoint = 0;
  int n_fallback = 0;
  double alpha_min = std::numeric_limits<double>::quiet_NaN();
  double alpha_max = std::numeric_limits<double>::quiet_NaN();
  int newton_iterations = 0;
  double dD_inf = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  Vec3 contact_force = Vec3::Zero();   // resultant on the lower-id element of each pair
  Vec3 contact_moment = Vec3::Zero();  // about the origin, same convention
};

// L = int rho A r_dot ds and H = int r x rho A r_dot ds by element quadrature.
std::pair<Vec3, Vec3> momenta(const Mesh& mesh, const Eigen::VectorXd& d, const Eigen::VectorXd& v);

double kinetic_energy(const Mesh& mesh, const Eigen::VectorXd& v);

double internal_energy(const Mesh& mesh, const Eigen::VectorXd& d, AxialTreatment axial, const GaussRule& rule);

// Increment dD^T R_con.
double contact_work_increment(const Eigen::VectorXd& dD, const Eigen::VectorXd& r_con);

// Elastic energy of a beam of length l bent into a quarter circle.
double quarter_circle_energy(double bending_stiffness, double length);

// Total mass of the mesh.
double total_mass(const Mesh& mesh);

}  // namespace abc_rods
