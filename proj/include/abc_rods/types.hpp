#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace abc_rods {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Row12 = Eigen::Matrix<double, 1, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec24 = Eigen::Matrix<double, 24, 1>;
using Row24 = Eigen::Matrix<double, 1, 24>;
using Mat24 = Eigen::Matrix<double, 24, 24>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;
using Mat3x24 = Eigen::Matrix<double, 3, 24>;

// Argument outside the admissible parameter range (e.g. xi outside [-1, 1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Degenerate geometry: zero tangent, coincident centerlines, singular projection matrix.
class SingularConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input (mesh, loads, scenario files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A contact evaluation that cannot be completed at the current state, e.g. an
// unconverged Gauss-point projection. The global solver rejects the step.
class ContactEvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace abc_rods
