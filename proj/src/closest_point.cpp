#include "abc_rods/closest_point.hpp"

#include <algorithm>
#include <cmath>

namespace abc_rods {

Vec24 ElementPair::dofs() const {
  Vec24 d;
  d << first.d, second.d;
  return d;
}

void ElementPair::set_dofs(const Vec24& d) {
  first.d = d.head<12>();
  second.d = d.tail<12>();
}

const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::bilateral: return "bilateral";
    case ProjectionKind::unilateral: return "unilateral";
    case ProjectionKind::endpoint_slave: return "endpoint_slave";
    case ProjectionKind::endpoint_master: return "endpoint_master";
    case ProjectionKind::endpoint_both: return "endpoint_both";
  }
  return "unknown";
}

const char* to_string(ProjectionStatus status) {
  switch (status) {
    case ProjectionStatus::converged: return "converged";
    case ProjectionStatus::unconverged: return "unconverged";
    case ProjectionStatus::out_of_domain: return "out_of_domain";
    case ProjectionStatus::singular: return "singular";
  }
  return "unknown";
}

namespace {

// Row vector v^T N for the scalar-identity block structure of the shape matrix.
Row12 vt_n(const Vec3& v, const std::array<double, 4>& c) {
  Row12 r;
  for (int i = 0; i < 4; ++i) r.segment<3>(3 * i) = c[i] * v.transpose();
  return r;
}

double scale_of(const ElementPair& pair, double distance) {
  return std::max(distance, pair.radius1 + pair.radius2);
}

// Projects onto [-1, 1]; returns true if clamping was needed.
bool clamp_unit(double& x) {
  if (x > 1.0) {
    x = 1.0;
    return true;
  }
  if (x < -1.0) {
    x = -1.0;
    return true;
  }
  return false;
}

}  // namespace

OrthogonalityTerms orthogonality_terms(const ElementPair& pair, double xi, double eta, bool with_dofs) {
  OrthogonalityTerms t;
  const auto& e1 = pair.first;
  const auto& e2 = pair.second;
  const auto c10 = shape_coefficients(xi, 0, e1.l0);
  const auto c11 = shape_coefficients(xi, 1, e1.l0);
  const auto c12 = shape_coefficients(xi, 2, e1.l0);
  const auto c20 = shape_coefficients(eta, 0, e2.l0);
  const auto c21 = shape_coefficients(eta, 1, e2.l0);
  const auto c22 = shape_coefficients(eta, 2, e2.l0);
  t.r1.setZero(); t.r1x.setZero(); t.r1xx.setZero();
  t.r2.setZero(); t.r2e.setZero(); t.r2ee.setZero();
  for (int i = 0; i < 4; ++i) {
    const Vec3 a = e1.d.segment<3>(3 * i);
    const Vec3 b = e2.d.segment<3>(3 * i);
    t.r1 += c10[i] * a; t.r1x += c11[i] * a; t.r1xx += c12[i] * a;
    t.r2 += c20[i] * b; t.r2e += c21[i] * b; t.r2ee += c22[i] * b;
  }
  const Vec3 dr = t.r1 - t.r2;
  t.p1 = t.r1x.dot(dr);
  t.p2 = t.r2e.dot(dr);
  t.a(0, 0) = t.r1x.dot(t.r1x) + dr.dot(t.r1xx);
  t.a(0, 1) = -t.r1x.dot(t.r2e);
  t.a(1, 0) = t.r2e.dot(t.r1x);
  t.a(1, 1) = -t.r2e.dot(t.r2e) + dr.dot(t.r2ee);
  if (with_dofs) {
    t.p1d << vt_n(dr, c11) + vt_n(t.r1x, c10), -vt_n(t.r1x, c20);
    t.p2d << vt_n(t.r2e, c10), vt_n(dr, c21) - vt_n(t.r2e, c20);
  } else {
    t.p1d.setZero();
    t.p2d.setZero();
  }
  return t;
}

ContactAngle contact_angle(const Vec3& r1_prime, const Vec3& r2_prime) {
  const double n1 = r1_prime.norm();
  const double n2 = r2_prime.norm();
  if (n1 < 1e-300 || n2 < 1e-300) throw SingularConfiguration("contact angle of a zero tangent");
  ContactAngle c;
  c.z = std::min(1.0, std::abs(r1_prime.dot(r2_prime)) / (n1 * n2));
  c.alpha_deg = rad_to_deg(std::acos(c.z));
  return c;
}

void evaluate_solution(const ElementPair& pair, ClosestPointSolution& sol) {
  const Vec3 r1 = interpolate(pair.first, sol.xi, 0);
  const Vec3 r2 = interpolate(pair.second, sol.eta, 0);
  const Vec3 dr = r1 - r2;
  sol.distance = dr.norm();
  if (sol.distance < 1e-14 * std::max(1.0, pair.first.l0 + pair.second.l0))
    throw SingularConfiguration("coincident centerline points, contact normal undefined");
  sol.normal = dr / sol.distance;
  sol.gap = sol.distance - pair.radius1 - pair.radius2;
  const ContactAngle c = contact_angle(interpolate(pair.first, sol.xi, 1), interpolate(pair.second, sol.eta, 1));
  sol.z = c.z;
  sol.alpha_deg = c.alpha_deg;
}

namespace {

void finish(const ElementPair& pair, ClosestPointSolution& sol) {
  if (sol.status == ProjectionStatus::singular) return;
  evaluate_solution(pair, sol);
}

}  // namespace

ClosestPointSolution bilateral_cpp(const ElementPair& pair, double xi0, double eta0, const ProjectionOptions& opts) {
  check_parameter(xi0);
  check_parameter(eta0);
  ClosestPointSolution sol;
  sol.kind = ProjectionKind::bilateral;
  sol.xi = xi0;
  sol.eta = eta0;
  int clamped_in_a_row = 0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const OrthogonalityTerms t = orthogonality_terms(pair, sol.xi, sol.eta, false);
    const double s = scale_of(pair, (t.r1 - t.r2).norm());
    const double n1 = t.r1x.norm();
    const double n2 = t.r2e.norm();
    sol.iterations = it;
    if (std::abs(t.p1) <= opts.tol * n1 * s && std::abs(t.p2) <= opts.tol * n2 * s) {
      sol.status = ProjectionStatus::converged;
      break;
    }
    if (it == opts.max_iter) break;
    const double det = t.a.determinant();
    if (std::abs(det) <= 1e-12 * n1 * n1 * n2 * n2) {
      sol.status = ProjectionStatus::singular;
      return sol;
    }
    const Eigen::Vector2d step = -t.a.inverse() * Eigen::Vector2d(t.p1, t.p2);
    double xi = sol.xi + step[0];
    double eta = sol.eta + step[1];
    const bool c1 = clamp_unit(xi);
    const bool c2 = clamp_unit(eta);
    sol.xi = xi;
    sol.eta = eta;
    clamped_in_a_row = (c1 || c2) ? clamped_in_a_row + 1 : 0;
    if (clamped_in_a_row >= 2) {
      sol.status = ProjectionStatus::out_of_domain;
      break;
    }
  }
  finish(pair, sol);
  return sol;
}

namespace {

// Newton on p2 = 0 in eta with xi fixed.
void solve_eta(const ElementPair& pair, ClosestPointSolution& sol, const ProjectionOptions& opts) {
  int clamped_in_a_row = 0;
  sol.status = ProjectionStatus::unconverged;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const OrthogonalityTerms t = orthogonality_terms(pair, sol.xi, sol.eta, false);
    const double s = scale_of(pair, (t.r1 - t.r2).norm());
    const double n2 = t.r2e.norm();
    sol.iterations = it;
    if (std::abs(t.p2) <= opts.tol * n2 * s) {
      sol.status = ProjectionStatus::converged;
      return;
    }
    if (it == opts.max_iter) return;
    if (std::abs(t.a(1, 1)) <= 1e-14 * n2 * n2) {
      sol.status = ProjectionStatus::singular;
      return;
    }
    double eta = sol.eta - t.p2 / t.a(1, 1);
    const bool c = clamp_unit(eta);
    sol.eta = eta;
    clamped_in_a_row = c ? clamped_in_a_row + 1 : 0;
    if (clamped_in_a_row >= 2) {
      sol.status = ProjectionStatus::out_of_domain;
      return;
    }
  }
}

// Newton on p1 = 0 in xi with eta fixed.
void solve_xi(const ElementPair& pair, ClosestPointSolution& sol, const ProjectionOptions& opts) {
  int clamped_in_a_row = 0;
  sol.status = ProjectionStatus::unconverged;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const OrthogonalityTerms t = orthogonality_terms(pair, sol.xi, sol.eta, false);
    const double s = scale_of(pair, (t.r1 - t.r2).norm());
    const double n1 = t.r1x.norm();
    sol.iterations = it;
    if (std::abs(t.p1) <= opts.tol * n1 * s) {
      sol.status = ProjectionStatus::converged;
      return;
    }
    if (it == opts.max_iter) return;
    if (std::abs(t.a(0, 0)) <= 1e-14 * n1 * n1) {
      sol.status = ProjectionStatus::singular;
      return;
    }
    double xi = sol.xi - t.p1 / t.a(0, 0);
    const bool c = clamp_unit(xi);
    sol.xi = xi;
    clamped_in_a_row = c ? clamped_in_a_row + 1 : 0;
    if (clamped_in_a_row >= 2) {
      sol.status = ProjectionStatus::out_of_domain;
      return;
    }
  }
}

}  // namespace

ClosestPointSolution unilateral_cpp(const ElementPair& pair, double xi, double eta0, const ProjectionOptions& opts) {
  check_parameter(xi);
  check_parameter(eta0);
  ClosestPointSolution sol;
  sol.kind = ProjectionKind::unilateral;
  sol.xi = xi;
  sol.eta = eta0;
  solve_eta(pair, sol, opts);
  finish(pair, sol);
  return sol;
}

ClosestPointSolution endpoint_cpp(const ElementPair& pair, ProjectionKind kind, double xi_fixed, double eta_fixed,
                                  double start, const ProjectionOptions& opts) {
  ClosestPointSolution sol;
  sol.kind = kind;
  switch (kind) {
    case ProjectionKind::endpoint_slave:
      check_parameter(start);
      sol.xi = xi_fixed;
      sol.eta = start;
      solve_eta(pair, sol, opts);
      break;
    case ProjectionKind::endpoint_master:
      check_parameter(start);
      sol.xi = start;
      sol.eta = eta_fixed;
      solve_xi(pair, sol, opts);
      break;
    case ProjectionKind::endpoint_both:
      sol.xi = xi_fixed;
      sol.eta = eta_fixed;
      sol.status = ProjectionStatus::converged;
      break;
    default:
      throw DomainError("endpoint_cpp requires an endpoint kind");
  }
  finish(pair, sol);
  return sol;
}

ProjectionSensitivity cpp_sensitivities(const ElementPair& pair, const ClosestPointSolution& sol) {
  ProjectionSensitivity s;
  const OrthogonalityTerms t = orthogonality_terms(pair, sol.xi, sol.eta, true);
  switch (sol.kind) {
    case ProjectionKind::bilateral: {
      const double det = t.a.determinant();
      if (std::abs(det) <= 1e-12 * t.r1x.squaredNorm() * t.r2e.squaredNorm())
        throw SingularConfiguration("singular projection matrix in sensitivity evaluation");
      const Eigen::Matrix2d ai = t.a.inverse();
      s.dxi = -(ai(0, 0) * t.p1d + ai(0, 1) * t.p2d);
      s.deta = -(ai(1, 0) * t.p1d + ai(1, 1) * t.p2d);
      break;
    }
    case ProjectionKind::unilateral:
    case ProjectionKind::endpoint_slave:
      if (t.a(1, 1) == 0.0) throw SingularConfiguration("vanishing p2,eta");
      s.deta = -t.p2d / t.a(1, 1);
      if (sol.kind == ProjectionKind::unilateral) s.deta_dxi = -t.a(1, 0) / t.a(1, 1);
      break;
    case ProjectionKind::endpoint_master:
      if (t.a(0, 0) == 0.0) throw SingularConfiguration("vanishing p1,xi");
      s.dxi = -t.p1d / t.a(0, 0);
      break;
    case ProjectionKind::endpoint_both:
      break;
  }
  return s;
}

std::optional<BoundaryProjection> master_endpoint_projection(const ElementPair& pair, double eta_ep, double xi0,
                                                             const ProjectionOptions& opts) {
  check_parameter(xi0);
  if (eta_ep != -1.0 && eta_ep != 1.0) throw DomainError("master endpoint parameter must be -1 or +1");
  double xi = xi0;
  int clamped_in_a_row = 0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const OrthogonalityTerms t = orthogonality_terms(pair, xi, eta_ep, false);
    const double s = scale_of(pair, (t.r1 - t.r2).norm());
    const double n2 = t.r2e.norm();
    if (std::abs(t.p2) <= opts.tol * n2 * s) {
      const OrthogonalityTerms full = orthogonality_terms(pair, xi, eta_ep, true);
      BoundaryProjection b;
      b.eta_ep = eta_ep;
      b.xi_b = xi;
      b.dxi_b = -full.p2d / full.a(1, 0);
      b.iterations = it;
      return b;
    }
    if (it == opts.max_iter) return std::nullopt;
    if (std::abs(t.a(1, 0)) <= 1e-14 * n2 * t.r1x.norm()) return std::nullopt;
    xi -= t.p2 / t.a(1, 0);
    const bool c = clamp_unit(xi);
    clamped_in_a_row = c ? clamped_in_a_row + 1 : 0;
    if (clamped_in_a_row >= 2) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace abc_rods
