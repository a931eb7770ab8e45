#include "doctest.h"
#include "test_support.hpp"

#include <random>

using namespace abc_rods;
using testing::rel_error;

namespace {

ElementPair perpendicular_pair(double gap) {
  ElementPair p;
  p.radius1 = 0.01;
  p.radius2 = 0.01;
  p.first = ElementDofs::straight(Vec3(-1, 0, 0), Vec3(1, 0, 0));
  p.second = ElementDofs::straight(Vec3(0.2, -1, 0.02 + gap), Vec3(0.2, 1, 0.02 + gap));
  return p;
}

// Residual at perturbed dofs, re-projected with the same kind as sol.
Eigen::VectorXd residual_at(const ElementPair& base, const ClosestPointSolution& sol, const PenaltyLaw& law,
                            double weight, const Eigen::VectorXd& d) {
  ElementPair p = base;
  p.set_dofs(d);
  ClosestPointSolution s;
  const ProjectionOptions tight{1e-14, 50};
  switch (sol.kind) {
    case ProjectionKind::bilateral: s = bilateral_cpp(p, sol.xi, sol.eta, tight); break;
    case ProjectionKind::endpoint_slave: s = endpoint_cpp(p, sol.kind, sol.xi, 0.0, sol.eta, tight); break;
    case ProjectionKind::endpoint_master: s = endpoint_cpp(p, sol.kind, 0.0, sol.eta, sol.xi, tight); break;
    default: s = endpoint_cpp(p, sol.kind, sol.xi, sol.eta, 0.0, tight); break;
  }
  return point_contact(p, s, law, weight, false).residual;
}

}  // namespace

TEST_CASE("perpendicular beams, linear law: force 100 along n split by shape values") {
  const auto p = perpendicular_pair(-1e-3);
  const auto sol = bilateral_cpp(p, 0.0, 0.0);
  REQUIRE(sol.converged());
  const auto law = PenaltyLaw::linear(1e5);
  const auto [r1, r2] = point_residual(p, sol, law, 1.0);
  const auto s = shape_values(sol.xi, 0);
  // n points from beam 2 (above) to beam 1, i.e. -z; r1 = -f N1^T n.
  CHECK(sol.normal.z() == doctest::Approx(-1.0));
  CHECK(r1[2] == doctest::Approx(100.0 * s.n1d));
  CHECK(r1[8] == doctest::Approx(100.0 * s.n2d));
  CHECK((r1.segment<3>(0) + r1.segment<3>(6)).norm() == doctest::Approx(100.0));
  CHECK((r1 + r2).segment<3>(0).norm() + (r1 + r2).segment<3>(6).norm() > 0.0);
  Vec24 r;
  r << r1, r2;
  CHECK(std::abs(testing::translation_vector(4, Vec3::UnitZ()).dot(r)) < 1e-12 * r.norm());
}

TEST_CASE("inactive and zero-weight contributions vanish") {
  const auto p = perpendicular_pair(1e-3);
  const auto sol = bilateral_cpp(p, 0.0, 0.0);
  const auto st = point_contact(p, sol, PenaltyLaw::linear(1e5), 1.0);
  CHECK(!st.active);
  CHECK(st.residual.norm() == 0.0);
  const auto p2 = perpendicular_pair(-1e-3);
  const auto sol2 = bilateral_cpp(p2, 0.0, 0.0);
  CHECK(point_stiffness(p2, sol2, PenaltyLaw::linear(1e5), 0.0).norm() == 0.0);
}

TEST_CASE("point stiffness matches finite differences and is symmetric for the linear law") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const auto cfg = testing::make_config(testing::ConfigType::point, rng);
    const auto sol = bilateral_cpp(cfg.pair, cfg.request.xi0, cfg.request.eta0);
    REQUIRE(sol.converged());
    for (const auto& law : {PenaltyLaw::linear(1e3), PenaltyLaw::quadratic(1e3, 0.004)}) {
      const Mat24 k = point_stiffness(cfg.pair, sol, law, 0.7);
      auto f = [&](const Eigen::VectorXd& d) { return residual_at(cfg.pair, sol, law, 0.7, d); };
      CHECK(rel_error(k, testing::fd_jacobian(f, cfg.pair.dofs(), 1e-7)) < 1e-6);
      if (law.variant == PenaltyVariant::linear) CHECK((k - k.transpose()).norm() <= 1e-8 * k.norm());
    }
  }
}

TEST_CASE("endpoint stiffness matches finite differences, net force and torque vanish") {
  std::mt19937 rng(47);
  const std::pair<testing::ConfigType, ProjectionKind> cases[] = {
      {testing::ConfigType::endpoint_slave, ProjectionKind::endpoint_slave},
      {testing::ConfigType::endpoint_master, ProjectionKind::endpoint_master},
      {testing::ConfigType::endpoint_both, ProjectionKind::endpoint_both}};
  const auto law = PenaltyLaw::quadratic(1e3, 0.004);
  for (const auto& [type, kind] : cases) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto cfg = testing::make_config(type, rng);
      const auto ev = evaluate_pair(cfg.pair, cfg.ends, cfg.settings, cfg.request, true);
      REQUIRE(ev.point_solution.has_value());
      const auto sol = *ev.point_solution;
      CHECK(sol.kind == kind);
      const auto st = endpoint_residual_stiffness(cfg.pair, sol, law, 1.0);
      REQUIRE(st.active);
      auto f = [&](const Eigen::VectorXd& d) { return residual_at(cfg.pair, sol, law, 1.0, d); };
      CHECK(rel_error(st.stiffness, testing::fd_jacobian(f, cfg.pair.dofs(), 1e-7)) < 1e-6);
      const Vec24 d = cfg.pair.dofs();
      for (const Vec3& dir : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}) {
        const Eigen::VectorXd ut = testing::translation_vector(4, dir);
        const Eigen::VectorXd ur = testing::rotation_vector(d, dir);
        CHECK(std::abs(ut.dot(st.residual)) <= 1e-12 * st.residual.norm());
        CHECK(std::abs(ur.dot(st.residual)) <= 1e-12 * st.residual.norm() * ur.norm());
      }
    }
  }
}

TEST_CASE("endpoint force fades continuously as the slave end slides off") {
  // Slave end sliding along -x away from a master beam along y, regularized law.
  const auto law = PenaltyLaw::quadratic(1e4, 0.002);
  double previous = -1.0;
  for (double x = 0.0; x <= 0.03; x += 0.0005) {
    ElementPair p;
    p.radius1 = p.radius2 = 0.01;
    p.first = ElementDofs::straight(Vec3(-1 - x, 0, 0), Vec3(-x, 0, 0));
    p.second = ElementDofs::straight(Vec3(0.005, -1, 0.015), Vec3(0.005, 1, 0.015));
    const auto s = endpoint_cpp(p, ProjectionKind::endpoint_slave, 1.0, 0.0, 0.0);
    const double f = point_contact(p, s, law, 1.0, false).residual.norm();
    if (previous >= 0.0) {
      CHECK(f <= previous + 1e-12);
      CHECK(previous - f < 3.0 * law.epsilon * 0.0005);
    }
    previous = f;
  }
  CHECK(previous == 0.0);
}

TEST_CASE("unconverged projection is rejected") {
  ClosestPointSolution s;
  s.status = ProjectionStatus::unconverged;
  CHECK_THROWS_AS(point_contact(perpendicular_pair(0.0), s, PenaltyLaw::linear(1.0), 1.0), ContactEvaluationError);
}
