#include "test_support.hpp"

#include <cmath>

namespace abc_rods::testing {

namespace {

double uniform(std::mt19937& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 t = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return v.cross(t).normalized();
}

void add_fiber(FiberScene& scene, const Vec3& start, const Vec3& dir, const Vec3& bend_dir, double bend,
               int n_elements, double length, int& next_node) {
  auto point = [&](double s) { return Vec3(start + s * dir + bend * std::sin(kPi * s / length) * bend_dir); };
  auto tangent = [&](double s) { return Vec3(dir + bend * kPi / length * std::cos(kPi * s / length) * bend_dir); };
  const double l0 = length / n_elements;
  const int first = next_node;
  for (int e = 0; e < n_elements; ++e) {
    const double s0 = e * l0;
    SearchElement el;
    el.id = static_cast<int>(scene.elements.size());
    el.radius = scene.radius;
    el.dofs = ElementDofs::from_nodes({point(s0), tangent(s0)}, {point(s0 + l0), tangent(s0 + l0)}, l0, s0);
    el.nodes = {first + e, first + e + 1};
    scene.elements.push_back(el);
  }
  next_node = first + n_elements + 1;
}

}  // namespace

FiberScene random_scene(int n_fibers, int n_elements, double box, double length, double radius, std::mt19937& rng) {
  FiberScene scene;
  scene.radius = radius;
  int next_node = 0;
  for (int f = 0; f < n_fibers; ++f) {
    const Vec3 start(uniform(rng, 0.0, box), uniform(rng, 0.0, box), uniform(rng, 0.0, box));
    const Vec3 dir = random_unit(rng);
    const Vec3 bend_dir = any_perpendicular(dir);
    const double bend = uniform(rng, 0.0, 0.05) * length;
    add_fiber(scene, start, dir, bend_dir, bend, n_elements, length, next_node);
    if (f % 2 == 0) {
      // Nearly parallel partner touching the first fiber.
      const Vec3 off = bend_dir.cross(dir).normalized();
      const double gap = uniform(rng, -0.3, 0.1) * radius;
      const double tilt = deg_to_rad(uniform(rng, 0.0, 4.0));
      const Vec3 dir2 = (std::cos(tilt) * dir + std::sin(tilt) * off).normalized();
      const Vec3 start2 = start + (2.0 * radius + gap) * off - 0.5 * length * std::sin(tilt) * off +
                          uniform(rng, -0.3, 0.3) * length * dir;
      add_fiber(scene, start2, dir2, bend_dir, bend, n_elements, length, next_node);
      ++f;
    }
  }
  return scene;
}

long exhaustive_pair_count(const std::vector<SearchElement>& elements) {
  long n = 0;
  for (size_t i = 0; i < elements.size(); ++i)
    for (size_t j = i + 1; j < elements.size(); ++j) {
      const auto& a = elements[i].nodes;
      const auto& b = elements[j].nodes;
      if (a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1]) continue;
      ++n;
    }
  return n;
}

std::vector<ExhaustiveContact> exhaustive_contacts(const std::vector<SearchElement>& elements, double support,
                                                   double alpha1, double alpha2) {
  std::vector<ExhaustiveContact> out;
  for (size_t i = 0; i < elements.size(); ++i) {
    for (size_t j = i + 1; j < elements.size(); ++j) {
      const auto& a = elements[i].nodes;
      const auto& b = elements[j].nodes;
      if (a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1]) continue;
      ElementPair pair{elements[i].dofs, elements[j].dofs, elements[i].radius, elements[j].radius};
      // Cheap reject on the node spheres.
      const double reach = 0.6 * (pair.first.node_position(1) - pair.first.node_position(0)).norm() +
                           0.6 * (pair.second.node_position(1) - pair.second.node_position(0)).norm() +
                           pair.radius1 + pair.radius2 + support;
      const Vec3 m1 = 0.5 * (pair.first.node_position(0) + pair.first.node_position(1));
      const Vec3 m2 = 0.5 * (pair.second.node_position(0) + pair.second.node_position(1));
      if ((m1 - m2).norm() > reach) continue;
      ExhaustiveContact c{static_cast<int>(i), static_cast<int>(j), false, false};
      for (double x0 : {-0.6, 0.0, 0.6})
        for (double e0 : {-0.6, 0.0, 0.6}) {
          const auto sol = bilateral_cpp(pair, x0, e0, {});
          if (sol.status == ProjectionStatus::converged && sol.gap < support && sol.alpha_deg > alpha1)
            c.point = true;
        }
      for (int k = 0; k <= 20; ++k) {
        const double xi = -1.0 + 0.1 * k;
        for (double e0 : {-0.5, 0.5}) {
          ClosestPointSolution sol;
          try {
            sol = unilateral_cpp(pair, xi, e0, {});
          } catch (const std::exception&) {
            continue;
          }
          if (sol.status == ProjectionStatus::converged && sol.gap < support && sol.alpha_deg < alpha2)
            c.line = true;
        }
      }
      if (c.point || c.line) out.push_back(c);
    }
  }
  return out;
}

}  // namespace abc_rods::testing
