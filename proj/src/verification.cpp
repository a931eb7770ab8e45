#include "abc_rods/verification.hpp"

#include "abc_rods/solver.hpp"

#include <cmath>

namespace abc_rods::verification {

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (int k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h) {
  Eigen::VectorXd g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& reference) {
  const double n = reference.norm();
  return (a - reference).norm() / (n > 0.0 ? n : 1.0);
}

Eigen::VectorXd translation_vector(int n_nodes, const Vec3& direction) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(6 * n_nodes);
  for (int i = 0; i < n_nodes; ++i) u.segment<3>(6 * i) = direction;
  return u;
}

Eigen::VectorXd rotation_vector(const Eigen::VectorXd& dofs, const Vec3& axis) {
  Eigen::VectorXd u(dofs.size());
  for (int i = 0; i < dofs.size() / 3; ++i) u.segment<3>(3 * i) = axis.cross(Vec3(dofs.segment<3>(3 * i)));
  return u;
}

namespace {

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

double uniform(std::mt19937& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Vec3 in_plane(double angle_deg) {
  const double a = deg_to_rad(angle_deg);
  return Vec3(std::cos(a), std::sin(a), 0.0);
}

// Rotates the whole configuration rigidly to avoid axis-aligned special cases.
void rigid_rotate(ElementPair& pair, std::mt19937& rng) {
  const Mat3 q = Eigen::AngleAxisd(uniform(rng, 0.0, 2.0 * kPi), random_unit(rng)).toRotationMatrix();
  const Vec3 shift = 0.3 * random_unit(rng);
  for (ElementDofs* e : {&pair.first, &pair.second}) {
    for (int node = 0; node < 2; ++node) {
      e->d.segment<3>(6 * node) = q * e->d.segment<3>(6 * node) + shift;
      e->d.segment<3>(6 * node + 3) = q * e->d.segment<3>(6 * node + 3);
    }
  }
}

}  // namespace

const char* to_string(ConfigType t) {
  switch (t) {
    case ConfigType::point: return "point";
    case ConfigType::line_fixed: return "line_fixed";
    case ConfigType::line_projected: return "line_projected";
    case ConfigType::endpoint_slave: return "endpoint_slave";
    case ConfigType::endpoint_master: return "endpoint_master";
    case ConfigType::endpoint_both: return "endpoint_both";
    case ConfigType::transition: return "transition";
  }
  return "unknown";
}

ElementDofs perturbed_element(const Vec3& center, const Vec3& direction, double length, double noise,
                              std::mt19937& rng) {
  const Vec3 u = direction.normalized();
  NodalDof a{center - 0.5 * length * u + noise * 0.01 * length * random_unit(rng), u + noise * random_unit(rng)};
  NodalDof b{center + 0.5 * length * u + noise * 0.01 * length * random_unit(rng), u + noise * random_unit(rng)};
  return ElementDofs::from_nodes(a, b, length * uniform(rng, 0.97, 1.03));
}

PairConfig make_config(ConfigType type, std::mt19937& rng) {
  PairConfig c;
  c.type = type;
  const double r = 0.02;
  c.pair.radius1 = r;
  c.pair.radius2 = r;
  c.settings.law_variant = PenaltyVariant::quad_regularized;
  c.settings.g_bar = 0.2 * r;
  c.settings.transition.alpha1 = 10.0;
  c.settings.transition.alpha2 = 15.0;
  c.settings.transition.eps_perp = 1.0e3;
  c.settings.transition.eps_par = 4.0e4;
  c.settings.n_ii = 4;
  c.settings.n_gr = 5;
  const double noise = 0.02;
  const double gap = uniform(rng, -0.6, -0.1) * r;
  const double d0 = 2.0 * r + gap;
  switch (type) {
    case ConfigType::point: {
      const double angle = uniform(rng, 35.0, 90.0);
      c.pair.first = perturbed_element(Vec3::Zero(), Vec3::UnitX(), 1.0, noise, rng);
      c.pair.second = perturbed_element(Vec3(uniform(rng, -0.2, 0.2), 0.0, d0), in_plane(angle), 1.0, noise, rng);
      c.request.line = false;
      break;
    }
    case ConfigType::line_fixed:
    case ConfigType::line_projected: {
      const double angle = uniform(rng, 1.0, 6.0);
      c.pair.first = perturbed_element(Vec3::Zero(), Vec3::UnitX(), 1.0, 0.2 * noise, rng);
      if (type == ConfigType::line_fixed) {
        c.pair.second = perturbed_element(Vec3(0.0, 0.0, d0), in_plane(angle), 1.2, 0.2 * noise, rng);
      } else {
        // Master end at eta = -1 lies inside the slave span.
        const double x0 = uniform(rng, -0.2, 0.2);
        c.pair.second =
            perturbed_element(Vec3(x0 + 0.4, 0.0, d0), in_plane(angle), 0.8, 0.2 * noise, rng);
        c.ends.master = {true, true};
      }
      c.request.point = false;
      break;
    }
    case ConfigType::endpoint_slave: {
      const double angle = uniform(rng, 50.0, 90.0);
      c.pair.first = perturbed_element(Vec3(-0.5, 0.0, 0.0), Vec3::UnitX(), 1.0, noise, rng);
      c.pair.second = perturbed_element(Vec3(0.25 * d0, 0.0, 0.9 * d0), in_plane(angle), 1.0, noise, rng);
      c.ends.slave = {true, true};
      c.request.line = false;
      c.request.xi0 = 0.9;
      break;
    }
    case ConfigType::endpoint_master: {
      const double angle = uniform(rng, 50.0, 90.0);
      c.pair.first = perturbed_element(Vec3::Zero(), Vec3::UnitX(), 1.0, noise, rng);
      const Vec3 u = in_plane(angle);
      c.pair.second = perturbed_element(Vec3(0.0, 0.0, 0.9 * d0) + (0.5 + 0.25 * d0) * u, u, 1.0, noise, rng);
      c.ends.master = {true, true};
      c.request.line = false;
      c.request.eta0 = -0.9;
      break;
    }
    case ConfigType::endpoint_both: {
      const double angle = uniform(rng, 50.0, 90.0);
      c.pair.first = perturbed_element(Vec3(-0.5, 0.0, 0.0), Vec3::UnitX(), 1.0, noise, rng);
      const Vec3 u = in_plane(angle);
      c.pair.second = perturbed_element(Vec3(0.2 * d0, 0.0, 0.7 * d0) + (0.5 + 0.2 * d0) * u, u, 1.0, noise, rng);
      c.ends.slave = {true, true};
      c.ends.master = {true, true};
      c.request.line = false;
      c.request.xi0 = 0.9;
      c.request.eta0 = -0.9;
      break;
    }
    case ConfigType::transition: {
      const double angle = uniform(rng, 11.0, 14.0);
      c.pair.first = perturbed_element(Vec3::Zero(), Vec3::UnitX(), 1.0, 0.2 * noise, rng);
      c.pair.second = perturbed_element(Vec3(0.0, 0.0, d0), in_plane(angle), 1.0, 0.2 * noise, rng);
      break;
    }
  }
  rigid_rotate(c.pair, rng);
  // Start values from a converged projection at the base state.
  if (c.request.point) {
    const auto sol = bilateral_cpp(c.pair, c.request.xi0, c.request.eta0);
    if (sol.status != ProjectionStatus::singular) {
      c.request.xi0 = sol.xi;
      c.request.eta0 = sol.eta;
    }
  }
  return c;
}

PairEvaluation evaluate_at(const PairConfig& cfg, const Vec24& d, bool with_stiffness) {
  ElementPair p = cfg.pair;
  p.set_dofs(d);
  return evaluate_pair(p, cfg.ends, cfg.settings, cfg.request, with_stiffness);
}

PairCheck check_pair(const PairConfig& cfg, double h) {
  PairCheck out;
  out.type = cfg.type;
  out.variant = cfg.settings.transition.variant;
  const PairEvaluation ev = evaluate_pair(cfg.pair, cfg.ends, cfg.settings, cfg.request, true);
  out.active = ev.n_point + ev.n_line_gp + ev.n_endpoint + ev.n_fallback > 0;
  const Vec24 d = cfg.pair.dofs();
  auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return evaluate_at(cfg, x, false).residual; };
  auto potential = [&](const Eigen::VectorXd& x) { return evaluate_at(cfg, x, false).potential; };
  out.stiffness_error = rel_error(ev.stiffness, fd_jacobian(residual, d, h));
  out.gradient_error = rel_error(ev.residual, fd_gradient(potential, d, h));
  const double rn = ev.residual.norm();
  const Vec3 axes[] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (const Vec3& dir : axes) {
    const Eigen::VectorXd ut = translation_vector(4, dir);
    const Eigen::VectorXd ur = rotation_vector(d, dir);
    out.contraction_error = std::max(out.contraction_error, std::abs(ev.residual.dot(ut)) / (rn * ut.norm()));
    out.contraction_error = std::max(out.contraction_error, std::abs(ev.residual.dot(ur)) / (rn * ur.norm()));
  }
  return out;
}

std::vector<PairCheck> pair_suite(int n_configs, unsigned seed) {
  std::mt19937 rng(seed);
  const ConfigType types[] = {ConfigType::point,          ConfigType::line_fixed,      ConfigType::line_projected,
                              ConfigType::endpoint_slave, ConfigType::endpoint_master, ConfigType::endpoint_both,
                              ConfigType::transition,     ConfigType::transition};
  std::vector<PairCheck> out;
  for (int i = 0; i < n_configs; ++i) {
    PairConfig cfg = make_config(types[i % 8], rng);
    cfg.settings.transition.variant =
        (i / 8) % 2 == 0 ? TransitionVariant::force_based : TransitionVariant::potential_based;
    out.push_back(check_pair(cfg));
  }
  return out;
}

AssemblyCheck check_assembly(Simulation& sim, const Eigen::VectorXd& d, double t, double h) {
  AssemblyCheck out;
  const Assembly a = sim.assemble(d, t, true);
  out.residual_norm = a.forces().norm();
  out.active_units = a.contact.n_point + a.contact.n_line_gp + a.contact.n_endpoint + a.contact.n_fallback;
  auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return sim.assemble(x, t, false).forces(); };
  out.stiffness_error = rel_error(Eigen::MatrixXd(a.k), fd_jacobian(residual, d, h));
  return out;
}

}  // namespace abc_rods::verification
