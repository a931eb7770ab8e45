#include "abc_rods/abc.hpp"

#include <algorithm>
#include <cmath>

namespace abc_rods {

const char* to_string(TransitionVariant v) {
  return v == TransitionVariant::force_based ? "force_based" : "potential_based";
}

const char* to_string(ContactMode m) {
  switch (m) {
    case ContactMode::abc: return "abc";
    case ContactMode::point_only: return "point_only";
    case ContactMode::line_only: return "line_only";
  }
  return "unknown";
}

double TransitionConfig::z1() const { return std::cos(deg_to_rad(alpha1)); }
double TransitionConfig::z2() const { return std::cos(deg_to_rad(alpha2)); }

void TransitionConfig::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 <= 90.0))
    throw InputError("shifting angles must satisfy 0 < alpha1 < alpha2 <= 90");
  if (!(eps_perp > 0.0) || !(eps_par > 0.0)) throw InputError("penalty parameters must be positive");
}

namespace {

double band_phase(double z, const TransitionConfig& cfg) { return kPi * (z - cfg.z2()) / (cfg.z1() - cfg.z2()); }

}  // namespace

double transition_factor(double z, const TransitionConfig& cfg) {
  if (z >= cfg.z1()) return 1.0;
  if (z <= cfg.z2()) return 0.0;
  return 0.5 * (1.0 - std::cos(band_phase(z, cfg)));
}

double transition_factor_dz(double z, const TransitionConfig& cfg) {
  if (z >= cfg.z1() || z <= cfg.z2()) return 0.0;
  return 0.5 * kPi / (cfg.z1() - cfg.z2()) * std::sin(band_phase(z, cfg));
}

double transition_factor_dzz(double z, const TransitionConfig& cfg) {
  if (z >= cfg.z1() || z <= cfg.z2()) return 0.0;
  const double c = kPi / (cfg.z1() - cfg.z2());
  return 0.5 * c * c * std::cos(band_phase(z, cfg));
}

TransitionWeight unit_weight(UnitClass cls, double z, const TransitionConfig& cfg, ContactMode mode) {
  TransitionWeight w;
  if (mode == ContactMode::point_only) {
    w.a = cls == UnitClass::point ? 1.0 : 0.0;
    return w;
  }
  if (mode == ContactMode::line_only) {
    w.a = cls == UnitClass::line ? 1.0 : 0.0;
    return w;
  }
  const double k = transition_factor(z, cfg);
  const double dk = transition_factor_dz(z, cfg);
  const double ddk = transition_factor_dzz(z, cfg);
  const double sign = cls == UnitClass::point ? -1.0 : 1.0;
  if (cfg.variant == TransitionVariant::force_based) {
    w.a = cls == UnitClass::point ? 1.0 - k : k;
    w.da = sign * dk;
    w.dda = sign * ddk;
  } else {
    w.a = cls == UnitClass::point ? 1.0 - k * k : k * k;
    w.da = sign * 2.0 * k * dk;
    w.dda = sign * 2.0 * (dk * dk + k * ddk);
  }
  return w;
}

Row24 delta_z_row(const ElementPair& pair, const UnitGeometry& geo) {
  const Vec3 t1 = interpolate(pair.first, geo.xi, 1);
  const Vec3 t2 = interpolate(pair.second, geo.eta, 1);
  const double n1 = t1.norm();
  const double n2 = t2.norm();
  if (n1 < 1e-300 || n2 < 1e-300) throw SingularConfiguration("zero tangent in contact angle derivative");
  const Vec3 e1 = t1 / n1;
  const Vec3 e2 = t2 / n2;
  const double s = e1.dot(e2) < 0.0 ? -1.0 : 1.0;
  const Vec3 v1 = (e2 - e1 * e1.dot(e2)) / n1;
  const Vec3 v2 = (e1 - e2 * e2.dot(e1)) / n2;
  const Vec3 t1x = interpolate(pair.first, geo.xi, 2);
  const Vec3 t2e = interpolate(pair.second, geo.eta, 2);
  const auto c1 = shape_coefficients(geo.xi, 1, pair.first.l0);
  const auto c2 = shape_coefficients(geo.eta, 1, pair.second.l0);
  Row24 dz = Row24::Zero();
  for (int i = 0; i < 4; ++i) {
    dz.segment<3>(3 * i) = c1[i] * v1.transpose();
    dz.segment<3>(12 + 3 * i) = c2[i] * v2.transpose();
  }
  dz += v1.dot(t1x) * geo.dxi + v2.dot(t2e) * geo.deta;
  return s * dz;
}

Row24 delta_z_row(const ElementPair& pair, const ClosestPointSolution& sol) {
  return delta_z_row(pair, point_geometry(pair, sol));
}

Mat24 delta_z_jacobian_fd(const ElementPair& pair, const UnitLocator& locate) {
  const Vec24 d0 = pair.dofs();
  const double lref = std::min(pair.first.l0, pair.second.l0);
  Mat24 z = Mat24::Zero();
  ElementPair p = pair;
  for (int k = 0; k < 24; ++k) {
    const bool tangent = (k % 6) >= 3;
    const double h = 1e-6 * std::max(tangent ? 1.0 : lref, std::abs(d0[k]));
    Vec24 d = d0;
    d[k] += h;
    p.set_dofs(d);
    const auto gp = locate(p);
    d[k] -= 2.0 * h;
    p.set_dofs(d);
    const auto gm = locate(p);
    ElementPair pp = pair;
    if (gp && gm) {
      pp.set_dofs(d0 + h * Vec24::Unit(k));
      const Row24 zp = delta_z_row(pp, *gp);
      pp.set_dofs(d0 - h * Vec24::Unit(k));
      const Row24 zm = delta_z_row(pp, *gm);
      z.col(k) = (zp - zm).transpose() / (2.0 * h);
      continue;
    }
    // A unit at the edge of its validity range: one-sided difference, or no
    // contribution if it is lost on both sides (the residual is unaffected).
    if (!gp && !gm) continue;
    const auto g0 = locate(pair);
    if (!g0) throw ContactEvaluationError("contact unit lost during finite-difference re-projection");
    const Row24 z0 = delta_z_row(pair, *g0);
    const double sign = gp ? 1.0 : -1.0;
    pp.set_dofs(d0 + sign * h * Vec24::Unit(k));
    const Row24 z1 = delta_z_row(pp, gp ? *gp : *gm);
    z.col(k) = sign * (z1 - z0).transpose() / h;
  }
  return 0.5 * (z + z.transpose());
}

UnitContribution combine_unit(const ElementPair& pair, const UnitGeometry& geo, const PenaltyLaw& law, UnitClass cls,
                              const TransitionConfig& cfg, ContactMode mode, const UnitLocator& relocate,
                              bool with_stiffness) {
  UnitContribution u;
  u.z = contact_angle(interpolate(pair.first, geo.xi, 1), interpolate(pair.second, geo.eta, 1)).z;
  u.weight = unit_weight(cls, u.z, cfg, mode);
  if (u.weight.a == 0.0 && u.weight.da == 0.0) return u;
  u.kernel = contact_kernel(pair, geo, law, with_stiffness);
  if (!u.kernel.active) return u;
  u.active = true;
  const double a = u.weight.a;
  const double da = u.weight.da;
  const double c = geo.scale;
  const double pi = u.kernel.potential;
  u.potential = c * a * pi;
  u.residual = a * u.kernel.residual;
  if (with_stiffness) u.stiffness = a * u.kernel.stiffness;
  if (da == 0.0) return u;
  const Row24 dz = delta_z_row(pair, geo);
  if (with_stiffness) u.stiffness += u.kernel.residual * (da * dz);
  if (cfg.variant == TransitionVariant::potential_based && mode == ContactMode::abc) {
    u.residual += c * pi * da * dz.transpose();
    if (with_stiffness) {
      u.stiffness += da * pi * dz.transpose() * geo.dscale;
      u.stiffness += c * da * (-u.kernel.force) * dz.transpose() * u.kernel.dgap;
      u.stiffness += c * pi * u.weight.dda * dz.transpose() * dz;
      if (!relocate) throw ContactEvaluationError("potential-based stiffness requires a unit locator");
      u.stiffness += c * pi * da * delta_z_jacobian_fd(pair, relocate);
    }
  }
  return u;
}

PenaltyLaw ContactSettings::point_law() const {
  return law_variant == PenaltyVariant::linear ? PenaltyLaw::linear(transition.eps_perp)
                                               : PenaltyLaw::quadratic(transition.eps_perp, g_bar);
}

PenaltyLaw ContactSettings::line_law() const {
  return law_variant == PenaltyVariant::linear ? PenaltyLaw::linear(transition.eps_par)
                                               : PenaltyLaw::quadratic(transition.eps_par, g_bar);
}

void ContactSettings::validate() const {
  transition.validate();
  point_law();
  line_law();
  if (n_ii < 1 || n_gr < 1) throw InputError("contact integration counts must be positive");
}

namespace {

struct PointUnit {
  UnitGeometry geo;
  UnitLocator locate;
  UnitKind kind = UnitKind::point;
  ClosestPointSolution solution;
};

UnitLocator projection_locator(const ClosestPointSolution& sol, const ProjectionOptions& opts) {
  return [sol, opts](const ElementPair& p) -> std::optional<UnitGeometry> {
    ClosestPointSolution s;
    if (sol.kind == ProjectionKind::bilateral)
      s = bilateral_cpp(p, sol.xi, sol.eta, opts);
    else if (sol.kind == ProjectionKind::endpoint_slave)
      s = endpoint_cpp(p, sol.kind, sol.xi, 0.0, sol.eta, opts);
    else if (sol.kind == ProjectionKind::endpoint_master)
      s = endpoint_cpp(p, sol.kind, 0.0, sol.eta, sol.xi, opts);
    else
      s = endpoint_cpp(p, sol.kind, sol.xi, sol.eta, 0.0, opts);
    if (!s.converged()) return std::nullopt;
    return point_geometry(p, s);
  };
}

// Fixed-xi estimate used when the bilateral projection fails.
UnitLocator fallback_locator(double xi, double eta, const ProjectionOptions& opts) {
  return [xi, eta, opts](const ElementPair& p) -> std::optional<UnitGeometry> {
    ClosestPointSolution s = endpoint_cpp(p, ProjectionKind::endpoint_slave, xi, 0.0, eta, opts);
    if (!s.converged()) return std::nullopt;
    return point_geometry(p, s);
  };
}

std::optional<PointUnit> make_projection_unit(const ElementPair& pair, const ClosestPointSolution& sol,
                                              const ProjectionOptions& opts) {
  if (!sol.converged()) return std::nullopt;
  PointUnit u;
  u.solution = sol;
  u.geo = point_geometry(pair, sol);
  u.locate = projection_locator(sol, opts);
  u.kind = sol.kind == ProjectionKind::bilateral ? UnitKind::point : UnitKind::endpoint;
  return u;
}

std::optional<PointUnit> classify_endpoint(const ElementPair& pair, const PairEnds& ends,
                                           const ClosestPointSolution& out, const ProjectionOptions& opts) {
  const bool xi_out = std::abs(out.xi) == 1.0;
  const bool eta_out = std::abs(out.eta) == 1.0;
  const int xi_end = out.xi > 0.0 ? 1 : 0;
  const int eta_end = out.eta > 0.0 ? 1 : 0;
  auto both = [&](double xi, double eta) {
    return make_projection_unit(pair, endpoint_cpp(pair, ProjectionKind::endpoint_both, xi, eta, 0.0, opts), opts);
  };
  if (xi_out && ends.slave[xi_end]) {
    const auto s = endpoint_cpp(pair, ProjectionKind::endpoint_slave, out.xi, 0.0, out.eta, opts);
    if (s.converged()) return make_projection_unit(pair, s, opts);
    if (s.status == ProjectionStatus::out_of_domain) {
      const int e = s.eta > 0.0 ? 1 : 0;
      if (ends.master[e]) return both(out.xi, s.eta);
    }
    return std::nullopt;
  }
  if (eta_out && ends.master[eta_end]) {
    const auto s = endpoint_cpp(pair, ProjectionKind::endpoint_master, 0.0, out.eta, out.xi, opts);
    if (s.converged()) return make_projection_unit(pair, s, opts);
    if (s.status == ProjectionStatus::out_of_domain) {
      const int e = s.xi > 0.0 ? 1 : 0;
      if (ends.slave[e]) return both(s.xi, out.eta);
    }
  }
  return std::nullopt;
}

std::optional<PointUnit> fallback_unit(const ElementPair& pair, const ContactSettings& settings) {
  const IntegrationScheme scheme = build_scheme(settings.n_ii, settings.n_gr, {});
  std::optional<ClosestPointSolution> best;
  for (int i = 0; i < static_cast<int>(scheme.intervals.size()); ++i) {
    for (int j = 0; j < scheme.rule.size(); ++j) {
      const double xi = scheme.gauss_coordinate(i, j);
      const auto s = unilateral_cpp(pair, xi, chord_start(pair, xi), settings.cpp);
      if (!s.converged()) continue;
      if (!best || s.gap < best->gap) best = s;
    }
  }
  if (!best) return std::nullopt;
  ClosestPointSolution s = *best;
  s.kind = ProjectionKind::endpoint_slave;
  PointUnit u;
  u.solution = s;
  u.geo = point_geometry(pair, s);
  u.locate = fallback_locator(s.xi, s.eta, settings.cpp);
  u.kind = UnitKind::fallback;
  return u;
}

void record(PairEvaluation& ev, const UnitContribution& u, UnitKind kind, double scale, bool with_stiffness) {
  if (!u.active || (u.weight.a == 0.0 && u.weight.da == 0.0)) return;
  ev.residual += u.residual;
  if (with_stiffness) ev.stiffness += u.stiffness;
  ev.potential += u.potential;
  ev.min_gap = std::min(ev.min_gap, u.kernel.gap);
  const double alpha = rad_to_deg(std::acos(std::min(1.0, u.z)));
  ev.alpha_min = std::min(ev.alpha_min, alpha);
  ev.alpha_max = std::max(ev.alpha_max, alpha);
  switch (kind) {
    case UnitKind::point: ++ev.n_point; break;
    case UnitKind::endpoint: ++ev.n_endpoint; break;
    case UnitKind::line_gp: ++ev.n_line_gp; break;
    case UnitKind::fallback: ++ev.n_point; break;
  }
  ForceRecord f;
  f.position = u.kernel.r1;
  f.kind = kind;
  f.force = scale * u.weight.a * u.kernel.force * u.kernel.normal;
  ev.forces.push_back(f);
}

void add_point_unit(PairEvaluation& ev, const ElementPair& pair, const PointUnit& pu, const ContactSettings& settings,
                    bool with_stiffness) {
  const UnitContribution u = combine_unit(pair, pu.geo, settings.point_law(), UnitClass::point, settings.transition,
                                          settings.mode, pu.locate, with_stiffness);
  record(ev, u, pu.kind, 1.0, with_stiffness);
}

void add_line_units(PairEvaluation& ev, const ElementPair& pair, const IntegrationScheme& scheme,
                    const ContactSettings& settings, bool with_stiffness) {
  const PenaltyLaw law = settings.line_law();
  const ProjectionOptions opts = settings.cpp;
  for (int i = 0; i < static_cast<int>(scheme.intervals.size()); ++i) {
    for (int j = 0; j < scheme.rule.size(); ++j) {
      const double xi = scheme.gauss_coordinate(i, j);
      const LineGaussPoint gp = locate_gauss_point(pair, scheme, i, j, chord_start(pair, xi), opts);
      if (!gp.valid || !law.active(gp.solution.gap)) continue;
      const double eta = gp.solution.eta;
      UnitLocator locate = [&scheme, i, j, eta, opts](const ElementPair& p) -> std::optional<UnitGeometry> {
        const IntegrationScheme s = reevaluate_scheme(p, scheme, opts);
        const LineGaussPoint g = locate_gauss_point(p, s, i, j, eta, opts);
        if (!g.valid) return std::nullopt;
        return g.geometry;
      };
      const UnitContribution u = combine_unit(pair, gp.geometry, law, UnitClass::line, settings.transition,
                                              settings.mode, locate, with_stiffness);
      record(ev, u, UnitKind::line_gp, gp.geometry.scale, with_stiffness);
    }
  }
}

PairEvaluation combine_pair(const ElementPair& pair, const std::optional<PointUnit>& point,
                            const IntegrationScheme* scheme, const ContactSettings& settings, bool with_stiffness) {
  PairEvaluation ev;
  if (point) {
    ev.point_solution = point->solution;
    add_point_unit(ev, pair, *point, settings, with_stiffness);
    if (point->kind == UnitKind::fallback) ++ev.n_fallback;
  }
  if (scheme) {
    ev.scheme = *scheme;
    add_line_units(ev, pair, *scheme, settings, with_stiffness);
  }
  return ev;
}

}  // namespace

PairEvaluation evaluate_pair(const ElementPair& pair, const PairEnds& ends, const ContactSettings& settings,
                             const PairRequest& request, bool with_stiffness) {
  std::optional<PointUnit> point;
  bool fallback_used = false;
  const bool want_point = request.point && settings.mode != ContactMode::line_only;
  const bool want_line = request.line && settings.mode != ContactMode::point_only;
  if (want_point) {
    const ClosestPointSolution sol = bilateral_cpp(pair, request.xi0, request.eta0, settings.cpp);
    switch (sol.status) {
      case ProjectionStatus::converged:
        point = make_projection_unit(pair, sol, settings.cpp);
        break;
      case ProjectionStatus::out_of_domain:
        point = classify_endpoint(pair, ends, sol, settings.cpp);
        break;
      case ProjectionStatus::unconverged:
        point = fallback_unit(pair, settings);
        fallback_used = point.has_value();
        break;
      case ProjectionStatus::singular:
        // Parallel tangents: no unique closest point; line contact carries the pair.
        break;
    }
  }
  std::optional<IntegrationScheme> scheme;
  if (want_line) scheme = build_scheme(pair, settings.n_ii, settings.n_gr, ends.master, settings.cpp);
  PairEvaluation ev = combine_pair(pair, point, scheme ? &*scheme : nullptr, settings, with_stiffness);
  if (fallback_used && ev.n_fallback == 0) ++ev.n_fallback;
  return ev;
}

namespace {

std::optional<PointUnit> explicit_point(const ElementPair& pair, const std::optional<ClosestPointSolution>& sol,
                                        const ProjectionOptions& opts) {
  if (!sol) return std::nullopt;
  if (!sol->converged()) throw ContactEvaluationError("point contact requires a converged projection");
  return make_projection_unit(pair, *sol, opts);
}

}  // namespace

PairEvaluation abc_force_based(const ElementPair& pair, const std::optional<ClosestPointSolution>& point,
                               const IntegrationScheme& scheme, const ContactSettings& settings) {
  ContactSettings s = settings;
  s.transition.variant = TransitionVariant::force_based;
  s.mode = ContactMode::abc;
  return combine_pair(pair, explicit_point(pair, point, s.cpp), &scheme, s, true);
}

PairEvaluation abc_potential_based(const ElementPair& pair, const std::optional<ClosestPointSolution>& point,
                                   const IntegrationScheme& scheme, const ContactSettings& settings) {
  ContactSettings s = settings;
  s.transition.variant = TransitionVariant::potential_based;
  s.mode = ContactMode::abc;
  return combine_pair(pair, explicit_point(pair, point, s.cpp), &scheme, s, true);
}

double choose_alpha1(double mu_max, double k_alpha1) {
  if (!(mu_max >= 0.0) || mu_max >= 0.5) throw DomainError("mu_max must lie in [0, 0.5)");
  if (!(k_alpha1 > 0.0)) throw DomainError("safety factor must be positive");
  return k_alpha1 * rad_to_deg(std::acos(1.0 - 2.0 * mu_max));
}

double min_gauss_points_real(double g_n_min, double alpha_max_deg, double rho_slave, double k_gp) {
  if (!(g_n_min > -2.0)) throw DomainError("normalized gap bound must exceed -2 (crossing centerlines)");
  if (!(g_n_min < 0.0)) throw DomainError("normalized gap bound must be negative");
  const double q = g_n_min / 2.0 + 1.0;
  return k_gp / std::sqrt(1.0 - q * q) * std::sin(deg_to_rad(alpha_max_deg)) / 4.0 * rho_slave;
}

int min_gauss_points(double g_n_min, double alpha_max_deg, double rho_slave, double k_gp) {
  return static_cast<int>(std::ceil(min_gauss_points_real(g_n_min, alpha_max_deg, rho_slave, k_gp) - 1e-12));
}

double penalty_ratio_analytic(double radius, double alpha_bar_deg) {
  const double s = std::sin(deg_to_rad(alpha_bar_deg));
  if (!(alpha_bar_deg > 0.0) || s <= 0.0) throw SingularConfiguration("penalty ratio undefined for zero angle");
  return 4.0 * radius / (3.0 * s);
}

double penalty_ratio_numeric(const PenaltyLaw& law_par, double g_min, double alpha_bar_deg, double radius) {
  const double s = std::sin(deg_to_rad(alpha_bar_deg));
  if (!(alpha_bar_deg > 0.0) || s <= 0.0) throw SingularConfiguration("penalty ratio undefined for zero angle");
  if (!(g_min > -2.0 * radius && g_min < 0.0)) throw DomainError("g_min must lie in (-2R, 0)");
  // Two straight beams of radius R crossing at alpha_bar with closest gap g_min:
  // centerline distance along the slave is sqrt(d0^2 + (s sin alpha)^2).
  const double d0 = g_min + 2.0 * radius;
  const double reach = 2.0 * radius + law_par.support();
  const double s_max = std::sqrt(std::max(0.0, reach * reach - d0 * d0)) / s;
  const GaussRule rule = GaussRule::legendre(20);
  const int panels = 64;
  double line = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -s_max + 2.0 * s_max * p / panels;
    const double b = a + 2.0 * s_max / panels;
    for (int q = 0; q < rule.size(); ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
      const double g = std::sqrt(d0 * d0 + x * x * s * s) - 2.0 * radius;
      line += 0.5 * (b - a) * rule.weights[q] * law_par.normalized_potential(g);
    }
  }
  const double point = law_par.normalized_potential(g_min);
  if (!(point > 0.0)) throw DomainError("point potential vanishes at g_min");
  return line / point;
}

}  // namespace abc_rods
