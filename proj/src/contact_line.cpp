#include "abc_rods/contact_line.hpp"

#include <algorithm>
#include <cmath>

namespace abc_rods {

double IntegrationScheme::gauss_coordinate(int i, int j) const {
  const auto& iv = intervals.at(i);
  const double xb = rule.points.at(j);
  return 0.5 * (1.0 - xb) * iv.lower.xi + 0.5 * (1.0 + xb) * iv.upper.xi;
}

double total_jacobian(double l0_slave, const IntegrationInterval& interval) {
  return 0.5 * l0_slave * 0.5 * (interval.upper.xi - interval.lower.xi);
}

double total_jacobian(const IntegrationScheme& scheme, int i, double l0_slave) {
  return total_jacobian(l0_slave, scheme.intervals.at(i));
}

std::optional<EndpointSegmentation> segment_at_master_end(const ElementPair& pair, double eta_ep,
                                                          const ProjectionOptions& opts) {
  // Start from the master endpoint projected onto the slave chord.
  const Vec3 p = interpolate(pair.second, eta_ep, 0);
  const Vec3 a = pair.first.node_position(0);
  const Vec3 b = pair.first.node_position(1);
  const double len2 = (b - a).squaredNorm();
  double xi0 = len2 > 0.0 ? 2.0 * (p - a).dot(b - a) / len2 - 1.0 : 0.0;
  xi0 = std::clamp(xi0, -1.0, 1.0);
  const auto proj = master_endpoint_projection(pair, eta_ep, xi0, opts);
  if (!proj || proj->xi_b <= -1.0 || proj->xi_b >= 1.0) return std::nullopt;
  const OrthogonalityTerms t = orthogonality_terms(pair, proj->xi_b, eta_ep, false);
  if (t.a(1, 1) == 0.0) return std::nullopt;
  const double deta_dxi = -t.a(1, 0) / t.a(1, 1);
  EndpointSegmentation seg;
  seg.projection = *proj;
  seg.overlap_side = deta_dxi * eta_ep < 0.0 ? 1 : -1;
  return seg;
}

IntegrationScheme build_scheme(int n_ii, int n_gr, const std::vector<EndpointSegmentation>& endpoints) {
  if (n_ii < 1 || n_gr < 1) throw DomainError("interval and Gauss point counts must be positive");
  IntegrationScheme s;
  s.n_ii = n_ii;
  s.n_gr = n_gr;
  s.rule = GaussRule::legendre(n_gr);
  for (int i = 0; i < n_ii; ++i) {
    IntegrationInterval iv;
    iv.lower.xi = -1.0 + 2.0 * i / n_ii;
    iv.upper.xi = -1.0 + 2.0 * (i + 1) / n_ii;
    if (i == n_ii - 1) iv.upper.xi = 1.0;
    s.intervals.push_back(iv);
  }
  for (const auto& seg : endpoints) {
    const double xb = seg.projection.xi_b;
    IntervalBound bound;
    bound.xi = xb;
    bound.kind = BoundKind::boundary_projected;
    bound.eta_ep = seg.projection.eta_ep;
    bound.dxi = seg.projection.dxi_b;
    int best = -1;
    double best_dist = 0.0;
    for (int k = 0; k < static_cast<int>(s.intervals.size()); ++k) {
      const auto& iv = s.intervals[k];
      const bool ok = seg.overlap_side > 0 ? iv.upper.xi > xb : iv.lower.xi < xb;
      if (!ok) continue;
      const double dist = std::abs((seg.overlap_side > 0 ? iv.lower.xi : iv.upper.xi) - xb);
      if (best < 0 || dist < best_dist) {
        best = k;
        best_dist = dist;
      }
    }
    if (best < 0) {
      s.intervals.clear();
      break;
    }
    if (seg.overlap_side > 0) {
      s.intervals[best].lower = bound;
      s.intervals.erase(s.intervals.begin(), s.intervals.begin() + best);
    } else {
      s.intervals[best].upper = bound;
      s.intervals.erase(s.intervals.begin() + best + 1, s.intervals.end());
    }
  }
  return s;
}

IntegrationScheme build_scheme(const ElementPair& pair, int n_ii, int n_gr, const std::array<bool, 2>& master_ends,
                               const ProjectionOptions& opts) {
  std::vector<EndpointSegmentation> segs;
  for (int e = 0; e < 2; ++e) {
    if (!master_ends[e]) continue;
    if (auto seg = segment_at_master_end(pair, e == 0 ? -1.0 : 1.0, opts)) segs.push_back(*seg);
  }
  return build_scheme(n_ii, n_gr, segs);
}

IntegrationScheme reevaluate_scheme(const ElementPair& pair, const IntegrationScheme& scheme,
                                    const ProjectionOptions& opts) {
  IntegrationScheme s = scheme;
  auto update = [&](IntervalBound& b) {
    if (b.kind != BoundKind::boundary_projected) return;
    const auto proj = master_endpoint_projection(pair, b.eta_ep, std::clamp(b.xi, -1.0, 1.0), opts);
    if (!proj) throw ContactEvaluationError("master endpoint projection lost during re-evaluation");
    b.xi = proj->xi_b;
    b.dxi = proj->dxi_b;
  };
  for (auto& iv : s.intervals) {
    update(iv.lower);
    update(iv.upper);
  }
  return s;
}

double chord_start(const ElementPair& pair, double xi) {
  const Vec3 p = interpolate(pair.first, xi, 0);
  const Vec3 a = pair.second.node_position(0);
  const Vec3 b = pair.second.node_position(1);
  const double len2 = (b - a).squaredNorm();
  if (len2 == 0.0) return 0.0;
  return std::clamp(2.0 * (p - a).dot(b - a) / len2 - 1.0, -1.0, 1.0);
}

LineGaussPoint locate_gauss_point(const ElementPair& pair, const IntegrationScheme& scheme, int i, int j,
                                  double eta_start, const ProjectionOptions& opts) {
  LineGaussPoint gp;
  gp.interval = i;
  gp.index = j;
  gp.xi_bar = scheme.rule.points[j];
  gp.weight = scheme.rule.weights[j];
  const auto& iv = scheme.intervals[i];
  const double xi = scheme.gauss_coordinate(i, j);
  gp.solution = unilateral_cpp(pair, xi, eta_start, opts);
  if (gp.solution.status == ProjectionStatus::out_of_domain) return gp;
  if (gp.solution.status != ProjectionStatus::converged)
    throw ContactEvaluationError(std::string("Gauss point projection ") + to_string(gp.solution.status));
  gp.valid = true;
  const ProjectionSensitivity sens = cpp_sensitivities(pair, gp.solution);
  const Row24 dxi = 0.5 * (1.0 - gp.xi_bar) * iv.lower.dxi + 0.5 * (1.0 + gp.xi_bar) * iv.upper.dxi;
  UnitGeometry& geo = gp.geometry;
  geo.xi = xi;
  geo.eta = gp.solution.eta;
  geo.dxi = dxi;
  geo.deta = sens.deta_dxi * dxi + sens.deta;
  geo.scale = gp.weight * total_jacobian(pair.first.l0, iv);
  geo.dscale = gp.weight * 0.5 * pair.first.jacobian() * (iv.upper.dxi - iv.lower.dxi);
  return gp;
}

LineContactResult line_contact(const ElementPair& pair, const IntegrationScheme& scheme, const PenaltyLaw& law,
                               const std::vector<double>& weights, bool with_stiffness,
                               const ProjectionOptions& opts) {
  LineContactResult out;
  for (int i = 0; i < static_cast<int>(scheme.intervals.size()); ++i) {
    for (int j = 0; j < scheme.rule.size(); ++j) {
      const double xi = scheme.gauss_coordinate(i, j);
      const LineGaussPoint gp = locate_gauss_point(pair, scheme, i, j, chord_start(pair, xi), opts);
      if (!gp.valid || !law.active(gp.solution.gap)) continue;
      const double w = weights.empty() ? 1.0 : weights.at(i * scheme.rule.size() + j);
      const ContactKernel k = contact_kernel(pair, gp.geometry, law, with_stiffness);
      if (!k.active) continue;
      ++out.active_points;
      out.residual += w * k.residual;
      if (with_stiffness) out.stiffness += w * k.stiffness;
    }
  }
  return out;
}

std::pair<Vec12, Vec12> line_residual(const ElementPair& pair, const IntegrationScheme& scheme,
                                      const PenaltyLaw& law, const std::vector<double>& weights) {
  const LineContactResult r = line_contact(pair, scheme, law, weights, false);
  return {r.residual.head<12>(), r.residual.tail<12>()};
}

Mat24 line_stiffness(const ElementPair& pair, const IntegrationScheme& scheme, const PenaltyLaw& law,
                     const std::vector<double>& weights) {
  return line_contact(pair, scheme, law, weights, true).stiffness;
}

}  // namespace abc_rods
