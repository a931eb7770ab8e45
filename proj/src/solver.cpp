#include "abc_rods/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

namespace abc_rods {

GenAlphaParams GenAlphaParams::from_spectral_radius(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InputError("spectral radius must lie in [0, 1]");
  GenAlphaParams p;
  p.alpha_m = (2.0 * rho - 1.0) / (rho + 1.0);
  p.alpha_f = rho / (rho + 1.0);
  p.beta = 0.25 * (1.0 - p.alpha_m + p.alpha_f) * (1.0 - p.alpha_m + p.alpha_f);
  p.gamma = 0.5 - p.alpha_m + p.alpha_f;
  return p;
}

void SolverConfig::validate() const {
  if (!(tol_R > 0.0) || !(tol_D > 0.0)) throw InputError("solver tolerances must be positive");
  if (max_newton < 1) throw InputError("max_newton must be at least 1");
  if (!(k_pen >= 0.0 && k_pen <= 1.0)) throw InputError("k_pen must lie in [0, 1]");
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(t_end > 0.0)) throw InputError("t_end must be positive");
  if (redouble_after < 1) throw InputError("redouble_after must be at least 1");
  if (element_gauss_points < 1 || element_gauss_points > 20) throw InputError("element_gauss_points must be 1..20");
}

const char* to_string(StepFailure f) {
  switch (f) {
    case StepFailure::none: return "none";
    case StepFailure::max_newton: return "max_newton";
    case StepFailure::penetration: return "penetration";
    case StepFailure::contact_evaluation: return "contact_evaluation";
    case StepFailure::singular: return "singular";
  }
  return "?";
}

int worker_count(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("ABC_RODS_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  } else if (const char* env = std::getenv("ABC_RODS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

namespace {

// Runs f(i) for i in [0, n); rethrows the exception of the lowest failing index.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int m = std::min(threads, n);
  for (int k = 0; k < m; ++k) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

using Triplets = std::vector<Eigen::Triplet<double>>;

template <int N>
void scatter(Triplets& trip, Eigen::VectorXd& r, const std::array<int, N>& map, const Eigen::Matrix<double, N, 1>& re,
             const Eigen::Matrix<double, N, N>* ke) {
  for (int i = 0; i < N; ++i) {
    r[map[i]] += re[i];
    if (ke)
      for (int j = 0; j < N; ++j)
        if ((*ke)(i, j) != 0.0) trip.emplace_back(map[i], map[j], (*ke)(i, j));
  }
}

}  // namespace

Simulation::Simulation(Model model, ContactConfig contact, SolverConfig solver)
    : model_(std::move(model)), contact_(std::move(contact)), solver_(solver) {
  model_.validate();
  solver_.validate();
  if (contact_.enabled) contact_.settings.validate();
  threads_ = worker_count(solver_.threads);
  const int n = model_.mesh.n_dofs();
  state_.d = model_.mesh.reference_dofs();
  state_.v = Eigen::VectorXd::Zero(n);
  state_.a = Eigen::VectorXd::Zero(n);
  constrained_ = model_.constrained_dofs();
  is_constrained_.assign(n, 0);
  for (int c : constrained_) is_constrained_[c] = 1;
  dt_ = solver_.dt;

  Triplets trip;
  for (int e = 0; e < model_.mesh.n_elements(); ++e) {
    const Mat12 m = mass_matrix(model_.mesh.element_dofs(state_.d, e), model_.mesh.section_of(e));
    const auto map = model_.mesh.dof_map(e);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        if (m(i, j) != 0.0) trip.emplace_back(map[i], map[j], m(i, j));
  }
  mass_.resize(n, n);
  mass_.setFromTriplets(trip.begin(), trip.end());

  apply_prescribed(state_.d, 0.0);
  Assembly a0 = assemble(state_.d, 0.0, false);
  r_con_prev_ = a0.r_con;
  r_rest_prev_ = a0.r_int + a0.r_ext;
  e_int_current_ = a0.e_int;
  accepted_contact_ = a0.contact;
  if (solver_.dynamic) {
    // Consistent initial acceleration on the free dofs.
    const Eigen::VectorXd f = a0.forces();
    if (f.cwiseAbs().maxCoeff() > 0.0) {
      Triplets t;
      for (int k = 0; k < mass_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(mass_, k); it; ++it)
          if (!is_constrained_[it.row()]) t.emplace_back(it.row(), it.col(), it.value());
      for (int c : constrained_) t.emplace_back(c, c, 1.0);
      SparseMatrix m(n, n);
      m.setFromTriplets(t.begin(), t.end());
      Eigen::VectorXd rhs = -f;
      for (int c : constrained_) rhs[c] = 0.0;
      Eigen::SparseLU<SparseMatrix> lu;
      lu.compute(m);
      if (lu.info() != Eigen::Success) throw SolverError("singular mass matrix");
      state_.a = lu.solve(rhs);
    }
  }
}

double Simulation::r_cap() const { return solver_.r_cap > 0.0 ? solver_.r_cap : model_.mesh.min_radius(); }

void Simulation::apply_prescribed(Eigen::VectorXd& d, double t) const {
  const Eigen::VectorXd p = model_.prescribed_values(t);
  for (size_t i = 0; i < constrained_.size(); ++i) d[constrained_[i]] = p[i];
}

ContactSet Simulation::evaluate_contact(const Eigen::VectorXd& d, bool with_stiffness) {
  ContactSet set;
  if (!contact_.enabled) return set;
  const auto& mesh = model_.mesh;
  const auto elements = mesh.search_elements(d);
  SearchConfig sc = contact_.search;
  sc.alpha1_deg = contact_.settings.transition.alpha1;
  sc.alpha2_deg = contact_.settings.transition.alpha2;
  sc.g_bar = contact_.settings.law_variant == PenaltyVariant::quad_regularized ? contact_.settings.g_bar : 0.0;
  const SearchResult found = contact_search(elements, sc);
  const int n = static_cast<int>(found.pairs.size());
  set.pairs.resize(n);
  parallel_for(n, threads_, [&](int i) {
    const PairCandidate& c = found.pairs[i];
    const int e1 = c.element1;
    const int e2 = c.element2;
    ElementPair pair{elements[e1].dofs, elements[e2].dofs, elements[e1].radius, elements[e2].radius};
    PairEnds ends;
    ends.slave = mesh.elements()[e1].physical_end;
    ends.master = mesh.elements()[e2].physical_end;
    PairRequest req;
    req.point = c.point || contact_.settings.mode == ContactMode::point_only;
    req.line = c.line || contact_.settings.mode == ContactMode::line_only;
    req.xi0 = c.xi0;
    req.eta0 = c.eta0;
    if (auto it = warm_start_.find({e1, e2}); it != warm_start_.end()) {
      req.xi0 = it->second.first;
      req.eta0 = it->second.second;
    }
    set.pairs[i].element1 = e1;
    set.pairs[i].element2 = e2;
    set.pairs[i].evaluation = evaluate_pair(pair, ends, contact_.settings, req, with_stiffness);
  });
  for (const auto& p : set.pairs) {
    const auto& ev = p.evaluation;
    set.n_point += ev.n_point;
    set.n_line_gp += ev.n_line_gp;
    set.n_endpoint += ev.n_endpoint;
    set.n_fallback += ev.n_fallback;
    set.alpha_min = std::min(set.alpha_min, ev.alpha_min);
    set.alpha_max = std::max(set.alpha_max, ev.alpha_max);
    set.potential += ev.potential;
    set.min_gap = std::min(set.min_gap, ev.min_gap);
    const double r = std::min(elements[p.element1].radius, elements[p.element2].radius);
    set.min_relative_gap = std::min(set.min_relative_gap, ev.min_gap / r);
  }
  return set;
}

Assembly Simulation::assemble(const Eigen::VectorXd& d, double t, bool with_stiffness) {
  const auto& mesh = model_.mesh;
  const int n = mesh.n_dofs();
  Assembly out;
  out.r_int = Eigen::VectorXd::Zero(n);
  out.r_con = Eigen::VectorXd::Zero(n);
  out.r_ext = Eigen::VectorXd::Zero(n);
  Triplets trip;

  const GaussRule& rule = GaussRule::legendre(solver_.element_gauss_points);
  const int ne = mesh.n_elements();
  std::vector<ElementForces> forces(ne);
  parallel_for(ne, threads_, [&](int e) {
    forces[e] = internal_forces(mesh.element_dofs(d, e), mesh.section_of(e), rule, solver_.axial, with_stiffness);
  });
  for (int e = 0; e < ne; ++e) out.e_int += forces[e].energy;
  for (int e = 0; e < ne; ++e)
    scatter<12>(trip, out.r_int, mesh.dof_map(e), forces[e].residual, with_stiffness ? &forces[e].stiffness : nullptr);

  // External loads.
  for (const auto& load : model_.line_loads) {
    const double scale = load.profile(t);
    if (scale == 0.0) continue;
    const Fiber& f = mesh.fibers()[load.fiber];
    for (int e = f.first_element; e < f.first_element + f.n_elements; ++e) {
      ElementLoad el;
      el.distributed_force = [&, e](double xi) {
        const double c = load.linear_in_coordinate ? mesh.fiber_coordinate(e, xi) : 1.0;
        return Vec3(load.value * (c * scale));
      };
      const ExternalForces ext = external_residual_stiffness(mesh.element_dofs(d, e), el, rule);
      scatter<12>(trip, out.r_ext, mesh.dof_map(e), ext.residual, nullptr);
    }
  }
  for (const auto& load : model_.nodal_loads) {
    const double scale = load.profile(t);
    if (scale == 0.0) continue;
    out.r_ext.segment<3>(6 * load.node) -= scale * load.force;
    if (load.moment.squaredNorm() > 0.0) {
      for (int e = 0; e < ne; ++e) {
        const auto& nodes = mesh.elements()[e].nodes;
        if (nodes[0] != load.node && nodes[1] != load.node) continue;
        ElementLoad el;
        el.point_moment[nodes[0] == load.node ? 0 : 1] = scale * load.moment;
        const ExternalForces ext = external_residual_stiffness(mesh.element_dofs(d, e), el, rule);
        scatter<12>(trip, out.r_ext, mesh.dof_map(e), ext.residual, with_stiffness ? &ext.stiffness : nullptr);
        break;
      }
    }
  }

  out.contact = evaluate_contact(d, with_stiffness);
  for (const auto& p : out.contact.pairs) {
    std::array<int, 24> map{};
    const auto m1 = mesh.dof_map(p.element1);
    const auto m2 = mesh.dof_map(p.element2);
    std::copy(m1.begin(), m1.end(), map.begin());
    std::copy(m2.begin(), m2.end(), map.begin() + 12);
    scatter<24>(trip, out.r_con, map, p.evaluation.residual, with_stiffness ? &p.evaluation.stiffness : nullptr);
  }
  if (with_stiffness) {
    out.k.resize(n, n);
    out.k.setFromTriplets(trip.begin(), trip.end());
  }
  return out;
}

int Simulation::cap_increment(Eigen::VectorXd& dd, double r_cap) {
  int halvings = 0;
  while (dd.cwiseAbs().maxCoeff() > r_cap) {
    dd *= 0.5;
    ++halvings;
  }
  return halvings;
}

bool Simulation::finished() const { return state_.t >= solver_.t_end - 1e-12 * solver_.dt; }

Simulation::Attempt Simulation::attempt(double dt) {
  Attempt at;
  GlobalState s = state_;
  s.t = state_.t + dt;
  s.step = state_.step + 1;
  const int n = model_.mesh.n_dofs();
  const bool dyn = solver_.dynamic;
  const GenAlphaParams& ga = solver_.genalpha;
  const Eigen::VectorXd target = model_.prescribed_values(s.t);
  const Eigen::VectorXd& d0 = state_.d;
  const Eigen::VectorXd& v0 = state_.v;
  const Eigen::VectorXd& a0 = state_.a;
  auto update_kinematics = [&] {
    if (!dyn) return;
    s.a = (s.d - d0 - dt * v0 - dt * dt * (0.5 - ga.beta) * a0) / (ga.beta * dt * dt);
    s.v = v0 + dt * ((1.0 - ga.gamma) * a0 + ga.gamma * s.a);
  };
  update_kinematics();
  const double cap = r_cap();
  Eigen::VectorXd dd = Eigen::VectorXd::Zero(n);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  residual_history_.clear();

  const bool mid_config = dyn && ga.averaging == MidAveraging::configuration;
  const double t_mid = mid_config ? (1.0 - ga.alpha_f) * s.t + ga.alpha_f * state_.t : s.t;
  auto guarded_assembly = [&](const Eigen::VectorXd& x, double tx, bool with_stiffness, Assembly& out) {
    try {
      out = assemble(x, tx, with_stiffness);
    } catch (const ContactEvaluationError& e) {
      at.failure = StepFailure::contact_evaluation;
      at.message = e.what();
      return false;
    } catch (const SingularConfiguration& e) {
      at.failure = StepFailure::contact_evaluation;
      at.message = e.what();
      return false;
    }
    if (solver_.penetration_guard && out.contact.min_relative_gap < -solver_.k_pen) {
      at.failure = StepFailure::penetration;
      at.message = "gap below -k_pen * R";
      return false;
    }
    return true;
  };

  for (int it = 0;; ++it) {
    Assembly asmb;
    const Eigen::VectorXd x = mid_config ? Eigen::VectorXd((1.0 - ga.alpha_f) * s.d + ga.alpha_f * d0) : s.d;
    if (!guarded_assembly(x, t_mid, true, asmb)) return at;
    Eigen::VectorXd r;
    SparseMatrix k;
    if (dyn) {
      r = mass_ * ((1.0 - ga.alpha_m) * s.a + ga.alpha_m * a0);
      if (mid_config)
        r += asmb.forces();
      else
        r += (1.0 - ga.alpha_f) * asmb.forces() + ga.alpha_f * (r_rest_prev_ + r_con_prev_);
      k = ((1.0 - ga.alpha_m) / (ga.beta * dt * dt)) * mass_ + (1.0 - ga.alpha_f) * asmb.k;
    } else {
      r = asmb.forces();
      k = asmb.k;
    }
    for (size_t i = 0; i < constrained_.size(); ++i) r[constrained_[i]] = s.d[constrained_[i]] - target[i];
    residual_history_.push_back(r.norm());

    if (it > 0 && r.norm() < solver_.tol_R && dd.norm() < solver_.tol_D) {
      // Prescribed values hold exactly in accepted states.
      for (size_t i = 0; i < constrained_.size(); ++i) s.d[constrained_[i]] = target[i];
      update_kinematics();
      at.state = s;
      at.iterations = it;
      if (mid_config) {
        at.r_con_eff = asmb.r_con;
        Assembly end;
        if (!guarded_assembly(s.d, s.t, false, end)) return at;
        asmb = std::move(end);
      } else {
        at.r_con_eff = dyn ? Eigen::VectorXd((1.0 - ga.alpha_f) * asmb.r_con + ga.alpha_f * r_con_prev_) : asmb.r_con;
      }
      at.contact = std::move(asmb.contact);
      at.failure = StepFailure::none;
      r_rest_next_ = asmb.r_int + asmb.r_ext;
      r_con_next_ = asmb.r_con;
      e_int_next_ = asmb.e_int;
      return at;
    }
    if (it == solver_.max_newton) {
      at.failure = StepFailure::max_newton;
      at.iterations = it;
      std::ostringstream os;
      os << "Newton did not converge, |R| = " << r.norm() << ", |dD| = " << dd.norm();
      at.message = os.str();
      return at;
    }

    // Dirichlet rows replaced by identity.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(k.nonZeros() + constrained_.size());
    for (int c = 0; c < k.outerSize(); ++c)
      for (SparseMatrix::InnerIterator iv(k, c); iv; ++iv)
        if (!is_constrained_[iv.row()]) trip.emplace_back(iv.row(), iv.col(), iv.value());
    for (int c : constrained_) trip.emplace_back(c, c, 1.0);
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    lu.analyzePattern(a);
    lu.factorize(a);
    ++at.iterations;
    if (lu.info() != Eigen::Success) {
      at.failure = StepFailure::singular;
      at.message = "singular tangent: " + lu.lastErrorMessage();
      return at;
    }
    dd = lu.solve(Eigen::VectorXd(-r));
    for (int c : constrained_) dd[c] = -r[c];
    if (!dd.allFinite()) {
      at.failure = StepFailure::singular;
      at.message = "non-finite increment";
      return at;
    }
    if (solver_.step_size_control) cap_increment(dd, cap);
    s.d += dd;
    update_kinematics();
  }
}

StepReport Simulation::report_current(const ContactSet& contact, int newton_iterations, double dd_inf) const {
  StepReport rep;
  rep.step = state_.step;
  rep.t = state_.t;
  rep.e_kin = 0.5 * state_.v.dot(mass_ * state_.v);
  rep.e_int = e_int_current_;
  rep.pi_c = contact.potential;
  rep.w_con = w_con_;
  const auto [l, h] = momenta(model_.mesh, state_.d, state_.v);
  rep.linear_momentum = l;
  rep.angular_momentum = h;
  rep.n_point = contact.n_point;
  rep.n_line_gp = contact.n_line_gp;
  rep.n_endpoint = contact.n_endpoint;
  rep.n_fallback = contact.n_fallback;
  if (contact.alpha_min <= contact.alpha_max) {
    rep.alpha_min = contact.alpha_min;
    rep.alpha_max = contact.alpha_max;
  }
  rep.newton_iterations = newton_iterations;
  rep.dD_inf = dd_inf;
  rep.min_gap = contact.min_gap;
  for (const auto& p : contact.pairs)
    for (const auto& f : p.evaluation.forces) {
      rep.contact_force += f.force;
      rep.contact_moment += f.position.cross(f.force);
    }
  return rep;
}

const StepReport& Simulation::step() {
  if (finished()) throw SolverError("simulation already reached t_end");
  const double dt_min = solver_.dt_min > 0.0 ? solver_.dt_min : solver_.dt / 1024.0;
  for (;;) {
    double dt = std::min(dt_, solver_.t_end - state_.t);
    if (solver_.t_end - state_.t - dt_ < 1e-9 * dt_) dt = solver_.t_end - state_.t;
    Attempt at;
    if (injected_failures_ > 0) {
      --injected_failures_;
      at.failure = StepFailure::max_newton;
      at.message = "injected failure";
    } else {
      at = attempt(dt);
    }
    total_iterations_ += at.iterations;
    if (at.failure != StepFailure::none) {
      ++rejected_;
      successes_ = 0;
      dt_ *= 0.5;
      if (dt_ < dt_min) {
        std::ostringstream os;
        os << "step size fell below dt_min at t = " << state_.t << " (last failure: " << to_string(at.failure)
           << ", " << at.message << "); state: |D|inf = " << state_.d.cwiseAbs().maxCoeff()
           << ", |V|inf = " << state_.v.cwiseAbs().maxCoeff();
        throw SolverError(os.str());
      }
      continue;
    }
    const Eigen::VectorXd dD = at.state.d - state_.d;
    w_con_ += contact_work_increment(dD, at.r_con_eff);
    state_ = at.state;
    r_rest_prev_ = r_rest_next_;
    r_con_prev_ = r_con_next_;
    e_int_current_ = e_int_next_;
    accepted_dts_.push_back(dt);
    for (const auto& p : at.contact.pairs)
      if (p.evaluation.point_solution && p.evaluation.point_solution->converged())
        warm_start_[{p.element1, p.element2}] = {p.evaluation.point_solution->xi, p.evaluation.point_solution->eta};
    if (++successes_ >= solver_.redouble_after && dt_ < solver_.dt) {
      dt_ = std::min(2.0 * dt_, solver_.dt);
      successes_ = 0;
    }
    reports_.push_back(report_current(at.contact, at.iterations, dD.cwiseAbs().maxCoeff()));
    accepted_contact_ = std::move(at.contact);
    return reports_.back();
  }
}

void Simulation::run(const std::function<void(const StepReport&)>& on_step) {
  while (!finished()) {
    const StepReport& rep = step();
    if (on_step) on_step(rep);
  }
}

}  // namespace abc_rods
