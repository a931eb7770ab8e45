#pragma once

#include "abc_rods/abc.hpp"
#include "abc_rods/diagnostics.hpp"
#include "abc_rods/model.hpp"
#include "abc_rods/search.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace abc_rods {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Where the alpha_f-weighted mid-step balance evaluates forces: at the
// averaged configuration, or as the average of end-point forces.
enum class MidAveraging { configuration, forces };

struct GenAlphaParams {
  MidAveraging averaging = MidAveraging::configuration;
  double alpha_f = 0.5;
  double alpha_m = 0.5;
  double beta = 0.25;
  double gamma = 0.5;

  static GenAlphaParams from_spectral_radius(double rho);
};

struct SolverConfig {
  double tol_R = 1e-7;
  double tol_D = 1e-7;
  int max_newton = 50;
  double r_cap = 0.0;  // <= 0: minimum cross-section radius of the mesh
  bool step_size_control = true;
  bool penetration_guard = true;
  double k_pen = 0.5;
  bool dynamic = false;
  GenAlphaParams genalpha;
  double dt = 1.0;
  double t_end = 1.0;
  double dt_min = 0.0;  // <= 0: dt / 2^10
  int redouble_after = 4;
  AxialTreatment axial = AxialTreatment::standard;
  int element_gauss_points = 4;
  int threads = 0;  // <= 0: ABC_RODS_THREADS or hardware concurrency

  void validate() const;
};

struct ContactConfig {
  bool enabled = true;
  ContactSettings settings;
  SearchConfig search;
};

struct GlobalState {
  Eigen::VectorXd d;
  Eigen::VectorXd v;
  Eigen::VectorXd a;
  double t = 0.0;
  int step = 0;
};

struct ContactPairResult {
  int element1 = 0;
  int element2 = 0;
  PairEvaluation evaluation;
};

struct ContactSet {
  std::vector<ContactPairResult> pairs;
  int n_point = 0;
  int n_line_gp = 0;
  int n_endpoint = 0;
  int n_fallback = 0;
  double alpha_min = std::numeric_limits<double>::infinity();
  double alpha_max = -std::numeric_limits<double>::infinity();
  double potential = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  // Smallest gap relative to the smaller radius of its pair.
  double min_relative_gap = std::numeric_limits<double>::infinity();
};

struct Assembly {
  Eigen::VectorXd r_int;
  Eigen::VectorXd r_con;
  Eigen::VectorXd r_ext;  // sign convention: enters R_tot with a plus sign
  SparseMatrix k;         // d(R_int + R_con + R_ext)/dD, unconstrained
  ContactSet contact;
  double e_int = 0.0;
  Eigen::VectorXd forces() const { return r_int + r_con + r_ext; }
};

enum class StepFailure { none, max_newton, penetration, contact_evaluation, singular };
const char* to_string(StepFailure f);

int worker_count(int requested);

class Simulation {
 public:
  Simulation(Model model, ContactConfig contact, SolverConfig solver);

  const Model& model() const { return model_; }
  const SolverConfig& solver_config() const { return solver_; }
  const ContactConfig& contact_config() const { return contact_; }
  const GlobalState& state() const { return state_; }
  GlobalState& mutable_state() { return state_; }
  const SparseMatrix& mass() const { return mass_; }
  double current_dt() const { return dt_; }
  long total_newton_iterations() const { return total_iterations_; }
  int rejected_steps() const { return rejected_; }
  const std::vector<StepReport>& reports() const { return reports_; }
  // Contact set of the last accepted state.
  const ContactSet& last_contact() const { return accepted_contact_; }
  double r_cap() const;

  // Static residual pieces and tangent at configuration d and time t.
  Assembly assemble(const Eigen::VectorXd& d, double t, bool with_stiffness);
  ContactSet evaluate_contact(const Eigen::VectorXd& d, bool with_stiffness);

  bool finished() const;
  // Advances by one accepted step (internally halving on failure).
  const StepReport& step();
  void run(const std::function<void(const StepReport&)>& on_step = {});

  StepReport report_current(const ContactSet& contact, int newton_iterations, double dd_inf) const;

  // Applies the increment cap of the step-size control; returns the number of halvings.
  static int cap_increment(Eigen::VectorXd& dd, double r_cap);

  // Forces one failure before the next attempt; used to exercise the halving policy.
  void inject_failures(int n) { injected_failures_ = n; }

  // Residual norms of the Newton iterates of the last attempt.
  const std::vector<double>& residual_history() const { return residual_history_; }

  // Trajectory of step sizes of accepted steps.
  const std::vector<double>& accepted_dts() const { return accepted_dts_; }

 private:
  struct Attempt {
    StepFailure failure = StepFailure::none;
    GlobalState state;
    ContactSet contact;
    Eigen::VectorXd r_con_eff;
    ContactSet end_contact;
    int iterations = 0;
    std::string message;
  };

  Attempt attempt(double dt);
  void apply_prescribed(Eigen::VectorXd& d, double t) const;

  Model model_;
  ContactConfig contact_;
  SolverConfig solver_;
  GlobalState state_;
  SparseMatrix mass_;
  std::vector<int> constrained_;
  std::vector<char> is_constrained_;
  Eigen::VectorXd r_con_prev_;   // contact residual at the last accepted state
  Eigen::VectorXd r_rest_prev_;  // internal + external residual at the last accepted state
  Eigen::VectorXd r_con_next_;
  Eigen::VectorXd r_rest_next_;
  double e_int_current_ = 0.0;
  double e_int_next_ = 0.0;
  double w_con_ = 0.0;
  double dt_ = 1.0;
  int successes_ = 0;
  int injected_failures_ = 0;
  long total_iterations_ = 0;
  int rejected_ = 0;
  int threads_ = 1;
  std::vector<StepReport> reports_;
  ContactSet accepted_contact_;
  std::vector<double> accepted_dts_;
  std::vector<double> residual_history_;
  std::map<std::pair<int, int>, std::pair<double, double>> warm_start_;
};

}  // namespace abc_rods
