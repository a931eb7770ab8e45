#include "CLI11.hpp"
#include "abc_rods/scenario.hpp"
#include "abc_rods/verification.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>

using namespace abc_rods;
namespace fs = std::filesystem;

namespace {

Scenario load_with_overrides(const std::string& name, const std::vector<std::string>& overrides) {
  Scenario s = load_scenario(name);
  for (const auto& o : overrides) apply_override(s, o);
  return s;
}

std::string padded(long step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06ld", step);
  return buf;
}

int run(const std::string& name, const std::string& out_dir, const std::vector<std::string>& overrides) {
  const Scenario s = load_with_overrides(name, overrides);
  fs::create_directories(out_dir);
  Simulation sim(s.build_model(), s.contact, s.solver);
  const fs::path base = fs::path(out_dir) / s.name;
  std::unique_ptr<CsvWriter> csv;
  if (s.output.csv) csv = std::make_unique<CsvWriter>(base.string() + ".csv");
  auto write_vtk = [&](long step) {
    write_vtk_centerlines(base.string() + "_centerlines_" + padded(step) + ".vtk", sim.model().mesh, sim.state().d);
    write_vtk_contact_forces(base.string() + "_contact_" + padded(step) + ".vtk", sim.last_contact());
  };
  if (s.output.vtk) write_vtk(0);
  sim.run([&](const StepReport& r) {
    if (csv) csv->write(r);
    if (s.output.vtk && r.step % s.output.vtk_every == 0) write_vtk(r.step);
  });
  const StepReport& last = sim.reports().back();
  std::printf("%s: %zu steps to t = %.6g, %ld Newton iterations, %d rejected attempts\n", s.name.c_str(),
              sim.reports().size(), last.t, sim.total_newton_iterations(), sim.rejected_steps());
  std::printf("final: E_kin = %.6e  E_int = %.6e  Pi_c = %.6e  W_con = %.6e\n", last.e_kin, last.e_int, last.pi_c,
              last.w_con);
  if (csv) std::printf("wrote %s\n", csv->path().c_str());
  return 0;
}

int check_gradients(const std::string& name, const std::vector<std::string>& overrides, int n_pairs,
                    unsigned seed) {
  bool ok = true;
  // Pair-level suite over all configuration types.
  std::map<std::string, verification::PairCheck> worst;
  for (const auto& c : verification::pair_suite(n_pairs, seed)) {
    const std::string key = std::string(verification::to_string(c.type)) + "/" +
                            (c.variant == TransitionVariant::force_based ? "force" : "potential");
    auto& w = worst[key];
    w.stiffness_error = std::max(w.stiffness_error, c.stiffness_error);
    w.contraction_error = std::max(w.contraction_error, c.contraction_error);
    w.variant = c.variant;
    w.type = c.type;
    ok = ok && c.active;
  }
  std::printf("%-28s %14s %14s\n", "pair configuration", "tangent err", "rigid contr.");
  for (const auto& [key, w] : worst) {
    const double tol = w.variant == TransitionVariant::potential_based ? 1e-4 : 1e-5;
    const bool pass = w.stiffness_error < tol && w.contraction_error < 1e-12;
    ok = ok && pass;
    std::printf("%-28s %14.3e %14.3e  %s\n", key.c_str(), w.stiffness_error, w.contraction_error,
                pass ? "ok" : "FAIL");
  }

  // Assembled tangent of the scenario at its initial state and at perturbed states.
  const Scenario s = load_with_overrides(name, overrides);
  Simulation sim(s.build_model(), s.contact, s.solver);
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double scale = 0.05 * sim.model().mesh.min_radius();
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd d = sim.state().d;
    if (k > 0)
      for (int i = 0; i < d.size(); ++i) d[i] += scale * noise(rng);
    const auto c = verification::check_assembly(sim, d, sim.state().t);
    const bool pass = c.stiffness_error < 1e-5;
    ok = ok && pass;
    std::printf("%-28s %14.3e  active units %d  %s\n", (s.name + (k ? " perturbed" : " initial")).c_str(),
                c.stiffness_error, c.active_units, pass ? "ok" : "FAIL");
  }
  std::printf("%s\n", ok ? "all gradient checks passed" : "gradient checks FAILED");
  return ok ? 0 : 3;
}

int estimate(double radius, double alpha_bar, double mu_max, double k_alpha1, double g_min, double rho, double k_gp) {
  const double alpha1 = choose_alpha1(mu_max, k_alpha1);
  const double ratio = penalty_ratio_analytic(radius, alpha_bar);
  std::printf("alpha1 from mu_max            = %.6g deg\n", alpha1);
  std::printf("eps_perp/eps_par at alpha_bar = %.6g\n", ratio);
  std::printf("eps_par/eps_perp              = %.6g\n", 1.0 / ratio);
  const double alpha2 = 2.0 * alpha_bar - alpha1;
  if (alpha2 > alpha1) {
    std::printf("alpha2 for this alpha_bar     = %.6g deg\n", alpha2);
    std::printf("min Gauss points (line, a2)   = %d  (%.4g)\n", min_gauss_points(g_min, alpha2, rho, k_gp),
                min_gauss_points_real(g_min, alpha2, rho, k_gp));
  } else {
    std::printf("alpha_bar is not above alpha1; no admissible alpha2\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ABC beam-to-beam contact simulations"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Run a built-in scenario or scenario file");
  run_cmd->add_option("scenario", scenario, "Built-in name or path")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--override", overrides, "section.key=value")->take_all();

  int n_pairs = 50;
  unsigned seed = 2024;
  auto* grad_cmd = app.add_subcommand("check-gradients", "Finite-difference checks of residuals and tangents");
  grad_cmd->add_option("scenario", scenario, "Built-in name or path")->required();
  grad_cmd->add_option("--override", overrides, "section.key=value")->take_all();
  grad_cmd->add_option("--pairs", n_pairs, "Number of random pair configurations");
  grad_cmd->add_option("--seed", seed, "Random seed");

  double radius = 0.0, alpha_bar = 0.0, mu_max = 0.0;
  double k_alpha1 = 1.0, g_min = -0.1, rho = 51.0, k_gp = 1.0;
  auto* est_cmd = app.add_subcommand("estimate", "Penalty ratio, shifting angle and Gauss point estimates");
  est_cmd->add_option("R", radius, "Cross-section radius")->required();
  est_cmd->add_option("alpha_bar", alpha_bar, "Mean transition angle in degrees")->required();
  est_cmd->add_option("mu_max", mu_max, "Largest expected normalized penetration")->required();
  est_cmd->add_option("--k-alpha1", k_alpha1, "Safety factor on alpha1");
  est_cmd->add_option("--g-min", g_min, "Smallest normalized gap");
  est_cmd->add_option("--rho", rho, "Slave element slenderness");
  est_cmd->add_option("--k-gp", k_gp, "Safety factor on the Gauss point count");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(scenario, out_dir, overrides);
    if (*grad_cmd) return check_gradients(scenario, overrides, n_pairs, seed);
    if (*est_cmd) return estimate(radius, alpha_bar, mu_max, k_alpha1, g_min, rho, k_gp);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
