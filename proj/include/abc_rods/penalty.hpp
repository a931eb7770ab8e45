#pragma once

namespace abc_rods {

enum class PenaltyVariant { linear, quad_regularized };

struct PenaltyLaw {
  PenaltyVariant variant = PenaltyVariant::linear;
  double epsilon = 0.0;
  double g_bar = 0.0;

  static PenaltyLaw linear(double epsilon);
  static PenaltyLaw quadratic(double epsilon, double g_bar);

  void validate() const;
  double f_bar() const { return 0.5 * epsilon * g_bar; }
  // Force support: the law is nonzero only for g below this value.
  double support() const { return variant == PenaltyVariant::linear ? 0.0 : g_bar; }
  bool active(double g) const { return g < support(); }

  double force(double g) const;
  double potential(double g) const;
  double stiffness(double g) const;  // df/dg
  double normalized_potential(double g) const { return potential(g) / epsilon; }
};

}  // namespace abc_rods
