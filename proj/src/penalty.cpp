#include "abc_rods/penalty.hpp"
#include "abc_rods/types.hpp"

namespace abc_rods {

PenaltyLaw PenaltyLaw::linear(double epsilon) {
  PenaltyLaw law;
  law.variant = PenaltyVariant::linear;
  law.epsilon = epsilon;
  law.validate();
  return law;
}

PenaltyLaw PenaltyLaw::quadratic(double epsilon, double g_bar) {
  PenaltyLaw law;
  law.variant = PenaltyVariant::quad_regularized;
  law.epsilon = epsilon;
  law.g_bar = g_bar;
  law.validate();
  return law;
}

void PenaltyLaw::validate() const {
  if (!(epsilon > 0.0)) throw InputError("penalty parameter must be positive");
  if (variant == PenaltyVariant::linear && g_bar != 0.0) throw InputError("linear penalty law requires g_bar = 0");
  if (variant == PenaltyVariant::quad_regularized && !(g_bar > 0.0))
    throw InputError("regularized penalty law requires g_bar > 0");
}

double PenaltyLaw::force(double g) const {
  if (variant == PenaltyVariant::linear) return g <= 0.0 ? -epsilon * g : 0.0;
  const double fb = f_bar();
  if (g <= 0.0) return fb - epsilon * g;
  if (g <= g_bar) return (epsilon * g_bar - fb) / (g_bar * g_bar) * g * g - epsilon * g + fb;
  return 0.0;
}

double PenaltyLaw::potential(double g) const {
  if (variant == PenaltyVariant::linear) return g <= 0.0 ? 0.5 * epsilon * g * g : 0.0;
  const double fb = f_bar();
  const double c = epsilon * g_bar * g_bar / 6.0;
  if (g <= 0.0) return 0.5 * epsilon * g * g - fb * g + c;
  if (g <= g_bar)
    return -(epsilon * g_bar - fb) / (3.0 * g_bar * g_bar) * g * g * g + 0.5 * epsilon * g * g - fb * g + c;
  return 0.0;
}

double PenaltyLaw::stiffness(double g) const {
  if (variant == PenaltyVariant::linear) return g <= 0.0 ? -epsilon : 0.0;
  if (g <= 0.0) return -epsilon;
  if (g <= g_bar) return 2.0 * (epsilon * g_bar - f_bar()) / (g_bar * g_bar) * g - epsilon;
  return 0.0;
}

}  // namespace abc_rods
