#pragma once

#include <vector>

namespace abc_rods {

struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  // n-point Gauss-Legendre rule on [-1, 1].
  static GaussRule legendre(int n);
  int size() const { return static_cast<int>(points.size()); }
};

}  // namespace abc_rods
