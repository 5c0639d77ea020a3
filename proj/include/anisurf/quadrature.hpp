#pragma once

#include <vector>

namespace anisurf {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

}  // namespace anisurf
