#pragma once

#include <array>
#include <vector>

namespace mpdwr {

/// Symmetric Gauss rule on the reference triangle (0,0), (1,0), (0,1).
/// Points are barycentric (l0, l1, l2); reference coordinates are (l1, l2).
/// Weights sum to the reference area 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Supported degrees: 1, 2, 3, 4, 5, 6, 8. Throws std::invalid_argument
/// otherwise.
const QuadratureRule& triangle_quadrature(int exactness_degree);

/// Gauss-Legendre rule on [0,1] with n points (n = 1..4).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const LineRule& gauss_legendre(int n);

}  // namespace mpdwr
