#pragma once

// Model problems on [-1,1]^2 with homogeneous Dirichlet data, and the
// region-average goal functionals.

#include "mpdwr/fespace.hpp"

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mpdwr {

using VectorField = std::function<std::array<double, 2>(Point)>;

struct Rect {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  /// Closed-set membership.
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct Problem {
  std::string name;
  ScalarField u;
  VectorField grad_u;
  ScalarField f;  // -Laplacian of u
  double k = 0.0;
};

/// J(u) = |R|^{-1} \int_R u.
struct Functional {
  std::string name;
  Rect region;
};

/// e1: sin(pi x) sin(2 pi y).
/// e2, e4: 50 (1-x^2)(1-y^2) exp(1 - y^-4).
/// e3: (1-x^2)^2 (1-y^2)^2 / (k x^2 + 0.1), k = 4.
std::vector<Problem> catalog();

/// Throws std::invalid_argument for unknown names.
Problem problem_by_name(std::string_view name);

/// j1: whole domain. j2: [-1,1]x[-0.05,0.05]. j3: [-0.5,0]x[0.7,1].
Functional functional_by_name(std::string_view name);

/// Region average of a field over the elements of m, degree-8 quadrature with
/// characteristic-function weighting. Throws std::invalid_argument if the
/// region has zero area.
double eval_functional(const Functional& J, const ScalarField& u, const Mesh& m);

/// Same for a finite element solution; arithmetic in binary64.
double eval_functional(const Functional& J, const Solution<double>& u);

/// Region average of a field by adaptive subdivision of the region itself:
/// triangles are split until the degree-6 and degree-8 rules agree to `tol`
/// relative to the region area.
double integrate_average(const Functional& J, const ScalarField& u, double tol = 1e-12);

/// J(u) - J(u_h), both through eval_functional on u_h's mesh.
double functional_error(const Functional& J, const ScalarField& u_exact, const Solution<double>& u_h);

}  // namespace mpdwr
