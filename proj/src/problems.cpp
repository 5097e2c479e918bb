#include "mpdwr/problems.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mpdwr {

namespace {

constexpr double pi = std::numbers::pi;

Problem make_e1() {
  Problem p;
  p.name = "e1";
  p.u = [](Point x) { return std::sin(pi * x.x) * std::sin(2.0 * pi * x.y); };
  p.grad_u = [](Point x) {
    return std::array<double, 2>{pi * std::cos(pi * x.x) * std::sin(2.0 * pi * x.y),
                                 2.0 * pi * std::sin(pi * x.x) * std::cos(2.0 * pi * x.y)};
  };
  p.f = [](Point x) { return 5.0 * pi * pi * std::sin(pi * x.x) * std::sin(2.0 * pi * x.y); };
  return p;
}

// u = g(x) Q(y), g = P / D, P = (1-x^2)^2, D = k x^2 + 0.1, Q = (1-y^2)^2.
struct E3Parts {
  double g, dg, d2g, q, dq, d2q;
};

E3Parts e3_parts(Point x, double k) {
  const double s = 1.0 - x.x * x.x;
  const double P = s * s, dP = -4.0 * x.x * s, d2P = 12.0 * x.x * x.x - 4.0;
  const double D = k * x.x * x.x + 0.1, dD = 2.0 * k * x.x, d2D = 2.0 * k;
  const double t = 1.0 - x.y * x.y;
  E3Parts r;
  r.g = P / D;
  r.dg = dP / D - P * dD / (D * D);
  r.d2g = d2P / D - 2.0 * dP * dD / (D * D) - P * d2D / (D * D) + 2.0 * P * dD * dD / (D * D * D);
  r.q = t * t;
  r.dq = -4.0 * x.y * t;
  r.d2q = 12.0 * x.y * x.y - 4.0;
  return r;
}

Problem make_e3() {
  constexpr double k = 4.0;
  Problem p;
  p.name = "e3";
  p.k = k;
  p.u = [](Point x) {
    const auto r = e3_parts(x, k);
    return r.g * r.q;
  };
  p.grad_u = [](Point x) {
    const auto r = e3_parts(x, k);
    return std::array<double, 2>{r.dg * r.q, r.g * r.dq};
  };
  p.f = [](Point x) {
    const auto r = e3_parts(x, k);
    return -(r.d2g * r.q + r.g * r.d2q);
  };
  return p;
}

// u = 50 A(x) B(y), A = 1-x^2, B = (1-y^2) E, E = exp(1 - y^-4).
struct E2Parts {
  double a, b, db, d2b;
};

// exp(1 - y^-4) underflows for small |y|; those points return exact zeros.
bool e2_flat(double y) {
  if (y == 0.0) return true;
  const double y2 = y * y;
  return 1.0 - 1.0 / (y2 * y2) < std::log(DBL_MIN);
}

E2Parts e2_parts(Point x) {
  const double y = x.y, y2 = y * y;
  const double inv4 = 1.0 / (y2 * y2);
  const double E = std::exp(1.0 - inv4);
  const double t = 1.0 - y2;
  E2Parts r;
  r.a = 1.0 - x.x * x.x;
  r.b = t * E;
  r.db = -2.0 * y * E + t * 4.0 * inv4 / y * E;
  r.d2b = E * (-2.0 - 16.0 * inv4 + t * (16.0 * inv4 * inv4 / y2 - 20.0 * inv4 / y2));
  return r;
}

Problem make_e2(std::string name) {
  Problem p;
  p.name = std::move(name);
  p.u = [](Point x) {
    if (e2_flat(x.y)) return 0.0;
    const auto r = e2_parts(x);
    return 50.0 * r.a * r.b;
  };
  p.grad_u = [](Point x) {
    if (e2_flat(x.y)) return std::array<double, 2>{0.0, 0.0};
    const auto r = e2_parts(x);
    return std::array<double, 2>{50.0 * -2.0 * x.x * r.b, 50.0 * r.a * r.db};
  };
  p.f = [](Point x) {
    if (e2_flat(x.y)) return 0.0;
    const auto r = e2_parts(x);
    return -50.0 * (-2.0 * r.b + r.a * r.d2b);
  };
  return p;
}

void check_region(const Functional& J) {
  if (!(J.region.area() > 0.0)) {
    throw std::invalid_argument("functional " + J.name + ": region has zero area");
  }
}

template <class Integrand>
double masked_integral(const Functional& J, const Mesh& m, Integrand&& value_at) {
  const QuadratureRule& rule = triangle_quadrature(8);
  double sum = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const double jac = 2.0 * m.area(e);
    for (int q = 0; q < rule.size(); ++q) {
      const Point x = map_point(p, rule.points[q]);
      if (!J.region.contains(x)) continue;
      sum += rule.weights[q] * jac * value_at(e, q, x);
    }
  }
  return sum / J.region.area();
}

}  // namespace

std::vector<Problem> catalog() { return {make_e1(), make_e2("e2"), make_e3(), make_e2("e4")}; }

Problem problem_by_name(std::string_view name) {
  for (auto& p : catalog()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

Functional functional_by_name(std::string_view name) {
  if (name == "j1") return {"j1", {-1.0, 1.0, -1.0, 1.0}};
  if (name == "j2") return {"j2", {-1.0, 1.0, -0.05, 0.05}};
  if (name == "j3") return {"j3", {-0.5, 0.0, 0.7, 1.0}};
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

double eval_functional(const Functional& J, const ScalarField& u, const Mesh& m) {
  check_region(J);
  return masked_integral(J, m, [&](int, int, Point x) { return u(x); });
}

double eval_functional(const Functional& J, const Solution<double>& u) {
  check_region(J);
  const Tabulation& tab = tabulate(u.space.degree(), 8);
  return masked_integral(J, u.space.mesh(), [&](int e, int q, Point) {
    const auto dofs = u.space.dofs().element(e);
    double v = 0.0;
    for (int a = 0; a < tab.n_basis; ++a) v += u.coefficients[dofs[a]] * tab.value(q, a);
    return v;
  });
}

namespace {

double rule_on(const QuadratureRule& r, const std::array<Point, 3>& p, const ScalarField& u) {
  const double jac = std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) -
                              (p[2].x - p[0].x) * (p[1].y - p[0].y));
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q) s += r.weights[q] * u(map_point(p, r.points[q]));
  return s * jac;
}

double adaptive(const std::array<Point, 3>& p, const ScalarField& u, double tol_per_area, int depth) {
  const double q8 = rule_on(triangle_quadrature(8), p, u);
  const double q6 = rule_on(triangle_quadrature(6), p, u);
  const double area = 0.5 * std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) -
                                     (p[2].x - p[0].x) * (p[1].y - p[0].y));
  if (depth >= 24 || std::abs(q8 - q6) <= tol_per_area * area) return q8;
  const Point m01 = midpoint(p[0], p[1]), m12 = midpoint(p[1], p[2]), m20 = midpoint(p[2], p[0]);
  return adaptive({p[0], m01, m20}, u, tol_per_area, depth + 1) +
         adaptive({m01, p[1], m12}, u, tol_per_area, depth + 1) +
         adaptive({m20, m12, p[2]}, u, tol_per_area, depth + 1) +
         adaptive({m12, m20, m01}, u, tol_per_area, depth + 1);
}

}  // namespace

double integrate_average(const Functional& J, const ScalarField& u, double tol) {
  check_region(J);
  const Rect& r = J.region;
  const Point a{r.x0, r.y0}, b{r.x1, r.y0}, c{r.x1, r.y1}, d{r.x0, r.y1};
  const double s = adaptive({a, b, c}, u, tol, 0) + adaptive({a, c, d}, u, tol, 0);
  return s / r.area();
}

double functional_error(const Functional& J, const ScalarField& u_exact, const Solution<double>& u_h) {
  return eval_functional(J, u_exact, u_h.space.mesh()) - eval_functional(J, u_h);
}

}  // namespace mpdwr
