#include "doctest.h"

#include "mpdwr/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mpdwr;

namespace {

// Five-point central differences with step h.
double fd_laplacian(const ScalarField& u, Point p, double h) {
  const double c = u(p);
  return (u({p.x + h, p.y}) + u({p.x - h, p.y}) + u({p.x, p.y + h}) + u({p.x, p.y - h}) - 4.0 * c) / (h * h);
}

// One Richardson step on steps h and h/2. The plain five-point stencil at
// h = 1e-4 still carries ~1e-4 truncation error where e3 bends sharply near
// x = 0.
double fd_laplacian4(const ScalarField& u, Point p, double h) {
  return (4.0 * fd_laplacian(u, p, 0.5 * h) - fd_laplacian(u, p, h)) / 3.0;
}

// Midpoint rule on an n x n grid of the region.
double midpoint_average(const Functional& J, const ScalarField& u, int n) {
  const Rect& r = J.region;
  const double hx = (r.x1 - r.x0) / n, hy = (r.y1 - r.y0) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += u({r.x0 + (i + 0.5) * hx, r.y0 + (j + 0.5) * hy});
    s += row;
  }
  return s / (static_cast<double>(n) * n);
}

}  // namespace

TEST_CASE("catalog") {
  const auto c = catalog();
  REQUIRE(c.size() == 4);
  CHECK(c[0].name == "e1");
  CHECK(c[2].name == "e3");
  CHECK(c[2].k == 4.0);
  CHECK(problem_by_name("e4").name == "e4");
  CHECK_THROWS_AS(problem_by_name("e9"), std::invalid_argument);
  CHECK_THROWS_AS(functional_by_name("j7"), std::invalid_argument);
  CHECK(functional_by_name("j1").region.area() == 4.0);
  CHECK(functional_by_name("j2").region.area() == doctest::Approx(0.2));
  CHECK(functional_by_name("j3").region.area() == doctest::Approx(0.15));
}

TEST_CASE("sources match finite differences of the exact solutions") {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> d(-0.999, 0.999);
  const double h = 1e-4;
  for (const Problem& p : catalog()) {
    int checked = 0;
    while (checked < 1000) {
      const Point x{d(gen), d(gen)};
      if ((p.name == "e2" || p.name == "e4") && std::fabs(x.y) < 0.1) continue;
      const double f = p.f(x);
      const double fd = -fd_laplacian4(p.u, x, h);
      INFO(p.name, " at (", x.x, ", ", x.y, ")");
      CHECK(std::fabs(f - fd) <= 1e-5 * std::max(std::fabs(f), 1.0));
      ++checked;
    }
  }
}

TEST_CASE("gradients match finite differences") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> d(-0.99, 0.99);
  const double h = 1e-6;
  for (const Problem& p : catalog()) {
    for (int k = 0; k < 200; ++k) {
      const Point x{d(gen), d(gen)};
      const auto g = p.grad_u(x);
      const double gx = (p.u({x.x + h, x.y}) - p.u({x.x - h, x.y})) / (2 * h);
      const double gy = (p.u({x.x, x.y + h}) - p.u({x.x, x.y - h})) / (2 * h);
      CHECK(g[0] == doctest::Approx(gx).epsilon(1e-6).scale(1.0));
      CHECK(g[1] == doctest::Approx(gy).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("exact solutions vanish on the boundary") {
  for (const Problem& p : catalog()) {
    for (double t = -1.0; t <= 1.0; t += 0.125) {
      CHECK(p.u({t, -1.0}) == doctest::Approx(0.0).scale(1.0));
      CHECK(p.u({t, 1.0}) == doctest::Approx(0.0).scale(1.0));
      CHECK(p.u({-1.0, t}) == doctest::Approx(0.0).scale(1.0));
      CHECK(p.u({1.0, t}) == doctest::Approx(0.0).scale(1.0));
    }
  }
}

TEST_CASE("u2 is finite and flat near y = 0") {
  const Problem p = problem_by_name("e2");
  for (double y : {0.0, 1e-300, 1e-80, 0.01, -0.01, 0.05}) {
    CHECK(std::isfinite(p.u({0.3, y})));
    CHECK(std::isfinite(p.f({0.3, y})));
    CHECK(std::fabs(p.u({0.3, y})) < 1e-100);
    CHECK(std::isfinite(p.grad_u({0.3, y})[1]));
  }
  CHECK(p.u({0.0, 0.0}) == 0.0);
  // Peak value: 50 * (1 - y^2) exp(1 - y^-4) at x = 0.
  const double y = 0.9;
  CHECK(p.u({0.0, y}) == doctest::Approx(50.0 * (1 - y * y) * std::exp(1 - std::pow(y, -4))));
}

TEST_CASE("region averages of constants and outside supports") {
  const Mesh m = unit_square_template();
  for (const char* name : {"j1", "j2", "j3"}) {
    CHECK(integrate_average(functional_by_name(name), [](Point) { return 2.5; }) == doctest::Approx(2.5).epsilon(1e-12));
  }
  // Masked quadrature is exact only where the region boundary follows element edges.
  CHECK(eval_functional(functional_by_name("j1"), [](Point) { return 2.5; }, m) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(eval_functional(Functional{"cell", Rect{-0.5, 0.0, 0.5, 1.0}}, [](Point) { return 2.5; }, m) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK(eval_functional(functional_by_name("j2"), [](Point) { return 2.5; }, m) != doctest::Approx(2.5).epsilon(1e-3));
  const Functional J3 = functional_by_name("j3");
  const ScalarField outside = [](Point p) { return p.y < 0.0 ? 1.0 : 0.0; };
  CHECK(integrate_average(J3, outside) == 0.0);
  CHECK(eval_functional(J3, outside, m) == 0.0);
  CHECK_THROWS_AS(eval_functional(Functional{"z", Rect{0, 0, 0, 1}}, outside, m), std::invalid_argument);
}

TEST_CASE("adaptive average against closed forms and a midpoint oracle") {
  // \int x^2 = 1/24 over [-0.5,0], \int y = 0.255 over [0.7,1], area 0.15.
  const Functional J3 = functional_by_name("j3");
  CHECK(integrate_average(J3, [](Point p) { return p.x * p.x * p.y; }) ==
        doctest::Approx((1.0 / 24.0) * 0.255 / 0.15).epsilon(1e-13));
  const Problem e3 = problem_by_name("e3");
  const Functional J1 = functional_by_name("j1");
  const double adaptive = integrate_average(J1, e3.u);
  CHECK(adaptive == doctest::Approx(midpoint_average(J1, e3.u, 400)).epsilon(1e-4));
  const Problem e2 = problem_by_name("e2");
  CHECK(integrate_average(J3, e2.u) == doctest::Approx(midpoint_average(J3, e2.u, 400)).epsilon(1e-5));
}

TEST_CASE("functional error of the interpolant shrinks under refinement") {
  const Problem e1 = problem_by_name("e1");
  const Functional J = functional_by_name("j3");
  double prev = INFINITY;
  Mesh m = unit_square_template();
  for (int level = 0; level < 3; ++level) {
    const FESpace s = build_space(std::make_shared<const Mesh>(m), 1, Precision::Double);
    const double err = std::fabs(functional_error(J, e1.u, interpolate<double>(s, e1.u)));
    CHECK(err < prev);
    prev = err;
    m = global_refine(m);
  }
  const FESpace s = build_space(std::make_shared<const Mesh>(m), 1, Precision::Double);
  const auto exact_coeffs = interpolate<double>(s, e1.u);
  CHECK(eval_functional(J, exact_coeffs) == doctest::Approx(eval_functional(J, e1.u, m)).epsilon(1e-2));
}
