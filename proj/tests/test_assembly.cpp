#include "doctest.h"

#include "mpdwr/assembly.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mpdwr;

namespace {

std::shared_ptr<const Mesh> single(Point a, Point b, Point c) {
  Mesh m;
  m.vertices = {a, b, c};
  m.elements = {{0, 1, 2}};
  m.boundary_edges = {{0, 1}, {1, 2}, {2, 0}};
  m.generation = {0};
  return std::make_shared<const Mesh>(std::move(m));
}

std::shared_ptr<const Mesh> square(int refinements = 0) {
  Mesh m = unit_square_template();
  for (int k = 0; k < refinements; ++k) m = global_refine(m);
  return std::make_shared<const Mesh>(std::move(m));
}

template <Real T>
double energy(const CsrMatrix<T>& A, const std::vector<double>& x) {
  double s = 0.0;
  for (int i = 0; i < A.n(); ++i) {
    for (int k = A.pattern->row_ptr[i]; k < A.pattern->row_ptr[i + 1]; ++k) {
      s += x[i] * promote(A.values[k]) * x[A.pattern->col[k]];
    }
  }
  return s;
}

}  // namespace

TEST_CASE("P1 stiffness of the reference triangle by hand") {
  const auto m = single({0, 0}, {1, 0}, {0, 1});
  const auto A = assemble_stiffness<double>(build_space(m, 1, Precision::Double));
  const double K[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(A.at(i, j) == doctest::Approx(K[i][j]));
  }
  const auto oracle = p1_local_stiffness(m->corners(0));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(oracle[i][j] == doctest::Approx(K[i][j]));
  }
}

TEST_CASE("P1 stiffness agrees with the edge-vector formula on random triangles") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    Point a{d(gen), d(gen)}, b{d(gen), d(gen)}, c{d(gen), d(gen)};
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (std::fabs(det) < 1e-2) continue;
    if (det < 0) std::swap(b, c);
    const auto m = single(a, b, c);
    const auto A = assemble_stiffness<double>(build_space(m, 1, Precision::Double));
    const auto K = p1_local_stiffness(m->corners(0));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(A.at(i, j) == doctest::Approx(K[i][j]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("assembled stiffness is symmetric with zero row sums") {
  const auto m = square(1);
  for (int deg : {1, 2}) {
    const FESpace s = build_space(m, deg, Precision::Double);
    const auto A = assemble_stiffness<double>(s);
    for (int i = 0; i < A.n(); ++i) {
      double row = 0.0;
      for (int k = A.pattern->row_ptr[i]; k < A.pattern->row_ptr[i + 1]; ++k) {
        const int j = A.pattern->col[k];
        CHECK(A.values[k] == A.at(j, i));
        row += A.values[k];
      }
      CHECK(row == doctest::Approx(0.0).scale(1.0));
    }
  }
}

TEST_CASE("float and half stiffness are bitwise symmetric") {
  const auto m = square(1);
  const FESpace s = build_space(m, 2, Precision::Single);
  const auto Af = assemble_stiffness<float>(s);
  const auto Ah = assemble_stiffness<half>(s.with_precision(Precision::Half));
  for (int i = 0; i < Af.n(); ++i) {
    for (int k = Af.pattern->row_ptr[i]; k < Af.pattern->row_ptr[i + 1]; ++k) {
      const int j = Af.pattern->col[k];
      CHECK(Af.values[k] == Af.at(j, i));
      CHECK(Ah.values[k] == Ah.at(j, i));
    }
  }
}

TEST_CASE("energy of interpolated quadratics is exact") {
  // u = x^2 + x y on [-1,1]^2: |grad u|^2 = (2x + y)^2 + x^2, integral 8.
  const auto m = square();
  const FESpace p2 = build_space(m, 2, Precision::Double);
  std::vector<double> u(p2.n_dofs());
  for (int i = 0; i < p2.n_dofs(); ++i) {
    const Point p = p2.dofs().dof_coords[i];
    u[i] = p.x * p.x + p.x * p.y;
  }
  CHECK(energy(assemble_stiffness<double>(p2), u) == doctest::Approx(8.0).epsilon(1e-13));
  // Single precision loses about eps_single relative.
  CHECK(energy(assemble_stiffness<float>(p2.with_precision(Precision::Single)), u) ==
        doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("reduced-precision entries are close to binary64") {
  const auto m = square(1);
  const FESpace s = build_space(m, 1, Precision::Double);
  const auto Ad = assemble_stiffness<double>(s);
  const auto Af = assemble_stiffness<float>(s.with_precision(Precision::Single));
  const auto Ah = assemble_stiffness<half>(s.with_precision(Precision::Half));
  for (std::size_t k = 0; k < Ad.values.size(); ++k) {
    CHECK(std::fabs(promote(Af.values[k]) - Ad.values[k]) <= 8 * epsilon(Precision::Single));
    CHECK(std::fabs(promote(Ah.values[k]) - Ad.values[k]) <= 8 * epsilon(Precision::Half));
  }
}

TEST_CASE("degenerate element at half precision") {
  const auto m = single({1.0, 1.0}, {1.0 + 1e-4, 1.0}, {1.0, 1.0 + 1e-4});
  CHECK(m->area(0) > 0.0);
  const FESpace s = build_space(m, 1, Precision::Half);
  CHECK_THROWS_AS(assemble_stiffness<half>(s), std::domain_error);
  CHECK_NOTHROW(assemble_stiffness<float>(s.with_precision(Precision::Single)));
}

TEST_CASE("load vector") {
  const auto m = square(1);
  for (int deg : {1, 2}) {
    const FESpace s = build_space(m, deg, Precision::Double);
    const auto F = assemble_load<double>(s, [](Point) { return 1.0; });
    double sum = 0.0;
    for (double v : F) sum += v;
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-14));
    // (f, u_h) for u_h = x and f = x: \int x^2 = 4/3.
    const auto Fx = assemble_load<double>(s, [](Point p) { return p.x; });
    double fu = 0.0;
    for (int i = 0; i < s.n_dofs(); ++i) fu += Fx[i] * s.dofs().dof_coords[i].x;
    CHECK(fu == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  }
  const FESpace sf = build_space(m, 1, Precision::Single);
  const auto Ff = assemble_load<float>(sf, [](Point p) { return std::cos(p.x); });
  const auto Fd = assemble_load<double>(sf.with_precision(Precision::Double), [](Point p) { return std::cos(p.x); });
  for (std::size_t i = 0; i < Ff.size(); ++i) CHECK(promote(Ff[i]) == doctest::Approx(Fd[i]).epsilon(1e-5));
}

TEST_CASE("functional vector") {
  const auto m = square(1);
  const FESpace s = build_space(m, 1, Precision::Double);
  const Functional whole{"whole", Rect{}};
  const Functional aligned{"aligned", Rect{-0.5, 0.0, 0.5, 1.0}};
  for (const auto& J : {whole, aligned}) {
    const auto g = assemble_functional<double>(s, J);
    double sum = 0.0;
    for (double v : g) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Average of u = x over the aligned region is -0.25.
  const auto g = assemble_functional<double>(s, aligned);
  double jx = 0.0;
  for (int i = 0; i < s.n_dofs(); ++i) jx += g[i] * s.dofs().dof_coords[i].x;
  CHECK(jx == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK_THROWS_AS(assemble_functional<double>(s, Functional{"flat", Rect{0, 0, 0, 1}}), std::invalid_argument);
}

TEST_CASE("Dirichlet elimination") {
  const auto m = square();
  const FESpace s = build_space(m, 1, Precision::Double);
  auto A = assemble_stiffness<double>(s);
  std::vector<double> b(s.n_dofs(), 1.0);
  const auto& bd = s.dofs().boundary_dofs;
  apply_dirichlet<double>(A, b, bd);
  std::vector<char> is_b(s.n_dofs(), 0);
  for (int i : bd) is_b[i] = 1;
  for (int i = 0; i < A.n(); ++i) {
    for (int k = A.pattern->row_ptr[i]; k < A.pattern->row_ptr[i + 1]; ++k) {
      const int j = A.pattern->col[k];
      if (is_b[i] || is_b[j]) CHECK(A.values[k] == (i == j ? 1.0 : 0.0));
    }
    CHECK(b[i] == (is_b[i] ? 0.0 : 1.0));
  }
  const std::vector<int> bad{1000};
  CHECK_THROWS_AS(apply_dirichlet<double>(A, b, bad), std::out_of_range);
}

TEST_CASE("pattern scatter and matrix-vector product") {
  const auto m = square();
  const FESpace s = build_space(m, 2, Precision::Double);
  const auto A = assemble_stiffness<double>(s);
  CHECK(A.pattern->scatter.size() == static_cast<std::size_t>(m->n_elements()) * 36);
  std::vector<double> one(A.n(), 1.0), y(A.n());
  A.multiply(one, y);
  for (double v : y) CHECK(v == doctest::Approx(0.0).scale(1.0));
  CHECK(A.at(0, A.n() - 1) == 0.0);
}

TEST_CASE("Matrix Market export") {
  const auto A = assemble_stiffness<float>(build_space(single({0, 0}, {1, 0}, {0, 1}), 1, Precision::Single));
  std::stringstream ss;
  write_matrix_market(ss, A);
  std::string banner;
  std::getline(ss, banner);
  CHECK(banner == "%%MatrixMarket matrix coordinate real general");
  int r = 0, c = 0, nnz = 0;
  ss >> r >> c >> nnz;
  CHECK(r == 3);
  CHECK(nnz == 9);
}
