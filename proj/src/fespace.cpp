#include "mpdwr/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mpdwr {

DofMap build_dof_map(const Mesh& m, int degree) {
  if (degree != 1 && degree != 2) {
    throw std::invalid_argument("build_space: degree must be 1 or 2");
  }
  DofMap d;
  d.degree = degree;
  d.dofs_per_element = degree == 1 ? 3 : 6;
  const int nv = m.n_vertices();
  const int ne = m.n_elements();
  d.dof_coords = m.vertices;

  std::vector<char> on_boundary(nv, 0);
  for (const auto& b : m.boundary_edges) on_boundary[b[0]] = on_boundary[b[1]] = 1;

  d.element_dofs.resize(static_cast<std::size_t>(ne) * d.dofs_per_element);
  if (degree == 1) {
    for (int e = 0; e < ne; ++e) {
      for (int i = 0; i < 3; ++i) d.element_dofs[3 * e + i] = m.elements[e][i];
    }
    d.n_dofs = nv;
  } else {
    const Topology topo = build_topology(m);
    for (int e = 0; e < ne; ++e) {
      for (int i = 0; i < 3; ++i) {
        d.element_dofs[6 * e + i] = m.elements[e][i];
        d.element_dofs[6 * e + 3 + i] = nv + topo.element_edges[e][i];
      }
    }
    d.n_dofs = nv + topo.n_edges();
    d.dof_coords.reserve(d.n_dofs);
    for (const auto& ed : topo.edges) {
      d.dof_coords.push_back(midpoint(m.vertices[ed[0]], m.vertices[ed[1]]));
    }
    on_boundary.resize(d.n_dofs, 0);
    for (const auto& b : m.boundary_edges) {
      const int k = topo.find_edge(b[0], b[1]);
      if (k >= 0) on_boundary[nv + k] = 1;
    }
  }
  for (int i = 0; i < d.n_dofs; ++i) {
    if (on_boundary[i]) d.boundary_dofs.push_back(i);
  }
  return d;
}

FESpace build_space(std::shared_ptr<const Mesh> mesh, int degree, Precision p) {
  auto dofs = std::make_shared<const DofMap>(build_dof_map(*mesh, degree));
  return FESpace(std::move(mesh), std::move(dofs), p);
}

bool same_mesh(const FESpace& a, const FESpace& b) {
  return a.mesh_ptr() == b.mesh_ptr() || a.mesh() == b.mesh();
}

int basis_count(int degree) {
  if (degree == 1) return 3;
  if (degree == 2) return 6;
  throw std::invalid_argument("basis_count: degree must be 1 or 2");
}

void reference_basis(int degree, double xi, double eta, std::span<double> values,
                     std::span<std::array<double, 2>> grads) {
  const double l[3] = {1.0 - xi - eta, xi, eta};
  static constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) {
      values[i] = l[i];
      grads[i] = {dl[i][0], dl[i][1]};
    }
    return;
  }
  if (degree != 2) throw std::invalid_argument("reference_basis: degree must be 1 or 2");
  for (int i = 0; i < 3; ++i) {
    values[i] = l[i] * (2.0 * l[i] - 1.0);
    const double s = 4.0 * l[i] - 1.0;
    grads[i] = {s * dl[i][0], s * dl[i][1]};
  }
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    values[3 + i] = 4.0 * l[j] * l[k];
    grads[3 + i] = {4.0 * (l[k] * dl[j][0] + l[j] * dl[k][0]),
                    4.0 * (l[k] * dl[j][1] + l[j] * dl[k][1])};
  }
}

namespace {

Tabulation make_tabulation(int degree, int quad_degree) {
  Tabulation t;
  t.rule = &triangle_quadrature(quad_degree);
  t.n_basis = basis_count(degree);
  t.n_points = t.rule->size();
  t.values.resize(static_cast<std::size_t>(t.n_basis) * t.n_points);
  t.grads.resize(t.values.size());
  for (int q = 0; q < t.n_points; ++q) {
    const auto& b = t.rule->points[q];
    reference_basis(degree, b[1], b[2],
                    std::span<double>(t.values).subspan(q * t.n_basis, t.n_basis),
                    std::span<std::array<double, 2>>(t.grads).subspan(q * t.n_basis, t.n_basis));
  }
  return t;
}

constexpr int kRuleDegrees[] = {1, 2, 3, 4, 5, 6, 8};

}  // namespace

const Tabulation& tabulate(int degree, int quad_degree) {
  static const auto tables = [] {
    std::vector<Tabulation> v;
    for (int d : {1, 2}) {
      for (int q : kRuleDegrees) v.push_back(make_tabulation(d, q));
    }
    return v;
  }();
  const int di = basis_count(degree) == 3 ? 0 : 1;
  const auto it = std::find(std::begin(kRuleDegrees), std::end(kRuleDegrees), quad_degree);
  if (it == std::end(kRuleDegrees)) {
    triangle_quadrature(quad_degree);  // throws with the usual message
  }
  return tables[di * std::size(kRuleDegrees) + (it - std::begin(kRuleDegrees))];
}

std::optional<Location> locate(const Mesh& m, Point x) {
  // Tolerant point-in-triangle test; the element with the least negative
  // barycentric coordinate wins so points on shared edges resolve.
  constexpr double slack = -1e-12;
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_bary{};
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    const double l1 = ((x.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (x.y - p[0].y)) / det;
    const double l2 = ((p[1].x - p[0].x) * (x.y - p[0].y) - (x.x - p[0].x) * (p[1].y - p[0].y)) / det;
    const std::array<double, 3> bary{1.0 - l1 - l2, l1, l2};
    const double mn = std::min({bary[0], bary[1], bary[2]});
    if (mn >= 0.0) return Location{e, bary};
    if (mn > best_min) {
      best_min = mn;
      best = e;
      best_bary = bary;
    }
  }
  if (best >= 0 && best_min >= slack) return Location{best, best_bary};
  return std::nullopt;
}

Solution<double> promote(const AnySolution& u) {
  return std::visit([](const auto& s) { return promote(s); }, u);
}

template <Real T>
Solution<T> interpolate(const FESpace& space, const ScalarField& g) {
  Solution<T> u{space.with_precision(precision_of<T>), {}};
  u.coefficients.reserve(space.n_dofs());
  for (const Point& x : space.dofs().dof_coords) u.coefficients.push_back(round_to<T>(g(x)));
  return u;
}

template <Real T>
T eval(const Solution<T>& u, Point x) {
  const auto loc = locate(u.space.mesh(), x);
  if (!loc) throw std::out_of_range("eval: point outside the domain");
  const int nb = basis_count(u.space.degree());
  double phi[6];
  std::array<double, 2> g[6];
  reference_basis(u.space.degree(), loc->barycentric[1], loc->barycentric[2],
                  std::span<double>(phi, nb), std::span<std::array<double, 2>>(g, nb));
  const auto dofs = u.space.dofs().element(loc->element);
  T acc = T(0);
  for (int a = 0; a < nb; ++a) acc = acc + u.coefficients[dofs[a]] * round_to<T>(phi[a]);
  return acc;
}

double eval_in_element(const Solution<double>& u, int e, const std::array<double, 3>& bary) {
  const int nb = basis_count(u.space.degree());
  double phi[6];
  std::array<double, 2> g[6];
  reference_basis(u.space.degree(), bary[1], bary[2], std::span<double>(phi, nb),
                  std::span<std::array<double, 2>>(g, nb));
  const auto dofs = u.space.dofs().element(e);
  double acc = 0.0;
  for (int a = 0; a < nb; ++a) acc += u.coefficients[dofs[a]] * phi[a];
  return acc;
}

std::array<double, 2> gradient_in_element(const Solution<double>& u, int e,
                                          const std::array<double, 3>& bary) {
  const int nb = basis_count(u.space.degree());
  double phi[6];
  std::array<double, 2> g[6];
  reference_basis(u.space.degree(), bary[1], bary[2], std::span<double>(phi, nb),
                  std::span<std::array<double, 2>>(g, nb));
  const auto map = AffineMap<double>::from(u.space.mesh().corners(e));
  const auto dofs = u.space.dofs().element(e);
  double gx = 0.0, gy = 0.0;
  for (int a = 0; a < nb; ++a) {
    const auto d = map.gradient(g[a][0], g[a][1]);
    gx += u.coefficients[dofs[a]] * d[0];
    gy += u.coefficients[dofs[a]] * d[1];
  }
  return {gx, gy};
}

double l2_error(const Solution<double>& u, const ScalarField& exact, int quad_degree) {
  const Mesh& m = u.space.mesh();
  const Tabulation& tab = tabulate(u.space.degree(), quad_degree);
  double sum = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const double jac = 2.0 * m.area(e);
    const auto dofs = u.space.dofs().element(e);
    for (int q = 0; q < tab.n_points; ++q) {
      double uh = 0.0;
      for (int a = 0; a < tab.n_basis; ++a) uh += u.coefficients[dofs[a]] * tab.value(q, a);
      const double d = exact(map_point(p, tab.rule->points[q])) - uh;
      sum += tab.rule->weights[q] * jac * d * d;
    }
  }
  return std::sqrt(sum);
}

std::vector<double> element_l2_norms(const Solution<double>& u, int quad_degree) {
  const Mesh& m = u.space.mesh();
  const Tabulation& tab = tabulate(u.space.degree(), quad_degree);
  std::vector<double> out(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) {
    const double jac = 2.0 * m.area(e);
    const auto dofs = u.space.dofs().element(e);
    double s = 0.0;
    for (int q = 0; q < tab.n_points; ++q) {
      double uh = 0.0;
      for (int a = 0; a < tab.n_basis; ++a) uh += u.coefficients[dofs[a]] * tab.value(q, a);
      s += tab.rule->weights[q] * jac * uh * uh;
    }
    out[e] = std::sqrt(s);
  }
  return out;
}

template <Real T>
void write_solution(std::ostream& os, const Solution<T>& u) {
  os << u.coefficients.size() << ' ' << to_string(precision_of<T>) << '\n';
  const auto old = os.precision(17);
  for (T c : u.coefficients) os << promote(c) << '\n';
  os.precision(old);
}

#define MPDWR_INSTANTIATE(T)                                                  \
  template Solution<T> interpolate<T>(const FESpace&, const ScalarField&);   \
  template T eval<T>(const Solution<T>&, Point);                              \
  template void write_solution<T>(std::ostream&, const Solution<T>&);

MPDWR_INSTANTIATE(half)
MPDWR_INSTANTIATE(float)
MPDWR_INSTANTIATE(double)
#undef MPDWR_INSTANTIATE

}  // namespace mpdwr
