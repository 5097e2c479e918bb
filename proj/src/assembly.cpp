#include "mpdwr/assembly.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <ostream>
#include <stdexcept>

namespace mpdwr {

SparsityPattern build_pattern(const DofMap& dofs) {
  SparsityPattern p;
  p.n = dofs.n_dofs;
  const int nb = dofs.dofs_per_element;
  const int ne = static_cast<int>(dofs.element_dofs.size()) / nb;

  std::vector<std::vector<int>> rows(p.n);
  for (int e = 0; e < ne; ++e) {
    const auto d = dofs.element(e);
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) rows[d[a]].push_back(d[b]);
    }
  }
  p.row_ptr.assign(p.n + 1, 0);
  for (int i = 0; i < p.n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    p.row_ptr[i + 1] = p.row_ptr[i] + static_cast<int>(r.size());
  }
  p.col.reserve(p.row_ptr[p.n]);
  for (auto& r : rows) p.col.insert(p.col.end(), r.begin(), r.end());

  p.scatter.resize(static_cast<std::size_t>(ne) * nb * nb);
  for (int e = 0; e < ne; ++e) {
    const auto d = dofs.element(e);
    for (int a = 0; a < nb; ++a) {
      const auto first = p.col.begin() + p.row_ptr[d[a]];
      const auto last = p.col.begin() + p.row_ptr[d[a] + 1];
      for (int b = 0; b < nb; ++b) {
        p.scatter[(static_cast<std::size_t>(e) * nb + a) * nb + b] =
            static_cast<int>(std::lower_bound(first, last, d[b]) - p.col.begin());
      }
    }
  }
  return p;
}

template <Real T>
T CsrMatrix<T>::at(int i, int j) const {
  const auto first = pattern->col.begin() + pattern->row_ptr[i];
  const auto last = pattern->col.begin() + pattern->row_ptr[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return T(0);
  return values[it - pattern->col.begin()];
}

template <Real T>
void CsrMatrix<T>::multiply(std::span<const T> x, std::span<T> y) const {
  const auto& rp = pattern->row_ptr;
  const auto& c = pattern->col;
  for (int i = 0; i < pattern->n; ++i) {
    T s = T(0);
    for (int k = rp[i]; k < rp[i + 1]; ++k) s = s + values[k] * x[c[k]];
    y[i] = s;
  }
}

template <Real T>
CsrMatrix<T> assemble_stiffness(const FESpace& space, std::shared_ptr<const SparsityPattern> pattern,
                                int quad_degree) {
  const Mesh& m = space.mesh();
  const Tabulation& tab = tabulate(space.degree(), quad_degree);
  const int nb = tab.n_basis;

  CsrMatrix<T> A;
  A.pattern = std::move(pattern);
  A.values.assign(A.pattern->col.size(), T(0));

  std::vector<T> w(tab.n_points);
  std::vector<T> ref_grad(2 * tab.grads.size());
  for (int q = 0; q < tab.n_points; ++q) w[q] = round_to<T>(tab.rule->weights[q]);
  for (std::size_t i = 0; i < tab.grads.size(); ++i) {
    ref_grad[2 * i] = round_to<T>(tab.grads[i][0]);
    ref_grad[2 * i + 1] = round_to<T>(tab.grads[i][1]);
  }

  std::vector<std::array<T, 2>> g(nb);
  std::vector<T> local(nb * nb);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto map = AffineMap<T>::from(m.corners(e));
    if (!(map.det > T(0))) {
      throw std::domain_error("assemble_stiffness: degenerate element " + std::to_string(e) +
                              " at " + std::string(to_string(precision_of<T>)) + " precision");
    }
    std::fill(local.begin(), local.end(), T(0));
    for (int q = 0; q < tab.n_points; ++q) {
      for (int a = 0; a < nb; ++a) {
        const std::size_t k = 2 * (static_cast<std::size_t>(q) * nb + a);
        g[a] = map.gradient(ref_grad[k], ref_grad[k + 1]);
      }
      const T wq = w[q] * map.det;
      for (int a = 0; a < nb; ++a) {
        for (int b = a; b < nb; ++b) {
          local[a * nb + b] = local[a * nb + b] + wq * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
        }
      }
    }
    const int* pos = A.pattern->scatter.data() + static_cast<std::size_t>(e) * nb * nb;
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        // Mirror the upper triangle so A_ij and A_ji receive identical bits.
        const T v = a <= b ? local[a * nb + b] : local[b * nb + a];
        A.values[pos[a * nb + b]] = A.values[pos[a * nb + b]] + v;
      }
    }
  }
  return A;
}

template <Real T>
CsrMatrix<T> assemble_stiffness(const FESpace& space, int quad_degree) {
  return assemble_stiffness<T>(space, std::make_shared<const SparsityPattern>(build_pattern(space.dofs())),
                               quad_degree);
}

template <Real T>
std::vector<T> assemble_load(const FESpace& space, const ScalarField& f, int quad_degree) {
  const Mesh& m = space.mesh();
  const Tabulation& tab = tabulate(space.degree(), quad_degree);
  std::vector<T> F(space.n_dofs(), T(0));
  std::vector<T> phi(tab.values.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = round_to<T>(tab.values[i]);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const auto map = AffineMap<T>::from(p);
    const auto dofs = space.dofs().element(e);
    for (int q = 0; q < tab.n_points; ++q) {
      const T fq = round_to<T>(f(map_point(p, tab.rule->points[q])));
      const T wq = round_to<T>(tab.rule->weights[q]) * map.det * fq;
      for (int a = 0; a < tab.n_basis; ++a) {
        F[dofs[a]] = F[dofs[a]] + wq * phi[q * tab.n_basis + a];
      }
    }
  }
  return F;
}

template <Real T>
std::vector<T> assemble_functional(const FESpace& space, const Functional& J) {
  const double area = J.region.area();
  if (!(area > 0.0)) throw std::invalid_argument("assemble_functional: region has zero area");
  const Mesh& m = space.mesh();
  const Tabulation& tab = tabulate(space.degree(), kFunctionalQuadrature);
  const T inv_area = round_to<T>(1.0 / area);
  std::vector<T> out(space.n_dofs(), T(0));
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    std::optional<AffineMap<T>> map;
    const auto dofs = space.dofs().element(e);
    for (int q = 0; q < tab.n_points; ++q) {
      if (!J.region.contains(map_point(p, tab.rule->points[q]))) continue;
      if (!map) map = AffineMap<T>::from(p);
      const T wq = round_to<T>(tab.rule->weights[q]) * map->det * inv_area;
      for (int a = 0; a < tab.n_basis; ++a) {
        out[dofs[a]] = out[dofs[a]] + wq * round_to<T>(tab.value(q, a));
      }
    }
  }
  return out;
}

template <Real T>
void apply_dirichlet(CsrMatrix<T>& A, std::span<T> rhs, std::span<const int> bdofs) {
  const int n = A.n();
  std::vector<char> fixed(n, 0);
  for (int i : bdofs) {
    if (i < 0 || i >= n) throw std::out_of_range("apply_dirichlet: DoF index out of range");
    fixed[i] = 1;
  }
  const auto& rp = A.pattern->row_ptr;
  const auto& c = A.pattern->col;
  for (int i = 0; i < n; ++i) {
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      if (fixed[i] || fixed[c[k]]) A.values[k] = (i == c[k]) ? T(1) : T(0);
    }
    if (fixed[i] && i < static_cast<int>(rhs.size())) rhs[i] = T(0);
  }
}

std::array<std::array<double, 3>, 3> p1_local_stiffness(const std::array<Point, 3>& p) {
  // K_ij = (e_i . e_j) / (4 |K|) with e_i the edge vector opposite vertex i.
  std::array<std::array<double, 2>, 3> ev;
  for (int i = 0; i < 3; ++i) {
    const Point& a = p[(i + 1) % 3];
    const Point& b = p[(i + 2) % 3];
    ev[i] = {b.x - a.x, b.y - a.y};
  }
  const double area = 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
  std::array<std::array<double, 3>, 3> K{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) K[i][j] = (ev[i][0] * ev[j][0] + ev[i][1] * ev[j][1]) / (4.0 * area);
  }
  return K;
}

template <Real T>
void write_matrix_market(std::ostream& os, const CsrMatrix<T>& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.n() << ' ' << A.n() << ' ' << A.nnz() << '\n';
  const auto old = os.precision(17);
  for (int i = 0; i < A.n(); ++i) {
    for (int k = A.pattern->row_ptr[i]; k < A.pattern->row_ptr[i + 1]; ++k) {
      os << i + 1 << ' ' << A.pattern->col[k] + 1 << ' ' << promote(A.values[k]) << '\n';
    }
  }
  os.precision(old);
}

#define MPDWR_INSTANTIATE(T)                                                                  \
  template struct CsrMatrix<T>;                                                               \
  template CsrMatrix<T> assemble_stiffness<T>(const FESpace&, int);                           \
  template CsrMatrix<T> assemble_stiffness<T>(const FESpace&,                                 \
                                              std::shared_ptr<const SparsityPattern>, int);   \
  template std::vector<T> assemble_load<T>(const FESpace&, const ScalarField&, int);          \
  template std::vector<T> assemble_functional<T>(const FESpace&, const Functional&);          \
  template void apply_dirichlet<T>(CsrMatrix<T>&, std::span<T>, std::span<const int>);        \
  template void write_matrix_market<T>(std::ostream&, const CsrMatrix<T>&);

MPDWR_INSTANTIATE(half)
MPDWR_INSTANTIATE(float)
MPDWR_INSTANTIATE(double)
#undef MPDWR_INSTANTIATE

}  // namespace mpdwr
