#pragma once

// Lagrange finite element spaces of degree 1 and 2 over a Mesh.
//
// The DoF layout is pure combinatorics and is shared between spaces of
// different precision built on the same mesh; only the arithmetic applied to
// the layout changes with the precision.

#include "mpdwr/mesh.hpp"
#include "mpdwr/quadrature.hpp"
#include "mpdwr/scalar.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace mpdwr {

using ScalarField = std::function<double(Point)>;

struct DofMap {
  int degree = 1;
  int n_dofs = 0;
  int dofs_per_element = 3;
  /// Flat element -> global DoF table. Local order: the three vertices, then
  /// (degree 2) the midpoints of the edges opposite vertex 0, 1, 2.
  std::vector<int> element_dofs;
  std::vector<Point> dof_coords;
  std::vector<int> boundary_dofs;  // sorted

  std::span<const int> element(int e) const {
    return {element_dofs.data() + static_cast<std::size_t>(e) * dofs_per_element,
            static_cast<std::size_t>(dofs_per_element)};
  }

  bool operator==(const DofMap&) const = default;
};

/// Numbers vertices first, then edges in sorted endpoint order.
DofMap build_dof_map(const Mesh& m, int degree);

class FESpace {
 public:
  FESpace() = default;
  FESpace(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const DofMap> dofs, Precision p)
      : mesh_(std::move(mesh)), dofs_(std::move(dofs)), precision_(p) {}

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const DofMap& dofs() const { return *dofs_; }
  const std::shared_ptr<const DofMap>& dofs_ptr() const { return dofs_; }
  int degree() const { return dofs_->degree; }
  int n_dofs() const { return dofs_->n_dofs; }
  Precision precision() const { return precision_; }

  /// Same mesh, same DoF layout object, different arithmetic.
  FESpace with_precision(Precision p) const { return FESpace(mesh_, dofs_, p); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const DofMap> dofs_;
  Precision precision_ = Precision::Double;
};

/// Throws std::invalid_argument unless degree is 1 or 2.
FESpace build_space(std::shared_ptr<const Mesh> mesh, int degree, Precision p);

/// True if both spaces live on the same mesh (same object or equal contents).
bool same_mesh(const FESpace& a, const FESpace& b);

int basis_count(int degree);

/// Nodal basis on the reference triangle at (xi, eta).
void reference_basis(int degree, double xi, double eta, std::span<double> values,
                     std::span<std::array<double, 2>> grads);

/// Reference basis values and gradients at the points of a quadrature rule,
/// tabulated once in binary64.
struct Tabulation {
  int n_basis = 0;
  int n_points = 0;
  std::vector<double> values;                   // [q * n_basis + a]
  std::vector<std::array<double, 2>> grads;     // [q * n_basis + a]
  const QuadratureRule* rule = nullptr;

  double value(int q, int a) const { return values[q * n_basis + a]; }
  const std::array<double, 2>& grad(int q, int a) const { return grads[q * n_basis + a]; }
};

const Tabulation& tabulate(int degree, int quad_degree);

/// Affine map from the reference triangle, evaluated in precision T.
template <Real T>
struct AffineMap {
  T jxx, jxy, jyx, jyy;  // Jacobian columns (v1 - v0, v2 - v0)
  T det;

  static AffineMap from(const std::array<Point, 3>& p) {
    AffineMap m;
    const T x0 = round_to<T>(p[0].x), y0 = round_to<T>(p[0].y);
    const T x1 = round_to<T>(p[1].x), y1 = round_to<T>(p[1].y);
    const T x2 = round_to<T>(p[2].x), y2 = round_to<T>(p[2].y);
    m.jxx = x1 - x0;
    m.jxy = x2 - x0;
    m.jyx = y1 - y0;
    m.jyy = y2 - y0;
    m.det = m.jxx * m.jyy - m.jxy * m.jyx;
    return m;
  }

  /// Physical gradient J^{-T} g of a reference gradient g.
  std::array<T, 2> gradient(T gxi, T geta) const {
    return {(jyy * gxi - jyx * geta) / det, (jxx * geta - jxy * gxi) / det};
  }
};

inline Point map_point(const std::array<Point, 3>& p, const std::array<double, 3>& bary) {
  return {bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
          bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y};
}

/// Containing element and barycentric coordinates of x, or nullopt if x is
/// outside the mesh.
struct Location {
  int element = -1;
  std::array<double, 3> barycentric{};
};

std::optional<Location> locate(const Mesh& m, Point x);

/// u_h = sum_i U_i phi_i, coefficients stored at precision T.
template <Real T>
struct Solution {
  FESpace space;
  std::vector<T> coefficients;

  Precision precision() const { return precision_of<T>; }
};

using AnySolution = std::variant<Solution<half>, Solution<float>, Solution<double>>;

template <Real T>
Solution<T> zero_solution(const FESpace& space) {
  return {space.with_precision(precision_of<T>), std::vector<T>(space.n_dofs(), T(0))};
}

/// Rounds the coefficients to another precision on the same DoF layout.
template <Real To, Real From>
Solution<To> convert_solution(const Solution<From>& u) {
  Solution<To> out{u.space.with_precision(precision_of<To>), {}};
  out.coefficients.reserve(u.coefficients.size());
  for (From c : u.coefficients) out.coefficients.push_back(convert<To>(c));
  return out;
}

template <Real T>
Solution<double> promote(const Solution<T>& u) {
  return convert_solution<double>(u);
}

Solution<double> promote(const AnySolution& u);

/// U_i = round_to(g(x_i), T).
template <Real T>
Solution<T> interpolate(const FESpace& space, const ScalarField& g);

/// Evaluates u_h at x with arithmetic at the solution's precision. Throws
/// std::out_of_range if x is outside the domain.
template <Real T>
T eval(const Solution<T>& u, Point x);

/// Evaluates u_h and its gradient at reference point bary of element e, in
/// binary64.
double eval_in_element(const Solution<double>& u, int e, const std::array<double, 3>& bary);
std::array<double, 2> gradient_in_element(const Solution<double>& u, int e,
                                          const std::array<double, 3>& bary);

/// ||u - u_h||_{L2} with elementwise quadrature in binary64.
double l2_error(const Solution<double>& u, const ScalarField& exact, int quad_degree = 8);

/// ||u_h||_{L2(K)} for every element K.
std::vector<double> element_l2_norms(const Solution<double>& u, int quad_degree = 4);

/// Text export: header `n_dofs precision`, then one coefficient per line.
template <Real T>
void write_solution(std::ostream& os, const Solution<T>& u);

}  // namespace mpdwr
