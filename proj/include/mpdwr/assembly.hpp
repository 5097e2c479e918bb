#pragma once

// Stiffness, load and functional assembly at the precision of the space.

#include "mpdwr/fespace.hpp"
#include "mpdwr/problems.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace mpdwr {

inline constexpr int kStiffnessQuadrature = 4;
inline constexpr int kLoadQuadrature = 4;
inline constexpr int kFunctionalQuadrature = 8;

/// CSR structure of a DoF map plus, for every element, the position of each
/// local (a, b) pair in the value array.
struct SparsityPattern {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<int> scatter;  // [e * nb * nb + a * nb + b]
};

SparsityPattern build_pattern(const DofMap& dofs);

template <Real T>
struct CsrMatrix {
  std::shared_ptr<const SparsityPattern> pattern;
  std::vector<T> values;

  int n() const { return pattern->n; }
  std::size_t nnz() const { return values.size(); }
  /// Entry (i, j), zero if structurally absent.
  T at(int i, int j) const;
  /// y = A x, row by row, column-ascending.
  void multiply(std::span<const T> x, std::span<T> y) const;
};

/// A_ij = sum_K \int_K grad phi_j . grad phi_i with all arithmetic at T.
/// Throws std::domain_error on an element whose Jacobian determinant is not
/// positive at T.
template <Real T>
CsrMatrix<T> assemble_stiffness(const FESpace& space, int quad_degree = kStiffnessQuadrature);

template <Real T>
CsrMatrix<T> assemble_stiffness(const FESpace& space, std::shared_ptr<const SparsityPattern> pattern,
                                int quad_degree = kStiffnessQuadrature);

/// F_i = (f, phi_i) at T.
template <Real T>
std::vector<T> assemble_load(const FESpace& space, const ScalarField& f,
                             int quad_degree = kLoadQuadrature);

/// J_i = |R|^{-1} \int_R phi_i, characteristic-function quadrature at T.
template <Real T>
std::vector<T> assemble_functional(const FESpace& space, const Functional& J);

/// Symmetric elimination of the listed DoFs: rows and columns zeroed, unit
/// diagonal, zero right-hand side.
template <Real T>
void apply_dirichlet(CsrMatrix<T>& A, std::span<T> rhs, std::span<const int> bdofs);

/// Local P1 stiffness of one triangle, binary64; used as a test oracle.
std::array<std::array<double, 3>, 3> p1_local_stiffness(const std::array<Point, 3>& p);

template <Real T>
void write_matrix_market(std::ostream& os, const CsrMatrix<T>& A);

}  // namespace mpdwr
