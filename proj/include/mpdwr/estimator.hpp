#pragma once

// Residual and dual-weighted indicators, and the orthogonality probes.

#include "mpdwr/fespace.hpp"
#include "mpdwr/problems.hpp"

#include <vector>

namespace mpdwr {

struct IndicatorField {
  std::vector<double> eta;  // per element, >= 0

  int size() const { return static_cast<int>(eta.size()); }
  /// (sum eta_K^2)^{1/2}
  double total() const;
};

/// eta_K^2 = h_K^2 |K| fbar_K^2 + 1/2 sum_{interior E of K} h_E \int_E [n . grad u_h]^2,
/// fbar_K the element mean of f (degree-4 rule). P1 only; binary64.
IndicatorField residual_indicator(const Solution<double>& u_h, const ScalarField& f);

/// a(u - u_h, v_h) evaluated as a(u, v_h) - a(u_h, v_h), both accumulated at
/// the precision of v_h with degree-8 quadrature and the exact gradient of u.
/// With v_h in binary64 this is the same-precision Galerkin residual; with v_h
/// stored at a lower precision the accumulation happens at that precision.
/// Throws std::invalid_argument if the two solutions live on different meshes.
template <Real R1, Real R2>
double galerkin_probe(const VectorField& grad_u, const Solution<R1>& u_h, const Solution<R2>& v_h);

/// (f, w) - a(u_h, w) in binary64 after promoting both fields. The load term
/// uses the load-vector rule, the bilinear term degree 8. Throws
/// std::invalid_argument on a mesh mismatch.
double estimate_je(const Solution<double>& u_h, const Solution<double>& w, const ScalarField& f);

/// eta_DWR,K = eta_K * ||w||_{L2(K)}.
IndicatorField dwr_indicator(const IndicatorField& res, const Solution<double>& w);

}  // namespace mpdwr
