#include "mpdwr/estimator.hpp"

#include "mpdwr/assembly.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mpdwr {

double IndicatorField::total() const {
  double s = 0.0;
  for (double v : eta) s += v * v;
  return std::sqrt(s);
}

IndicatorField residual_indicator(const Solution<double>& u_h, const ScalarField& f) {
  if (u_h.space.degree() != 1) {
    throw std::invalid_argument("residual_indicator: requires a degree-1 solution");
  }
  const Mesh& m = u_h.space.mesh();
  const Topology topo = build_topology(m);
  const QuadratureRule& rule = triangle_quadrature(4);
  constexpr std::array<double, 3> centroid{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  std::vector<std::array<double, 2>> grad(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) grad[e] = gradient_in_element(u_h, e, centroid);

  IndicatorField out;
  out.eta.resize(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const ElementGeometry geo = element_geometry(m, topo, e);
    double fbar = 0.0;
    for (int q = 0; q < rule.size(); ++q) fbar += rule.weights[q] * f(map_point(p, rule.points[q]));
    fbar *= 2.0;  // weights sum to 1/2
    double s = geo.diameter * geo.diameter * geo.area * fbar * fbar;
    // Gradients are elementwise constant, so the jump is constant along E and
    // its squared L2(E) norm is jump^2 * h_E.
    for (int i = 0; i < 3; ++i) {
      const int nb = geo.neighbors[i];
      if (nb < 0) continue;
      const Point& n = geo.edge_normals[i];
      const double jump = (grad[e][0] - grad[nb][0]) * n.x + (grad[e][1] - grad[nb][1]) * n.y;
      const double hE = geo.edge_lengths[i];
      s += 0.5 * hE * jump * jump * hE;
    }
    out.eta[e] = std::sqrt(s);
  }
  return out;
}

template <Real R1, Real R2>
double galerkin_probe(const VectorField& grad_u, const Solution<R1>& u_h, const Solution<R2>& v_h) {
  if (!same_mesh(u_h.space, v_h.space) || u_h.space.dofs() != v_h.space.dofs()) {
    throw std::invalid_argument("galerkin_probe: solutions live on different spaces");
  }
  const Mesh& m = v_h.space.mesh();
  const Tabulation& tab = tabulate(v_h.space.degree(), 8);
  const int nb = tab.n_basis;

  std::vector<R2> uh(u_h.coefficients.size());
  for (std::size_t i = 0; i < uh.size(); ++i) uh[i] = convert<R2>(u_h.coefficients[i]);

  R2 a_exact = R2(0), a_discrete = R2(0);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const auto map = AffineMap<R2>::from(p);
    const auto dofs = v_h.space.dofs().element(e);
    for (int q = 0; q < tab.n_points; ++q) {
      R2 gv[2] = {R2(0), R2(0)}, gu[2] = {R2(0), R2(0)};
      for (int a = 0; a < nb; ++a) {
        const auto& g = tab.grad(q, a);
        const auto d = map.gradient(round_to<R2>(g[0]), round_to<R2>(g[1]));
        const R2 cv = v_h.coefficients[dofs[a]], cu = uh[dofs[a]];
        gv[0] = gv[0] + cv * d[0];
        gv[1] = gv[1] + cv * d[1];
        gu[0] = gu[0] + cu * d[0];
        gu[1] = gu[1] + cu * d[1];
      }
      const auto ge = grad_u(map_point(p, tab.rule->points[q]));
      const R2 w = round_to<R2>(tab.rule->weights[q]) * map.det;
      a_exact = a_exact + w * (round_to<R2>(ge[0]) * gv[0] + round_to<R2>(ge[1]) * gv[1]);
      a_discrete = a_discrete + w * (gu[0] * gv[0] + gu[1] * gv[1]);
    }
  }
  return promote(a_exact) - promote(a_discrete);
}

double estimate_je(const Solution<double>& u_h, const Solution<double>& w, const ScalarField& f) {
  if (!same_mesh(u_h.space, w.space)) {
    throw std::invalid_argument("estimate_je: solutions live on different meshes");
  }
  const Mesh& m = w.space.mesh();
  // (f, w) with the rule of the discrete load vector, so that a dual from the
  // primal's own space reproduces the discrete Galerkin identity exactly.
  const Tabulation& tf = tabulate(w.space.degree(), kLoadQuadrature);
  const Tabulation& tw = tabulate(w.space.degree(), 8);
  const Tabulation& tu = tabulate(u_h.space.degree(), 8);
  double fw = 0.0, auw = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const auto map = AffineMap<double>::from(p);
    const auto dw = w.space.dofs().element(e);
    const auto du = u_h.space.dofs().element(e);
    for (int q = 0; q < tf.n_points; ++q) {
      double wv = 0.0;
      for (int a = 0; a < tf.n_basis; ++a) wv += w.coefficients[dw[a]] * tf.value(q, a);
      fw += tf.rule->weights[q] * map.det * f(map_point(p, tf.rule->points[q])) * wv;
    }
    for (int q = 0; q < tw.n_points; ++q) {
      double gw[2] = {0.0, 0.0}, gu[2] = {0.0, 0.0};
      for (int a = 0; a < tw.n_basis; ++a) {
        const auto& g = tw.grad(q, a);
        const auto d = map.gradient(g[0], g[1]);
        gw[0] += w.coefficients[dw[a]] * d[0];
        gw[1] += w.coefficients[dw[a]] * d[1];
      }
      for (int a = 0; a < tu.n_basis; ++a) {
        const auto& g = tu.grad(q, a);
        const auto d = map.gradient(g[0], g[1]);
        gu[0] += u_h.coefficients[du[a]] * d[0];
        gu[1] += u_h.coefficients[du[a]] * d[1];
      }
      auw += tw.rule->weights[q] * map.det * (gu[0] * gw[0] + gu[1] * gw[1]);
    }
  }
  return fw - auw;
}

IndicatorField dwr_indicator(const IndicatorField& res, const Solution<double>& w) {
  if (res.size() != w.space.mesh().n_elements()) {
    throw std::invalid_argument("dwr_indicator: indicator and weight live on different meshes");
  }
  const std::vector<double> wn = element_l2_norms(w, 4);
  IndicatorField out;
  out.eta.resize(res.eta.size());
  for (std::size_t k = 0; k < wn.size(); ++k) out.eta[k] = res.eta[k] * wn[k];
  return out;
}

#define MPDWR_PROBE(A, B) \
  template double galerkin_probe<A, B>(const VectorField&, const Solution<A>&, const Solution<B>&);
MPDWR_PROBE(double, double)
MPDWR_PROBE(double, float)
MPDWR_PROBE(double, half)
MPDWR_PROBE(float, float)
MPDWR_PROBE(float, double)
MPDWR_PROBE(half, half)
#undef MPDWR_PROBE

}  // namespace mpdwr
