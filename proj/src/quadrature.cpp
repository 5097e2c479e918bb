#include "mpdwr/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpdwr {

namespace {

// Orbit builders for the S3 symmetry classes.
void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a, b});
  r.points.push_back({a, b, a});
  r.points.push_back({b, a, a});
  r.weights.insert(r.weights.end(), 3, w);
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  r.weights.insert(r.weights.end(), 6, w);
}

QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  r.exactness_degree = degree;
  switch (degree) {
    case 1:
      add_centroid(r, 0.5);
      break;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 3:  // Strang-Fix, one negative weight
      add_centroid(r, -0.28125);
      add_orbit3(r, 0.2, 25.0 / 96.0);
      break;
    case 4:
      add_orbit3(r, 0.091576213509770743460, 0.054975871827660933819);
      add_orbit3(r, 0.44594849091596488632, 0.11169079483900573285);
      break;
    case 5:
      add_centroid(r, 0.1125);
      add_orbit3(r, 0.10128650732345633880, 0.062969590272413576298);
      add_orbit3(r, 0.47014206410511508977, 0.066197076394253090369);
      break;
    case 6:
      add_orbit3(r, 0.063089014491502228340, 0.025422453185103408460);
      add_orbit3(r, 0.24928674517091042129, 0.058393137863189683013);
      add_orbit6(r, 0.053145049844816947353, 0.31035245103378440542, 0.041425537809186787597);
      break;
    case 8:
      add_centroid(r, 0.0721578038388935841255455552445323);
      add_orbit3(r, 0.170569307751760206622293501491464, 0.0516086852673591251408957751460645);
      add_orbit3(r, 0.0505472283170309754584235505965989, 0.0162292488115990401554629641708902);
      add_orbit3(r, 0.459292588292723156028815514494169, 0.0475458171336423123969480521942921);
      add_orbit6(r, 0.008394777409957605337213834539296, 0.263112829634638113421785786284643,
                 0.0136151570872174971324223450369544);
      break;
    default:
      throw std::invalid_argument("triangle_quadrature: unsupported exactness degree " +
                                  std::to_string(degree));
  }
  return r;
}

LineRule make_line(int n) {
  LineRule r;
  std::vector<double> x, w;  // on [-1, 1]
  switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3:
      x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default:
      throw std::invalid_argument("gauss_legendre: unsupported point count " + std::to_string(n));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.points.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

}  // namespace

const QuadratureRule& triangle_quadrature(int exactness_degree) {
  static const QuadratureRule rules[] = {make_rule(1), make_rule(2), make_rule(3), make_rule(4),
                                         make_rule(5), make_rule(6), make_rule(8)};
  switch (exactness_degree) {
    case 1: case 2: case 3: case 4: case 5: case 6: return rules[exactness_degree - 1];
    case 8: return rules[6];
    default: break;
  }
  throw std::invalid_argument("triangle_quadrature: unsupported exactness degree " +
                              std::to_string(exactness_degree));
}

const LineRule& gauss_legendre(int n) {
  static const LineRule rules[] = {make_line(1), make_line(2), make_line(3), make_line(4)};
  if (n < 1 || n > 4) throw std::invalid_argument("gauss_legendre: unsupported point count");
  return rules[n - 1];
}

}  // namespace mpdwr
