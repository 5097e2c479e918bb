#include "doctest.h"

#include "mpdwr/mesh.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace mpdwr;

namespace {

int euler(const Mesh& m) {
  const Topology t = build_topology(m);
  return m.n_vertices() - t.n_edges() + m.n_elements();
}

std::vector<int> all_elements(const Mesh& m) {
  std::vector<int> v(m.n_elements());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("criss-cross template") {
  const Mesh m = unit_square_template();
  CHECK(m.n_elements() == 64);
  CHECK(m.n_vertices() == 41);
  CHECK(m.boundary_edges.size() == 16);
  CHECK(total_area(m) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(min_element_volume(m) == doctest::Approx(0.0625));
  CHECK(min_angle(m) == doctest::Approx(std::numbers::pi / 4));
  CHECK(is_conforming(m));
  CHECK(euler(m) == 1);
  for (int e = 0; e < m.n_elements(); ++e) CHECK(m.signed_area(e) > 0.0);
}

TEST_CASE("newest vertex sits at the right angle of the template") {
  const Mesh m = unit_square_template();
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const double dot = (p[1].x - p[0].x) * (p[2].x - p[0].x) + (p[1].y - p[0].y) * (p[2].y - p[0].y);
    CHECK(dot == doctest::Approx(0.0));
  }
}

TEST_CASE("topology of a two-triangle square") {
  const Mesh m = two_triangle_square();
  CHECK(m.n_elements() == 2);
  const Topology t = build_topology(m);
  CHECK(t.n_edges() == 5);
  for (std::size_t k = 1; k < t.edges.size(); ++k) CHECK(t.edges[k - 1] < t.edges[k]);
  // The diagonal is the refinement edge of both triangles, so it is the edge
  // opposite local vertex 0 in each.
  const int diag0 = t.element_edges[0][0];
  CHECK(diag0 == t.element_edges[1][0]);
  CHECK(t.edge_elements[diag0][1] >= 0);
  CHECK(t.find_edge(t.edges[diag0][1], t.edges[diag0][0]) == diag0);
  CHECK(t.find_edge(0, 0) == -1);

  const ElementGeometry g = element_geometry(m, t, 0);
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.neighbors[0] == 1);
  CHECK(g.neighbors[1] == -1);
  for (int i = 0; i < 3; ++i) CHECK(std::hypot(g.edge_normals[i].x, g.edge_normals[i].y) == doctest::Approx(1.0));
  CHECK(edge_patch(t, 0).size() == 2);
}

TEST_CASE("outward normals point away from the centroid") {
  const Mesh m = unit_square_template();
  const Topology t = build_topology(m);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    const ElementGeometry g = element_geometry(m, t, e);
    const Point c{(p[0].x + p[1].x + p[2].x) / 3, (p[0].y + p[1].y + p[2].y) / 3};
    for (int i = 0; i < 3; ++i) {
      const Point mid = midpoint(p[(i + 1) % 3], p[(i + 2) % 3]);
      CHECK((mid.x - c.x) * g.edge_normals[i].x + (mid.y - c.y) * g.edge_normals[i].y > 0.0);
    }
  }
}

TEST_CASE("global refinement keeps old vertices and quarters areas") {
  const Mesh m = unit_square_template();
  const Mesh r = global_refine(m);
  CHECK(r.n_elements() == 4 * m.n_elements());
  CHECK(r.n_vertices() == m.n_vertices() + build_topology(m).n_edges());
  for (int v = 0; v < m.n_vertices(); ++v) CHECK(r.vertices[v] == m.vertices[v]);
  CHECK(min_element_volume(r) == doctest::Approx(min_element_volume(m) / 4));
  CHECK(total_area(r) == doctest::Approx(4.0));
  CHECK(is_conforming(r));
  CHECK(euler(r) == 1);
  CHECK(r.boundary_edges.size() == 2 * m.boundary_edges.size());
}

TEST_CASE("bisection of the two-triangle square") {
  const Mesh m = two_triangle_square();
  const std::vector<int> marked{0};
  // The refinement edge is shared, so one bisection of element 0 forces the
  // neighbour too.
  CHECK(bisect_marked(m, marked, 1).n_elements() == 4);
  // The second generation splits the two children of element 0; each split
  // edge is on the boundary, so no closure is needed.
  const Mesh m2 = bisect_marked(m, marked, 2);
  CHECK(m2.n_elements() == 6);
  CHECK(is_conforming(m2));
  CHECK(total_area(m2) == doctest::Approx(1.0));
}

TEST_CASE("bisection closure keeps the mesh conforming") {
  Mesh m = unit_square_template();
  std::mt19937 gen(11);
  for (int step = 0; step < 12; ++step) {
    std::uniform_int_distribution<int> pick(0, m.n_elements() - 1);
    std::set<int> s;
    for (int k = 0; k < 1 + m.n_elements() / 10; ++k) s.insert(pick(gen));
    const std::vector<int> marked(s.begin(), s.end());
    const Refinement r = bisect(m, marked, 1 + step % 2);
    CHECK(r.mesh.n_elements() > m.n_elements());
    CHECK(r.parent.size() == r.mesh.elements.size());
    // Children exactly tile their parent.
    std::vector<double> child_area(m.n_elements(), 0.0);
    for (int k = 0; k < r.mesh.n_elements(); ++k) child_area[r.parent[k]] += r.mesh.area(k);
    for (int e = 0; e < m.n_elements(); ++e) CHECK(child_area[e] == doctest::Approx(m.area(e)).epsilon(1e-12));
    for (int e : marked) CHECK(child_area[e] > 0.0);
    m = r.mesh;
    REQUIRE(is_conforming(m));
    CHECK(euler(m) == 1);
    // Bisection of right isosceles triangles through the right angle only
    // ever produces right isosceles triangles.
    CHECK(min_angle(m) == doctest::Approx(std::numbers::pi / 4));
  }
}

TEST_CASE("marked elements shrink by 2^generations") {
  const Mesh m = unit_square_template();
  const std::vector<int> marked{5};
  for (int g = 1; g <= 4; ++g) {
    const Refinement r = bisect(m, marked, g);
    double smallest = INFINITY;
    for (int k = 0; k < r.mesh.n_elements(); ++k) {
      if (r.parent[k] == 5) smallest = std::min(smallest, r.mesh.area(k));
    }
    CHECK(smallest == doctest::Approx(m.area(5) / std::ldexp(1.0, g)));
  }
  CHECK(bisect_marked(m, {}, 1) == m);
}

TEST_CASE("uniform bisection twice equals the area of one red refinement") {
  const Mesh m = unit_square_template();
  const Mesh b = bisect_marked(m, all_elements(m), 2);
  CHECK(b.n_elements() == 4 * m.n_elements());
  CHECK(min_element_volume(b) == doctest::Approx(min_element_volume(global_refine(m))));
}

TEST_CASE("mesh text round trip") {
  const Mesh m = bisect_marked(unit_square_template(), std::vector<int>{0, 7, 33}, 1);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  CHECK(r.vertices == m.vertices);
  CHECK(r.elements == m.elements);
  CHECK(r.boundary_edges == m.boundary_edges);
}

TEST_CASE("non-conforming inputs are rejected") {
  Mesh m = two_triangle_square();
  CHECK(is_conforming(m));
  std::swap(m.elements[0][1], m.elements[0][2]);
  CHECK_FALSE(is_conforming(m));
  Mesh h = two_triangle_square();
  h.vertices.push_back({0.5, 0.5});
  h.elements[1] = {h.elements[1][0], h.elements[1][1], 4};
  CHECK_FALSE(is_conforming(h));
}
