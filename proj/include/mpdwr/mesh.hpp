#pragma once

// Conforming triangulations of polygonal domains.
//
// Elements are stored as vertex triples (v0, v1, v2), counter-clockwise, with
// v0 the newest vertex: the refinement edge of an element is (v1, v2).
// Geometry is always binary64, whatever precision a finite element space
// built on the mesh computes in.

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace mpdwr {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

using Triangle = std::array<int, 3>;
using EdgeNodes = std::array<int, 2>;

struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> elements;
  std::vector<EdgeNodes> boundary_edges;
  std::vector<int> generation;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  /// Signed area of element e; positive for counter-clockwise elements.
  double signed_area(int e) const;
  double area(int e) const { return signed_area(e); }
  std::array<Point, 3> corners(int e) const;

  bool operator==(const Mesh&) const = default;
};

/// Edge structure derived from a mesh. Edges are sorted by (min, max)
/// endpoint index; `element_edges[e][i]` is the edge opposite local vertex i.
struct Topology {
  std::vector<EdgeNodes> edges;
  std::vector<std::array<int, 3>> element_edges;
  std::vector<std::array<int, 2>> edge_elements;  // -1 when absent

  int n_edges() const { return static_cast<int>(edges.size()); }
  /// Index of edge {a, b}, or -1.
  int find_edge(int a, int b) const;
};

Topology build_topology(const Mesh& m);

/// Geometric quantities of one element used by the residual estimator.
struct ElementGeometry {
  double diameter = 0.0;                       // h_K
  double area = 0.0;                           // |K|
  std::array<double, 3> edge_lengths{};        // h_E, edge opposite vertex i
  std::array<Point, 3> edge_normals{};         // outward unit normals
  std::array<int, 3> neighbors{-1, -1, -1};    // across edge i, -1 on the boundary
};

ElementGeometry element_geometry(const Mesh& m, const Topology& topo, int e);

/// Elements sharing an edge with e, plus e itself.
std::vector<int> edge_patch(const Topology& topo, int e);

/// 4x4 criss-cross triangulation of [-1,1]^2: 64 right isosceles triangles,
/// 41 vertices, newest vertex at the right angle.
Mesh unit_square_template();

/// Structured criss-cross mesh of a rectangle with nx*ny cells.
Mesh criss_cross(double x0, double x1, double y0, double y1, int nx, int ny);

/// [0,1]^2 split along the diagonal (0,0)-(1,1) into two triangles whose
/// refinement edge is the diagonal.
Mesh two_triangle_square();

/// Regular refinement: every triangle is split into four similar triangles
/// through its edge midpoints. New vertices are numbered after the old ones,
/// in edge order.
Mesh global_refine(const Mesh& m);

/// Result of a local refinement. `parent[k]` is the index of the element of
/// the input mesh that new element k descends from.
struct Refinement {
  Mesh mesh;
  std::vector<int> parent;
};

/// Newest-vertex bisection. Every marked element is bisected `generations`
/// times; the closure keeps the mesh conforming. Never coarsens.
Refinement bisect(const Mesh& m, std::span<const int> marked, int generations = 1);

Mesh bisect_marked(const Mesh& m, std::span<const int> marked, int generations = 1);

double min_element_volume(const Mesh& m);
double total_area(const Mesh& m);

/// Smallest interior angle over all elements, in radians.
double min_angle(const Mesh& m);

/// Checks the triangulation conditions: positive orientation, every edge
/// shared by one (boundary) or two (interior) elements, boundary edges
/// consistent with the edges that have a single element.
bool is_conforming(const Mesh& m);

/// Plain-text export: header `nv ne nb`, then `x y` vertex lines, `i j k`
/// element lines and `i j` boundary-edge lines, all 0-based.
void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

}  // namespace mpdwr
