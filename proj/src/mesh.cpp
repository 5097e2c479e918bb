#include "mpdwr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace mpdwr {

namespace {

EdgeNodes sorted(int a, int b) { return a < b ? EdgeNodes{a, b} : EdgeNodes{b, a}; }

double dist(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

double Mesh::signed_area(int e) const {
  const auto& t = elements[e];
  const Point a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::array<Point, 3> Mesh::corners(int e) const {
  const auto& t = elements[e];
  return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
}

int Topology::find_edge(int a, int b) const {
  const EdgeNodes key = sorted(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

Topology build_topology(const Mesh& m) {
  struct Entry {
    EdgeNodes nodes;
    int element;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(3 * m.elements.size());
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto& t = m.elements[e];
    for (int i = 0; i < 3; ++i) {
      entries.push_back({sorted(t[(i + 1) % 3], t[(i + 2) % 3]), e, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.nodes, a.element) < std::tie(b.nodes, b.element);
  });

  Topology topo;
  topo.element_edges.assign(m.elements.size(), {-1, -1, -1});
  for (const auto& en : entries) {
    if (topo.edges.empty() || topo.edges.back() != en.nodes) {
      topo.edges.push_back(en.nodes);
      topo.edge_elements.push_back({-1, -1});
    }
    const int id = topo.n_edges() - 1;
    auto& adj = topo.edge_elements[id];
    if (adj[0] < 0) {
      adj[0] = en.element;
    } else if (adj[1] < 0) {
      adj[1] = en.element;
    } else {
      throw std::runtime_error("build_topology: edge shared by more than two elements");
    }
    topo.element_edges[en.element][en.local] = id;
  }
  return topo;
}

ElementGeometry element_geometry(const Mesh& m, const Topology& topo, int e) {
  ElementGeometry g;
  const auto p = m.corners(e);
  g.area = m.area(e);
  for (int i = 0; i < 3; ++i) {
    const Point a = p[(i + 1) % 3], b = p[(i + 2) % 3];
    const double len = dist(a, b);
    g.edge_lengths[i] = len;
    g.edge_normals[i] = {(b.y - a.y) / len, -(b.x - a.x) / len};
    g.diameter = std::max(g.diameter, len);
    const auto& adj = topo.edge_elements[topo.element_edges[e][i]];
    g.neighbors[i] = adj[0] == e ? adj[1] : adj[0];
  }
  return g;
}

std::vector<int> edge_patch(const Topology& topo, int e) {
  std::vector<int> patch{e};
  for (int edge : topo.element_edges[e]) {
    for (int k : topo.edge_elements[edge]) {
      if (k >= 0 && k != e) patch.push_back(k);
    }
  }
  return patch;
}

Mesh criss_cross(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) {
    throw std::invalid_argument("criss_cross: invalid extent or cell counts");
  }
  Mesh m;
  const auto grid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
    }
  }
  const int n_grid = (nx + 1) * (ny + 1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = grid(i, j), b = grid(i + 1, j), c = grid(i + 1, j + 1), d = grid(i, j + 1);
      const int center = n_grid + j * nx + i;
      m.vertices.push_back(midpoint(m.vertices[a], m.vertices[c]));
      m.elements.push_back({center, a, b});
      m.elements.push_back({center, b, c});
      m.elements.push_back({center, c, d});
      m.elements.push_back({center, d, a});
    }
  }
  for (int i = 0; i < nx; ++i) m.boundary_edges.push_back({grid(i, 0), grid(i + 1, 0)});
  for (int j = 0; j < ny; ++j) m.boundary_edges.push_back({grid(nx, j), grid(nx, j + 1)});
  for (int i = nx; i > 0; --i) m.boundary_edges.push_back({grid(i, ny), grid(i - 1, ny)});
  for (int j = ny; j > 0; --j) m.boundary_edges.push_back({grid(0, j), grid(0, j - 1)});
  m.generation.assign(m.elements.size(), 0);
  return m;
}

Mesh unit_square_template() { return criss_cross(-1.0, 1.0, -1.0, 1.0, 4, 4); }

Mesh two_triangle_square() {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  m.elements = {{1, 2, 0}, {3, 0, 2}};
  m.boundary_edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  m.generation = {0, 0};
  return m;
}

Mesh global_refine(const Mesh& m) {
  const Topology topo = build_topology(m);
  Mesh out;
  out.vertices = m.vertices;
  out.vertices.reserve(m.vertices.size() + topo.edges.size());
  for (const auto& ed : topo.edges) out.vertices.push_back(midpoint(m.vertices[ed[0]], m.vertices[ed[1]]));
  const int nv = m.n_vertices();

  out.elements.reserve(4 * m.elements.size());
  out.generation.reserve(4 * m.elements.size());
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto [p1, p2, p3] = m.elements[e];
    const auto& ee = topo.element_edges[e];
    const int m23 = nv + ee[0], m31 = nv + ee[1], m12 = nv + ee[2];
    // Each child is the image of the parent under a homothety, so it keeps
    // the parent's vertex labelling (and therefore its refinement edge).
    out.elements.push_back({p1, m12, m31});
    out.elements.push_back({m12, p2, m23});
    out.elements.push_back({m31, m23, p3});
    out.elements.push_back({m23, m31, m12});
    const int g = m.generation.empty() ? 0 : m.generation[e];
    out.generation.insert(out.generation.end(), 4, g + 2);
  }
  for (const auto& [a, b] : m.boundary_edges) {
    const int mid = nv + topo.find_edge(a, b);
    out.boundary_edges.push_back({a, mid});
    out.boundary_edges.push_back({mid, b});
  }
  return out;
}

namespace {

// One pass of newest-vertex bisection.
Refinement bisect_once(const Mesh& m, std::span<const int> marked) {
  const Topology topo = build_topology(m);
  std::vector<char> cut(topo.edges.size(), 0);
  for (int e : marked) {
    if (e < 0 || e >= m.n_elements()) throw std::out_of_range("bisect: marked element out of range");
    cut[topo.element_edges[e][0]] = 1;
  }
  if (std::none_of(cut.begin(), cut.end(), [](char c) { return c != 0; })) {
    Refinement r{m, {}};
    r.parent.resize(m.elements.size());
    for (int e = 0; e < m.n_elements(); ++e) r.parent[e] = e;
    return r;
  }

  // Closure: an element with any cut edge must also cut its refinement edge.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& ee : topo.element_edges) {
      if ((cut[ee[1]] || cut[ee[2]]) && !cut[ee[0]]) {
        cut[ee[0]] = 1;
        changed = true;
      }
    }
  }

  Refinement r;
  Mesh& out = r.mesh;
  out.vertices = m.vertices;
  std::vector<int> mid(topo.edges.size(), -1);
  for (int k = 0; k < topo.n_edges(); ++k) {
    if (!cut[k]) continue;
    mid[k] = out.n_vertices();
    out.vertices.push_back(midpoint(m.vertices[topo.edges[k][0]], m.vertices[topo.edges[k][1]]));
  }
  const auto midpoint_of = [&](int a, int b) {
    const int k = topo.find_edge(a, b);
    return k >= 0 ? mid[k] : -1;
  };

  for (int e = 0; e < m.n_elements(); ++e) {
    const int g = m.generation.empty() ? 0 : m.generation[e];
    const auto emit = [&](Triangle t, int gen) {
      out.elements.push_back(t);
      out.generation.push_back(gen);
      r.parent.push_back(e);
    };
    const auto& t = m.elements[e];
    const int m0 = mid[topo.element_edges[e][0]];
    if (m0 < 0) {
      emit(t, g);
      continue;
    }
    const auto [p1, p2, p3] = t;
    const Triangle left{m0, p1, p2}, right{m0, p3, p1};
    for (const Triangle& child : {left, right}) {
      // Child refinement edges are halves of the parent's other two edges.
      const int mc = midpoint_of(child[1], child[2]);
      if (mc < 0) {
        emit(child, g + 1);
      } else {
        emit({mc, child[0], child[1]}, g + 2);
        emit({mc, child[2], child[0]}, g + 2);
      }
    }
  }

  for (const auto& [a, b] : m.boundary_edges) {
    const int mm = midpoint_of(a, b);
    if (mm < 0) {
      out.boundary_edges.push_back({a, b});
    } else {
      out.boundary_edges.push_back({a, mm});
      out.boundary_edges.push_back({mm, b});
    }
  }
  return r;
}

}  // namespace

Refinement bisect(const Mesh& m, std::span<const int> marked, int generations) {
  if (generations < 1) throw std::invalid_argument("bisect: generations must be >= 1");
  Refinement r = bisect_once(m, marked);
  std::vector<char> is_marked(m.elements.size(), 0);
  for (int e : marked) is_marked[e] = 1;
  for (int gen = 1; gen < generations; ++gen) {
    std::vector<int> next;
    for (int k = 0; k < r.mesh.n_elements(); ++k) {
      if (is_marked[r.parent[k]]) next.push_back(k);
    }
    Refinement step = bisect_once(r.mesh, next);
    for (auto& p : step.parent) p = r.parent[p];
    r = std::move(step);
  }
  return r;
}

Mesh bisect_marked(const Mesh& m, std::span<const int> marked, int generations) {
  return bisect(m, marked, generations).mesh;
}

double min_element_volume(const Mesh& m) {
  double v = std::numeric_limits<double>::infinity();
  for (int e = 0; e < m.n_elements(); ++e) v = std::min(v, m.area(e));
  return v;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) a += m.area(e);
  return a;
}

double min_angle(const Mesh& m) {
  double best = std::numbers::pi;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto p = m.corners(e);
    for (int i = 0; i < 3; ++i) {
      const Point a = p[i], b = p[(i + 1) % 3], c = p[(i + 2) % 3];
      const double ux = b.x - a.x, uy = b.y - a.y, vx = c.x - a.x, vy = c.y - a.y;
      const double angle = std::atan2(std::fabs(ux * vy - uy * vx), ux * vx + uy * vy);
      best = std::min(best, angle);
    }
  }
  return best;
}

bool is_conforming(const Mesh& m) {
  for (int e = 0; e < m.n_elements(); ++e) {
    if (!(m.signed_area(e) > 0.0)) return false;
  }
  std::vector<EdgeNodes> all;
  all.reserve(3 * m.elements.size());
  for (const auto& t : m.elements) {
    for (int i = 0; i < 3; ++i) all.push_back(sorted(t[i], t[(i + 1) % 3]));
  }
  std::sort(all.begin(), all.end());
  std::vector<EdgeNodes> single;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    if (j - i > 2) return false;
    if (j - i == 1) single.push_back(all[i]);
    i = j;
  }
  std::vector<EdgeNodes> boundary;
  for (const auto& [a, b] : m.boundary_edges) boundary.push_back(sorted(a, b));
  std::sort(boundary.begin(), boundary.end());
  return boundary == single;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  os << m.vertices.size() << ' ' << m.elements.size() << ' ' << m.boundary_edges.size() << '\n';
  os.precision(17);
  for (const auto& v : m.vertices) os << v.x << ' ' << v.y << '\n';
  for (const auto& t : m.elements) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& b : m.boundary_edges) os << b[0] << ' ' << b[1] << '\n';
}

Mesh read_mesh(std::istream& is) {
  std::size_t nv = 0, ne = 0, nb = 0;
  if (!(is >> nv >> ne >> nb)) throw std::runtime_error("read_mesh: bad header");
  Mesh m;
  m.vertices.resize(nv);
  m.elements.resize(ne);
  m.boundary_edges.resize(nb);
  for (auto& v : m.vertices) is >> v.x >> v.y;
  for (auto& t : m.elements) is >> t[0] >> t[1] >> t[2];
  for (auto& b : m.boundary_edges) is >> b[0] >> b[1];
  if (!is) throw std::runtime_error("read_mesh: truncated input");
  m.generation.assign(ne, 0);
  return m;
}

}  // namespace mpdwr
