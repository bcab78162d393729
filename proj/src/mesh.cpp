#include "emtherm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emtherm/element_kernels.hpp"

namespace emtherm {

void TagRegistry::add_region(int id, std::string name) {
  if (name.empty()) throw ConfigError("region tag name must not be empty");
  auto [it, inserted] = regions_.emplace(id, std::move(name));
  if (!inserted && it->second != name)
    throw ConfigError("region tag id " + std::to_string(id) + " declared twice");
}

void TagRegistry::add_edge_set(int id, std::string name) {
  if (name.empty()) throw ConfigError("edge set tag name must not be empty");
  auto [it, inserted] = edge_sets_.emplace(id, std::move(name));
  if (!inserted && it->second != name)
    throw ConfigError("edge set tag id " + std::to_string(id) + " declared twice");
}

const std::string& TagRegistry::region_name(int id) const {
  auto it = regions_.find(id);
  if (it == regions_.end())
    throw ConfigError("unknown region tag id " + std::to_string(id));
  return it->second;
}

const std::string& TagRegistry::edge_set_name(int id) const {
  auto it = edge_sets_.find(id);
  if (it == edge_sets_.end())
    throw ConfigError("unknown edge set tag id " + std::to_string(id));
  return it->second;
}

std::optional<int> TagRegistry::region_id(std::string_view name) const {
  for (const auto& [id, n] : regions_)
    if (n == name) return id;
  return std::nullopt;
}

std::optional<int> TagRegistry::edge_set_id(std::string_view name) const {
  for (const auto& [id, n] : edge_sets_)
    if (n == name) return id;
  return std::nullopt;
}

double Mesh::element_area(int e) const {
  return triangle_area<double>(node(elements(e, 0)), node(elements(e, 1)),
                               node(elements(e, 2)));
}

Vec2 Mesh::element_centroid(int e) const {
  return (node(elements(e, 0)) + node(elements(e, 1)) + node(elements(e, 2))) / 3.0;
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (int e = 0; e < element_count(); ++e) sum += element_area(e);
  return sum;
}

double Mesh::region_area(int region_tag) const {
  double sum = 0.0;
  for (int e = 0; e < element_count(); ++e)
    if (element_region(e) == region_tag) sum += element_area(e);
  return sum;
}

double Mesh::region_area(std::string_view region_name) const {
  auto id = tags.region_id(region_name);
  if (!id) throw ConfigError("unknown region '" + std::string(region_name) + "'");
  return region_area(*id);
}

namespace {

// Undirected edge key with deterministic ordering.
struct EdgeKey {
  int a, b;
  EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
  bool operator<(const EdgeKey& o) const {
    return a != o.a ? a < o.a : b < o.b;
  }
};

}  // namespace

void Mesh::finalize(std::vector<std::string>* warnings) {
  const int nn = node_count();
  const int ne = element_count();
  if (element_region.size() != ne)
    throw ConfigError("element_region length does not match element count");
  for (int i = 0; i < nn; ++i)
    if (!nodes.row(i).allFinite())
      throw ConfigError("node " + std::to_string(i) + " has non-finite coordinates");

  // Element sanity plus the directed-edge adjacency map. Each element edge
  // (i -> i+1) keeps the element on its left.
  std::map<EdgeKey, std::array<int, 2>> adjacency;  // up to two elements per edge
  for (int e = 0; e < ne; ++e) {
    for (int v = 0; v < 3; ++v) {
      const int n = elements(e, v);
      if (n < 0 || n >= nn)
        throw ConfigError("element " + std::to_string(e) + " references missing node " +
                          std::to_string(n));
    }
    if (!tags.has_region(element_region(e)))
      throw ConfigError("element " + std::to_string(e) + " carries undeclared region tag " +
                        std::to_string(element_region(e)));
    const double area = element_area(e);
    if (!(area > 0.0))
      throw ConfigError("element " + std::to_string(e) +
                        " is degenerate or clockwise (signed area " + std::to_string(area) + ")");
    for (int v = 0; v < 3; ++v) {
      EdgeKey key(elements(e, v), elements(e, (v + 1) % 3));
      auto [it, inserted] = adjacency.emplace(key, std::array<int, 2>{e, -1});
      if (!inserted) {
        if (it->second[1] != -1)
          throw ConfigError("non-manifold edge shared by more than two elements");
        it->second[1] = e;
      }
    }
  }

  // Resolve tagged edges against the adjacency map.
  edge_geometry_.assign(tagged_edges.size(), EdgeGeometry{});
  std::map<EdgeKey, int> tagged_lookup;
  for (std::size_t i = 0; i < tagged_edges.size(); ++i) {
    const auto& te = tagged_edges[i];
    if (te.nodes[0] < 0 || te.nodes[0] >= nn || te.nodes[1] < 0 || te.nodes[1] >= nn)
      throw ConfigError("tagged edge references a missing node");
    if (te.nodes[0] == te.nodes[1]) throw ConfigError("tagged edge with identical endpoints");
    if (!tags.has_edge_set(te.tag))
      throw ConfigError("tagged edge carries undeclared tag " + std::to_string(te.tag));
    EdgeKey key(te.nodes[0], te.nodes[1]);
    auto adj = adjacency.find(key);
    if (adj == adjacency.end())
      throw ConfigError("tagged edge (" + std::to_string(te.nodes[0]) + "," +
                        std::to_string(te.nodes[1]) + ") does not match any element edge");
    if (!tagged_lookup.emplace(key, static_cast<int>(i)).second)
      throw ConfigError("edge tagged twice");

    EdgeGeometry geo;
    geo.element_left = adj->second[0];
    geo.element_right = adj->second[1];
    const Vec2 p = node(te.nodes[0]);
    const Vec2 q = node(te.nodes[1]);
    const Vec2 d = q - p;
    geo.length = d.norm();
    if (!(geo.length > 0.0)) throw ConfigError("tagged edge with zero length");
    Vec2 normal(d.y() / geo.length, -d.x() / geo.length);
    // Orient away from the left element's centroid.
    const Vec2 mid = 0.5 * (p + q);
    if (normal.dot(mid - element_centroid(geo.element_left)) < 0.0) normal = -normal;
    geo.normal = normal;
    edge_geometry_[i] = geo;
  }

  // Hull edges (single adjacent element) should be tagged; warn otherwise,
  // assembly treats them as adiabatic.
  int untagged_hull = 0;
  for (const auto& [key, elems] : adjacency) {
    if (elems[1] == -1 && tagged_lookup.find(key) == tagged_lookup.end()) ++untagged_hull;
  }
  if (untagged_hull > 0 && warnings)
    warnings->push_back(std::to_string(untagged_hull) +
                        " hull edge(s) carry no tag; they are treated as adiabatic");

  // Hull chain structure: every node of the hull graph must have even
  // degree 2 so tagged chains close or terminate against each other.
  std::map<int, int> hull_degree;
  for (const auto& [key, elems] : adjacency) {
    if (elems[1] == -1) {
      ++hull_degree[key.a];
      ++hull_degree[key.b];
    }
  }
  for (const auto& [n, deg] : hull_degree) {
    if (deg != 2)
      throw ConfigError("hull is not a closed chain at node " + std::to_string(n));
  }
}

double Mesh::hull_polygon_area() const {
  // Shoelace over hull edges, oriented CCW as seen from the adjacent element.
  double twice = 0.0;
  const int ne = element_count();
  std::map<EdgeKey, int> interior_count;
  for (int e = 0; e < ne; ++e)
    for (int v = 0; v < 3; ++v)
      ++interior_count[EdgeKey(elements(e, v), elements(e, (v + 1) % 3))];
  for (int e = 0; e < ne; ++e) {
    for (int v = 0; v < 3; ++v) {
      const int a = elements(e, v);
      const int b = elements(e, (v + 1) % 3);
      if (interior_count[EdgeKey(a, b)] == 1) {
        const Vec2 p = node(a), q = node(b);
        twice += p.x() * q.y() - q.x() * p.y();
      }
    }
  }
  return 0.5 * twice;
}

std::vector<int> Mesh::edges_with_tag(int tag) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < tagged_edges.size(); ++i)
    if (tagged_edges[i].tag == tag) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Mesh::edges_with_tag(std::string_view name) const {
  auto id = tags.edge_set_id(name);
  if (!id) throw ConfigError("unknown edge set '" + std::string(name) + "'");
  return edges_with_tag(*id);
}

std::vector<int> Mesh::hull_tags() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < tagged_edges.size(); ++i) {
    if (edge_geometry_[i].element_right == -1) {
      if (std::find(out.begin(), out.end(), tagged_edges[i].tag) == out.end())
        out.push_back(tagged_edges[i].tag);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ProbeLocation locate_probe(const Mesh& mesh, const Vec2& point) {
  constexpr double kGeometricTolerance = 1e-10;  // metres outside still accepted
  int best_element = -1;
  double best_penetration = -std::numeric_limits<double>::max();
  Vec3 best_bary = Vec3::Zero();

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Vec2 a = mesh.node(mesh.elements(e, 0));
    const Vec2 b = mesh.node(mesh.elements(e, 1));
    const Vec2 c = mesh.node(mesh.elements(e, 2));
    const Vec3 bary = barycentric<double>(a, b, c, point);
    const double area2 = 2.0 * triangle_area<double>(a, b, c);
    // Signed distance of the point inside each edge: barycentric coordinate
    // times the corresponding altitude.
    const double alt0 = area2 / (c - b).norm();
    const double alt1 = area2 / (a - c).norm();
    const double alt2 = area2 / (b - a).norm();
    const double penetration =
        std::min({bary[0] * alt0, bary[1] * alt1, bary[2] * alt2});
    if (penetration > best_penetration) {
      best_penetration = penetration;
      best_element = e;
      best_bary = bary;
    }
  }

  if (best_element < 0) throw ConfigError("cannot locate a probe in an empty mesh");
  if (best_penetration < -kGeometricTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "probe (%.6g, %.6g) lies outside the mesh, about %.3g m past the boundary",
                  point.x(), point.y(), -best_penetration);
    throw ConfigError(buf);
  }

  ProbeLocation loc;
  loc.point = point;
  loc.element = best_element;
  Vec3 bary = best_bary.cwiseMax(0.0);
  loc.barycentric = bary / bary.sum();
  return loc;
}

double probe_value(const Mesh& mesh, const ProbeLocation& loc, const Vec& nodal) {
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += loc.barycentric[i] * nodal[mesh.elements(loc.element, i)];
  return v;
}

}  // namespace emtherm
