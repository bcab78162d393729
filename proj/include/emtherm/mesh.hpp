#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emtherm/types.hpp"

namespace emtherm {

// Physical tags declared by a mesh. dim-2 entries name element regions,
// dim-1 entries name edge sets (true boundaries and marked interior lines).
class TagRegistry {
 public:
  void add_region(int id, std::string name);
  void add_edge_set(int id, std::string name);

  const std::string& region_name(int id) const;
  const std::string& edge_set_name(int id) const;
  std::optional<int> region_id(std::string_view name) const;
  std::optional<int> edge_set_id(std::string_view name) const;
  bool has_region(int id) const { return regions_.count(id) != 0; }
  bool has_edge_set(int id) const { return edge_sets_.count(id) != 0; }

  const std::map<int, std::string>& regions() const { return regions_; }
  const std::map<int, std::string>& edge_sets() const { return edge_sets_; }

  friend bool operator==(const TagRegistry&, const TagRegistry&) = default;

 private:
  std::map<int, std::string> regions_;
  std::map<int, std::string> edge_sets_;
};

// A tagged line element. Most belong to the hull; tags may also mark
// interior edge circles (used to place line sinks inside the domain).
struct TaggedEdge {
  std::array<int, 2> nodes{-1, -1};
  int tag = 0;

  friend bool operator==(const TaggedEdge&, const TaggedEdge&) = default;
};

// Derived per tagged edge, recomputed after construction and never
// serialized. Hull edges have element_right == -1 and an outward unit
// normal; interior tagged edges record both neighbours, with the normal
// pointing away from element_left.
struct EdgeGeometry {
  int element_left = -1;
  int element_right = -1;
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
};

class Mesh {
 public:
  Eigen::MatrixX2d nodes;          // coordinates [m], one row per node
  Eigen::MatrixX3i elements;       // CCW triangle node triples
  Eigen::VectorXi element_region;  // region tag id per element
  std::vector<TaggedEdge> tagged_edges;
  TagRegistry tags;

  // Builds adjacency, normals and lengths, then checks invariants:
  // strictly positive element areas, valid node references, manifold
  // edges, hull tagged edges adjacent to exactly one element. Soft issues
  // (untagged hull edges) go to `warnings` if given. Throws ConfigError on
  // hard violations.
  void finalize(std::vector<std::string>* warnings = nullptr);

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int element_count() const { return static_cast<int>(elements.rows()); }

  Vec2 node(int i) const { return nodes.row(i).transpose(); }
  double element_area(int e) const;
  Vec2 element_centroid(int e) const;
  double total_area() const;
  double region_area(int region_tag) const;
  double region_area(std::string_view region_name) const;

  // Area of the polygon traced by the hull, via the divergence theorem over
  // all hull edges. Agrees with total_area() up to roundoff.
  double hull_polygon_area() const;

  const std::vector<EdgeGeometry>& edge_geometry() const { return edge_geometry_; }

  // Indices into tagged_edges carrying the given tag id.
  std::vector<int> edges_with_tag(int tag) const;
  std::vector<int> edges_with_tag(std::string_view name) const;

  // Tag ids (dim 1) that mark at least one hull edge.
  std::vector<int> hull_tags() const;

  // Identity on everything serialized; derived adjacency excluded.
  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.nodes == b.nodes && a.elements == b.elements &&
           a.element_region == b.element_region &&
           a.tagged_edges == b.tagged_edges && a.tags == b.tags;
  }

 private:
  std::vector<EdgeGeometry> edge_geometry_;
};

struct ProbeLocation {
  Vec2 point = Vec2::Zero();
  int element = -1;
  Vec3 barycentric = Vec3::Zero();
};

// Finds the element containing `point`. Points outside the mesh by more
// than 1e-10 m raise ConfigError reporting the closest approach distance.
// Barycentric coordinates are clamped to be non-negative and sum to one.
ProbeLocation locate_probe(const Mesh& mesh, const Vec2& point);

// Interpolates nodal values at a located probe.
double probe_value(const Mesh& mesh, const ProbeLocation& loc, const Vec& nodal);

}  // namespace emtherm
