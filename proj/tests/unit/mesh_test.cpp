#include "emtherm/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "emtherm/types.hpp"
#include "test_meshes.hpp"

using namespace emtherm;
using testing::quarter_annulus;
using testing::quarter_disk;
using testing::structured_rectangle;

namespace {

Mesh single_triangle() {
  Mesh m;
  m.nodes.resize(3, 2);
  m.nodes << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  m.elements.resize(1, 3);
  m.elements << 0, 1, 2;
  m.element_region.resize(1);
  m.element_region << 1;
  m.tags.add_region(1, "domain");
  return m;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit square splits into two triangles of total area one") {
  const Mesh m = structured_rectangle(1, 1, 1.0, 1.0);
  CHECK(m.node_count() == 4);
  CHECK(m.element_count() == 2);
  CHECK(m.tagged_edges.size() == 4);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.hull_polygon_area() == doctest::Approx(m.total_area()).epsilon(1e-14));
  CHECK(m.region_area("domain") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("element area and centroid of a known triangle") {
  Mesh m = single_triangle();
  m.finalize();
  CHECK(m.element_area(0) == doctest::Approx(0.5).epsilon(1e-15));
  const Vec2 c = m.element_centroid(0);
  CHECK(c.x() == doctest::Approx(1.0 / 3.0));
  CHECK(c.y() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("region areas partition the total area") {
  const Mesh m = structured_rectangle(4, 3, 2.0, 1.5);
  CHECK(m.region_area(1) == doctest::Approx(m.total_area()).epsilon(1e-14));
  CHECK(m.region_area(99) == 0.0);
  CHECK_THROWS_AS(m.region_area("nonsense"), ConfigError);
}

TEST_CASE("edges_with_tag resolves names and ids identically") {
  const Mesh m = structured_rectangle(3, 2, 1.0, 1.0);
  const auto by_name = m.edges_with_tag("bottom");
  const auto by_id = m.edges_with_tag(13);
  CHECK(by_name == by_id);
  CHECK(by_name.size() == 3);
  CHECK_THROWS_AS(m.edges_with_tag("no_such_set"), ConfigError);
}

TEST_CASE("hull_tags lists every set that touches the hull") {
  const Mesh m = structured_rectangle(2, 2, 1.0, 1.0);
  const auto tags = m.hull_tags();
  CHECK(tags == std::vector<int>{11, 12, 13, 14});
}

TEST_CASE("tagged edge geometry: outward normal and length on the hull") {
  const Mesh m = structured_rectangle(2, 2, 2.0, 2.0);
  for (int idx : m.edges_with_tag("left")) {
    const auto& geo = m.edge_geometry()[idx];
    CHECK(geo.element_right == -1);
    CHECK(geo.length == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geo.normal.x() == doctest::Approx(-1.0));
    CHECK(geo.normal.y() == doctest::Approx(0.0));
  }
  for (int idx : m.edges_with_tag("top")) {
    const auto& geo = m.edge_geometry()[idx];
    CHECK(geo.normal.y() == doctest::Approx(1.0));
  }
}

TEST_CASE("interior tagged edge records both neighbours") {
  Mesh m = structured_rectangle(2, 1, 2.0, 1.0);
  m.tags.add_edge_set(20, "mid");
  m.tagged_edges.push_back(TaggedEdge{{1, 4}, 20});
  m.finalize();
  const auto idx = m.edges_with_tag("mid");
  REQUIRE(idx.size() == 1);
  const auto& geo = m.edge_geometry()[idx[0]];
  CHECK(geo.element_left >= 0);
  CHECK(geo.element_right >= 0);
  CHECK(geo.element_left != geo.element_right);
  CHECK(geo.length == doctest::Approx(1.0));
  // Normal points away from the left element.
  const Vec2 mid = 0.5 * (m.node(1) + m.node(4));
  CHECK(geo.normal.dot(mid - m.element_centroid(geo.element_left)) > 0.0);
}

TEST_CASE("finalize rejects clockwise and degenerate elements") {
  Mesh m = single_triangle();
  std::swap(m.elements(0, 1), m.elements(0, 2));  // clockwise now
  CHECK_THROWS_AS(m.finalize(), ConfigError);

  Mesh d = single_triangle();
  d.nodes.row(2) << 0.5, 0.0;  // collinear
  CHECK_THROWS_AS(d.finalize(), ConfigError);
}

TEST_CASE("finalize rejects references to missing nodes and tags") {
  Mesh m = single_triangle();
  m.elements(0, 2) = 7;
  CHECK_THROWS_AS(m.finalize(), ConfigError);

  Mesh r = single_triangle();
  r.element_region << 5;  // undeclared region id
  CHECK_THROWS_AS(r.finalize(), ConfigError);

  Mesh t = single_triangle();
  t.tagged_edges.push_back(TaggedEdge{{0, 1}, 30});  // undeclared edge set
  CHECK_THROWS_AS(t.finalize(), ConfigError);
}

TEST_CASE("finalize rejects tagged edges that match no element edge") {
  Mesh m = structured_rectangle(2, 2, 1.0, 1.0);
  m.tagged_edges.push_back(TaggedEdge{{0, 8}, 11});  // diagonal across the square
  CHECK_THROWS_AS(m.finalize(), ConfigError);
}

TEST_CASE("finalize rejects an edge tagged twice") {
  Mesh m = structured_rectangle(1, 1, 1.0, 1.0);
  m.tagged_edges.push_back(m.tagged_edges.front());
  CHECK_THROWS_AS(m.finalize(), ConfigError);
}

TEST_CASE("finalize rejects non-manifold edges") {
  Mesh m;
  m.nodes.resize(5, 2);
  m.nodes << 0.0, 0.0, 1.0, 0.0, 0.5, 1.0, 0.5, -1.0, 2.0, 0.5;
  m.elements.resize(3, 3);
  // Three elements share edge (0,1).
  m.elements << 0, 1, 2, 1, 0, 3, 0, 1, 4;
  m.element_region.resize(3);
  m.element_region << 1, 1, 1;
  m.tags.add_region(1, "domain");
  CHECK_THROWS_AS(m.finalize(), ConfigError);
}

TEST_CASE("finalize rejects a hull that does not close") {
  Mesh m;
  m.nodes.resize(5, 2);
  m.nodes << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0;
  m.elements.resize(2, 3);
  m.elements << 0, 1, 2, 0, 3, 4;  // two triangles meeting only at node 0
  m.element_region.resize(2);
  m.element_region << 1, 1;
  m.tags.add_region(1, "domain");
  CHECK_THROWS_AS(m.finalize(), ConfigError);
}

TEST_CASE("untagged hull edges produce a warning, not an error") {
  Mesh m = single_triangle();
  std::vector<std::string> warnings;
  m.finalize(&warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("3 hull edge(s)") != std::string::npos);

  // Fully tagged rectangle stays silent.
  Mesh r = structured_rectangle(2, 2, 1.0, 1.0);
  warnings.clear();
  r.finalize(&warnings);
  CHECK(warnings.empty());
}

TEST_CASE("probe location interpolates a linear field exactly") {
  const Mesh m = structured_rectangle(4, 4, 1.0, 1.0);
  Vec field(m.node_count());
  for (int i = 0; i < m.node_count(); ++i)
    field[i] = 2.0 * m.node(i).x() - 3.0 * m.node(i).y() + 1.0;
  for (const Vec2& p : {Vec2(0.3, 0.7), Vec2(0.0, 0.0), Vec2(1.0, 1.0), Vec2(0.5, 0.5)}) {
    const auto loc = locate_probe(m, p);
    CHECK(probe_value(m, loc, field) ==
          doctest::Approx(2.0 * p.x() - 3.0 * p.y() + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("probe barycentric coordinates are clamped and normalized") {
  const Mesh m = structured_rectangle(2, 2, 1.0, 1.0);
  const auto loc = locate_probe(m, Vec2(0.5, 0.0));  // on the hull
  CHECK(loc.barycentric.minCoeff() >= 0.0);
  CHECK(loc.barycentric.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("probes outside the mesh are rejected with a distance") {
  const Mesh m = structured_rectangle(2, 2, 1.0, 1.0);
  CHECK_THROWS_WITH_AS(locate_probe(m, Vec2(1.5, 0.5)),
                       doctest::Contains("outside the mesh"), ConfigError);
  // Just outside within the geometric tolerance still resolves.
  CHECK_NOTHROW(locate_probe(m, Vec2(1.0 + 1e-12, 0.5)));
}

TEST_CASE("equality covers nodes, elements, tags and tagged edges") {
  const Mesh a = structured_rectangle(3, 3, 1.0, 2.0);
  const Mesh b = structured_rectangle(3, 3, 1.0, 2.0);
  CHECK(a == b);

  Mesh c = structured_rectangle(3, 3, 1.0, 2.0);
  c.nodes(5, 0) += 1e-9;
  CHECK_FALSE(a == c);

  Mesh d = structured_rectangle(3, 3, 1.0, 2.0);
  d.tagged_edges[0].tag = 12;
  CHECK_FALSE(a == d);
}

TEST_CASE("quarter annulus approximates the analytic area from below") {
  const double a = 0.02, b = 0.05;
  const Mesh m = quarter_annulus(a, b, 8, 24);
  const double exact = 0.25 * M_PI * (b * b - a * a);
  CHECK(m.total_area() < exact);
  CHECK(m.total_area() == doctest::Approx(exact).epsilon(2e-3));
  CHECK(m.edges_with_tag("inner").size() == 24);
  CHECK(m.edges_with_tag("outer").size() == 24);
  CHECK(m.edges_with_tag("cut_x").size() == 8);
}

TEST_CASE("quarter disk approximates the analytic area") {
  const double r = 0.05;
  const Mesh m = quarter_disk(r, 10, 20);
  CHECK(m.total_area() == doctest::Approx(0.25 * M_PI * r * r).epsilon(3e-3));
  CHECK(m.edges_with_tag("rim").size() == 20);
  CHECK(m.edges_with_tag("cut_x").size() == 10);
  CHECK(m.edges_with_tag("cut_y").size() == 10);
}

}  // TEST_SUITE
