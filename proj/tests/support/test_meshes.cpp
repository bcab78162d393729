#include "test_meshes.hpp"

#include <cmath>
#include <vector>

namespace emtherm::testing {
namespace {

constexpr double kPi = 3.14159265358979323846;

void push_edge(Mesh& mesh, int n0, int n1, int tag) {
  mesh.tagged_edges.push_back(TaggedEdge{{n0, n1}, tag});
}

}  // namespace

Mesh structured_rectangle(int nx, int ny, double lx, double ly) {
  Mesh mesh;
  mesh.nodes.resize((nx + 1) * (ny + 1), 2);
  auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.row(node(i, j)) << lx * i / nx, ly * j / ny;

  mesh.elements.resize(2 * nx * ny, 3);
  mesh.element_region.resize(2 * nx * ny);
  int e = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int p00 = node(i, j), p10 = node(i + 1, j);
      const int p01 = node(i, j + 1), p11 = node(i + 1, j + 1);
      mesh.elements.row(e++) << p00, p10, p11;
      mesh.elements.row(e++) << p00, p11, p01;
    }
  mesh.element_region.setOnes();

  mesh.tags.add_region(1, "domain");
  mesh.tags.add_edge_set(11, "left");
  mesh.tags.add_edge_set(12, "right");
  mesh.tags.add_edge_set(13, "bottom");
  mesh.tags.add_edge_set(14, "top");
  for (int j = 0; j < ny; ++j) {
    push_edge(mesh, node(0, j), node(0, j + 1), 11);
    push_edge(mesh, node(nx, j), node(nx, j + 1), 12);
  }
  for (int i = 0; i < nx; ++i) {
    push_edge(mesh, node(i, 0), node(i + 1, 0), 13);
    push_edge(mesh, node(i, ny), node(i + 1, ny), 14);
  }
  mesh.finalize();
  return mesh;
}

Mesh quarter_annulus(double a, double b, int n_rings, int n_arcs) {
  Mesh mesh;
  mesh.nodes.resize((n_rings + 1) * (n_arcs + 1), 2);
  auto node = [n_arcs](int k, int j) { return k * (n_arcs + 1) + j; };
  for (int k = 0; k <= n_rings; ++k) {
    const double r = a + (b - a) * k / n_rings;
    for (int j = 0; j <= n_arcs; ++j) {
      const double t = 0.5 * kPi * j / n_arcs;
      mesh.nodes.row(node(k, j)) << r * std::cos(t), r * std::sin(t);
    }
  }

  mesh.elements.resize(2 * n_rings * n_arcs, 3);
  mesh.element_region.resize(2 * n_rings * n_arcs);
  int e = 0;
  for (int k = 0; k < n_rings; ++k)
    for (int j = 0; j < n_arcs; ++j) {
      const int p00 = node(k, j), p10 = node(k + 1, j);
      const int p01 = node(k, j + 1), p11 = node(k + 1, j + 1);
      mesh.elements.row(e++) << p00, p10, p11;
      mesh.elements.row(e++) << p00, p11, p01;
    }
  mesh.element_region.setOnes();

  mesh.tags.add_region(1, "ring");
  mesh.tags.add_edge_set(11, "inner");
  mesh.tags.add_edge_set(12, "outer");
  mesh.tags.add_edge_set(13, "cut_x");
  mesh.tags.add_edge_set(14, "cut_y");
  for (int j = 0; j < n_arcs; ++j) {
    push_edge(mesh, node(0, j), node(0, j + 1), 11);
    push_edge(mesh, node(n_rings, j), node(n_rings, j + 1), 12);
  }
  for (int k = 0; k < n_rings; ++k) {
    push_edge(mesh, node(k, 0), node(k + 1, 0), 13);
    push_edge(mesh, node(k, n_arcs), node(k + 1, n_arcs), 14);
  }
  mesh.finalize();
  return mesh;
}

Mesh quarter_disk(double radius, int n_rings, int n_arcs) {
  Mesh mesh;
  mesh.nodes.resize(1 + n_rings * (n_arcs + 1), 2);
  mesh.nodes.row(0) << 0.0, 0.0;
  auto node = [n_arcs](int k, int j) { return 1 + (k - 1) * (n_arcs + 1) + j; };
  for (int k = 1; k <= n_rings; ++k) {
    const double r = radius * k / n_rings;
    for (int j = 0; j <= n_arcs; ++j) {
      const double t = 0.5 * kPi * j / n_arcs;
      mesh.nodes.row(node(k, j)) << r * std::cos(t), r * std::sin(t);
    }
  }

  const int n_elements = n_arcs + 2 * (n_rings - 1) * n_arcs;
  mesh.elements.resize(n_elements, 3);
  mesh.element_region.resize(n_elements);
  int e = 0;
  for (int j = 0; j < n_arcs; ++j) mesh.elements.row(e++) << 0, node(1, j), node(1, j + 1);
  for (int k = 1; k < n_rings; ++k)
    for (int j = 0; j < n_arcs; ++j) {
      const int p00 = node(k, j), p10 = node(k + 1, j);
      const int p01 = node(k, j + 1), p11 = node(k + 1, j + 1);
      mesh.elements.row(e++) << p00, p10, p11;
      mesh.elements.row(e++) << p00, p11, p01;
    }
  mesh.element_region.setOnes();

  mesh.tags.add_region(1, "disk");
  mesh.tags.add_edge_set(11, "rim");
  mesh.tags.add_edge_set(12, "cut_x");
  mesh.tags.add_edge_set(13, "cut_y");
  for (int j = 0; j < n_arcs; ++j)
    push_edge(mesh, node(n_rings, j), node(n_rings, j + 1), 11);
  push_edge(mesh, 0, node(1, 0), 12);
  push_edge(mesh, 0, node(1, n_arcs), 13);
  for (int k = 1; k < n_rings; ++k) {
    push_edge(mesh, node(k, 0), node(k + 1, 0), 12);
    push_edge(mesh, node(k, n_arcs), node(k + 1, n_arcs), 13);
  }
  mesh.finalize();
  return mesh;
}

double l2_error(const Mesh& mesh, const Vec& nodal,
                const std::function<double(const Vec2&)>& reference) {
  double sum = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto tri = mesh.elements.row(e);
    const double area = mesh.element_area(e);
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k], j = tri[(k + 1) % 3];
      const Vec2 mid = 0.5 * (mesh.node(i) + mesh.node(j));
      const double interp = 0.5 * (nodal[i] + nodal[j]);
      const double diff = interp - reference(mid);
      sum += area / 3.0 * diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace emtherm::testing
