#pragma once

#include <Eigen/Core>

namespace emtherm {

// Linear-triangle element integrals. All kernels take the three vertices in
// CCW order and return dense Eigen blocks scatterable by the assembler.

template <typename Scalar>
Scalar triangle_area(const Eigen::Matrix<Scalar, 2, 1>& a,
                     const Eigen::Matrix<Scalar, 2, 1>& b,
                     const Eigen::Matrix<Scalar, 2, 1>& c) {
  return Scalar(0.5) * ((b.x() - a.x()) * (c.y() - a.y()) -
                        (c.x() - a.x()) * (b.y() - a.y()));
}

// Constant shape-function gradients, one column per vertex.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 3> p1_gradients(const Eigen::Matrix<Scalar, 2, 1>& a,
                                         const Eigen::Matrix<Scalar, 2, 1>& b,
                                         const Eigen::Matrix<Scalar, 2, 1>& c) {
  const Scalar inv2A = Scalar(1) / (Scalar(2) * triangle_area(a, b, c));
  Eigen::Matrix<Scalar, 2, 3> g;
  g.col(0) << (b.y() - c.y()) * inv2A, (c.x() - b.x()) * inv2A;
  g.col(1) << (c.y() - a.y()) * inv2A, (a.x() - c.x()) * inv2A;
  g.col(2) << (a.y() - b.y()) * inv2A, (b.x() - a.x()) * inv2A;
  return g;
}

// Conduction stiffness: area * G^T Lambda G for an SPD conductivity tensor.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_stiffness(const Eigen::Matrix<Scalar, 2, 1>& a,
                                         const Eigen::Matrix<Scalar, 2, 1>& b,
                                         const Eigen::Matrix<Scalar, 2, 1>& c,
                                         const Eigen::Matrix<Scalar, 2, 2>& conductivity) {
  const Eigen::Matrix<Scalar, 2, 3> g = p1_gradients(a, b, c);
  return triangle_area(a, b, c) * (g.transpose() * conductivity * g);
}

// Consistent heat-capacity (mass) block: c_v * area / 12 * [[2,1,1],...].
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_mass(const Eigen::Matrix<Scalar, 2, 1>& a,
                                    const Eigen::Matrix<Scalar, 2, 1>& b,
                                    const Eigen::Matrix<Scalar, 2, 1>& c,
                                    Scalar volumetric_heat_capacity) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (volumetric_heat_capacity * triangle_area(a, b, c) / Scalar(12)) * m;
}

// Lumped volumetric-source load: q * area / 3 to each vertex.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> p1_source_load(const Eigen::Matrix<Scalar, 2, 1>& a,
                                           const Eigen::Matrix<Scalar, 2, 1>& b,
                                           const Eigen::Matrix<Scalar, 2, 1>& c,
                                           Scalar volumetric_source) {
  const Scalar share = volumetric_source * triangle_area(a, b, c) / Scalar(3);
  return Eigen::Matrix<Scalar, 3, 1>::Constant(share);
}

// Film-exchange edge matrix: h * L / 6 * [[2,1],[1,2]].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> robin_edge_matrix(Scalar h, Scalar edge_length) {
  Eigen::Matrix<Scalar, 2, 2> k;
  k << 2, 1, 1, 2;
  return (h * edge_length / Scalar(6)) * k;
}

// Film-exchange edge load for a unit reference temperature: h * L / 2 each.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> robin_edge_load(Scalar h, Scalar edge_length) {
  return Eigen::Matrix<Scalar, 2, 1>::Constant(h * edge_length / Scalar(2));
}

// Barycentric coordinates of p, by signed sub-triangle areas. Exact zeros
// and ones at the vertices.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> barycentric(const Eigen::Matrix<Scalar, 2, 1>& a,
                                        const Eigen::Matrix<Scalar, 2, 1>& b,
                                        const Eigen::Matrix<Scalar, 2, 1>& c,
                                        const Eigen::Matrix<Scalar, 2, 1>& p) {
  const Scalar area = triangle_area(a, b, c);
  Eigen::Matrix<Scalar, 3, 1> lambda;
  lambda << triangle_area(p, b, c), triangle_area(a, p, c), triangle_area(a, b, p);
  return lambda / area;
}

}  // namespace emtherm
