#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "emtherm/materials.hpp"
#include "emtherm/mesh.hpp"
#include "emtherm/schedule.hpp"
#include "emtherm/types.hpp"

namespace emtherm {

// Film boundary: flux h (T - reference(t)) into the surroundings. The same
// struct serves the distributed variant, where the coefficient is per unit
// volume, W/(m^3 K), instead of per unit surface, W/(m^2 K).
struct RobinSpec {
  double film_coefficient = 0.0;
  Schedule reference{0.0};

  bool operator==(const RobinSpec&) const = default;
};

// Boundary conditions by edge-set name. Edge sets not mentioned anywhere
// are natural (adiabatic) boundaries; listing them under adiabatic merely
// documents the intent. volumetric_exchange is keyed by region name and
// adds a distributed heat sink, the in-plane stand-in for losses through
// the end faces of a body.
struct BoundarySpec {
  std::map<std::string, Schedule, std::less<>> dirichlet;
  std::map<std::string, RobinSpec, std::less<>> robin;
  std::map<std::string, RobinSpec, std::less<>> volumetric_exchange;
  std::set<std::string, std::less<>> adiabatic;

  // Checks that every name exists and no edge set carries two conditions.
  // Hull edge sets with no condition at all are reported as warnings.
  void validate(const Mesh& mesh, std::vector<std::string>* warnings = nullptr) const;

  bool operator==(const BoundarySpec&) const = default;
};

// Sparse operators on the nodal temperature vector. All matrices are
// symmetric; sizes equal the mesh node count.
SpMat assemble_stiffness(const Mesh& mesh,
                         const std::map<int, ResolvedMaterial>& materials);
SpMat assemble_mass(const Mesh& mesh,
                    const std::map<int, ResolvedMaterial>& materials);

// Load vector for piecewise-constant volumetric sources, W/m^3 per region.
// Regions absent from the map contribute nothing.
Vec assemble_source(const Mesh& mesh, const std::map<int, double>& density_by_region);

// One film term: matrix goes on the left-hand side, unit_reference_load
// scaled by reference(t) on the right. measure is the edge-set length
// (surface variant) or region area (volumetric variant).
struct RobinContribution {
  SpMat matrix;
  Vec unit_reference_load;
  double measure = 0.0;
};

RobinContribution assemble_robin(const Mesh& mesh, int edge_set_tag,
                                 double film_coefficient);
RobinContribution assemble_robin_volumetric(const Mesh& mesh, int region_tag,
                                            double volumetric_coefficient);

// Prescribed-value elimination for a symmetric system. Rows and columns of
// the constrained nodes are removed, their values moved to the right-hand
// side; the reduced system is factored once and reused across solves with
// different right-hand sides and prescribed values.
class ConstrainedOperator {
 public:
  ConstrainedOperator(const SpMat& matrix, std::vector<int> constrained_nodes,
                      SolverBackend backend = SolverBackend::direct);

  // Solves matrix * x = rhs subject to x[constrained] = constrained_values
  // (aligned with constrained_nodes()). Returns the full-size solution.
  Vec solve(const Vec& rhs, const Vec& constrained_values) const;

  int size() const { return n_; }
  int free_count() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& constrained_nodes() const { return constrained_; }

 private:
  int n_ = 0;
  SolverBackend backend_ = SolverBackend::direct;
  std::vector<int> constrained_;
  std::vector<int> free_;
  std::vector<int> full_to_free_;
  double norm_ = 0.0;  // row-sum norm of the reduced matrix, for error checks
  SpMat A_ff_, A_fc_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  mutable Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg_;
};

// Everything assembly produces for one mesh + materials + boundary spec.
// Matrices are constant in time; schedules keep the time dependence.
struct RobinTerm {
  std::string name;
  bool volumetric = false;
  double coefficient = 0.0;
  Schedule reference{0.0};
  SpMat matrix;
  Vec unit_reference_load;
  double measure = 0.0;
};

struct DirichletTerm {
  std::string edge_set;
  Schedule value;
  std::vector<int> nodes;  // sorted
};

struct LinearSystem {
  int size = 0;
  SpMat conduction;  // K
  SpMat mass;        // M, consistent
  SpMat exchange;    // sum of film matrices, zero when none
  std::vector<RobinTerm> robin;
  std::vector<DirichletTerm> dirichlet;
  std::vector<int> constrained_nodes;  // union of dirichlet nodes, sorted

  Vec constrained_values_at(double time) const;
  Vec exchange_load_at(double time) const;  // sum of film right-hand sides
};

LinearSystem build_linear_system(const Mesh& mesh, const MaterialTable& materials,
                                 const BoundarySpec& bc,
                                 std::vector<std::string>* warnings = nullptr);

// Steady state: (K + H) T = load + film loads at the given time, with the
// prescribed temperatures evaluated at that time.
Vec solve_steady(const LinearSystem& system, const Vec& load, double time = 0.0,
                 SolverBackend backend = SolverBackend::direct);

}  // namespace emtherm
