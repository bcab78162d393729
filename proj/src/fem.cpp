#include "emtherm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "emtherm/element_kernels.hpp"

namespace emtherm {

namespace {

void check_film(const std::string& name, const RobinSpec& spec) {
  if (!std::isfinite(spec.film_coefficient) || spec.film_coefficient < 0.0)
    throw ConfigError("film coefficient for '" + name + "' must be non-negative");
}

}  // namespace

void BoundarySpec::validate(const Mesh& mesh, std::vector<std::string>* warnings) const {
  auto require_edge_set = [&mesh](const std::string& name) {
    if (!mesh.tags.edge_set_id(name))
      throw ConfigError("boundary condition references unknown edge set '" + name + "'");
  };
  std::map<std::string, const char*, std::less<>> claimed;
  auto claim = [&claimed](const std::string& name, const char* kind) {
    auto [it, inserted] = claimed.emplace(name, kind);
    if (!inserted)
      throw ConfigError("edge set '" + name + "' has both a " + it->second + " and a " +
                        kind + " condition");
  };

  for (const auto& [name, value] : dirichlet) {
    (void)value;
    require_edge_set(name);
    claim(name, "dirichlet");
  }
  for (const auto& [name, spec] : robin) {
    require_edge_set(name);
    check_film(name, spec);
    claim(name, "robin");
  }
  for (const auto& name : adiabatic) {
    require_edge_set(name);
    claim(name, "adiabatic");
  }
  for (const auto& [name, spec] : volumetric_exchange) {
    if (!mesh.tags.region_id(name))
      throw ConfigError("volumetric exchange references unknown region '" + name + "'");
    check_film(name, spec);
  }

  if (warnings) {
    for (int tag : mesh.hull_tags()) {
      const std::string& name = mesh.tags.edge_set_name(tag);
      if (claimed.find(name) == claimed.end())
        warnings->push_back("edge set '" + name +
                            "' has no boundary condition and is treated as adiabatic");
    }
  }
}

namespace {

const ResolvedMaterial& material_for(const std::map<int, ResolvedMaterial>& materials,
                                     int region_tag) {
  auto it = materials.find(region_tag);
  if (it == materials.end())
    throw Error("no material resolved for region tag " + std::to_string(region_tag));
  return it->second;
}

}  // namespace

SpMat assemble_stiffness(const Mesh& mesh,
                         const std::map<int, ResolvedMaterial>& materials) {
  const int n = mesh.node_count();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  for (long e = 0; e < mesh.element_count(); ++e) {
    const ResolvedMaterial& mat = material_for(materials, mesh.element_region(e));
    const Vec2 a = mesh.node(mesh.elements(e, 0));
    const Vec2 b = mesh.node(mesh.elements(e, 1));
    const Vec2 c = mesh.node(mesh.elements(e, 2));
    const Eigen::Matrix3d ke = p1_stiffness(a, b, c, mat.tensor_at(mesh.element_centroid(e)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(mesh.elements(e, i), mesh.elements(e, j), ke(i, j));
  }
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat assemble_mass(const Mesh& mesh, const std::map<int, ResolvedMaterial>& materials) {
  const int n = mesh.node_count();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  for (long e = 0; e < mesh.element_count(); ++e) {
    const ResolvedMaterial& mat = material_for(materials, mesh.element_region(e));
    const Vec2 a = mesh.node(mesh.elements(e, 0));
    const Vec2 b = mesh.node(mesh.elements(e, 1));
    const Vec2 c = mesh.node(mesh.elements(e, 2));
    const Eigen::Matrix3d me = p1_mass(a, b, c, mat.volumetric_heat_capacity);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(mesh.elements(e, i), mesh.elements(e, j), me(i, j));
  }
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec assemble_source(const Mesh& mesh, const std::map<int, double>& density_by_region) {
  Vec out = Vec::Zero(mesh.node_count());
  for (long e = 0; e < mesh.element_count(); ++e) {
    auto it = density_by_region.find(mesh.element_region(e));
    if (it == density_by_region.end()) continue;
    const Vec2 a = mesh.node(mesh.elements(e, 0));
    const Vec2 b = mesh.node(mesh.elements(e, 1));
    const Vec2 c = mesh.node(mesh.elements(e, 2));
    const Vec3 fe = p1_source_load(a, b, c, it->second);
    for (int i = 0; i < 3; ++i) out[mesh.elements(e, i)] += fe[i];
  }
  return out;
}

RobinContribution assemble_robin(const Mesh& mesh, int edge_set_tag,
                                 double film_coefficient) {
  const int n = mesh.node_count();
  RobinContribution out;
  out.unit_reference_load = Vec::Zero(n);
  std::vector<Triplet> trips;
  for (int idx : mesh.edges_with_tag(edge_set_tag)) {
    const TaggedEdge& edge = mesh.tagged_edges[static_cast<std::size_t>(idx)];
    const double length = (mesh.node(edge.nodes[1]) - mesh.node(edge.nodes[0])).norm();
    const Eigen::Matrix2d he = robin_edge_matrix(film_coefficient, length);
    const Eigen::Vector2d fe = robin_edge_load(film_coefficient, length);
    for (int i = 0; i < 2; ++i) {
      out.unit_reference_load[edge.nodes[i]] += fe[i];
      for (int j = 0; j < 2; ++j) trips.emplace_back(edge.nodes[i], edge.nodes[j], he(i, j));
    }
    out.measure += length;
  }
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  return out;
}

RobinContribution assemble_robin_volumetric(const Mesh& mesh, int region_tag,
                                            double volumetric_coefficient) {
  const int n = mesh.node_count();
  RobinContribution out;
  out.unit_reference_load = Vec::Zero(n);
  std::vector<Triplet> trips;
  for (long e = 0; e < mesh.element_count(); ++e) {
    if (mesh.element_region(e) != region_tag) continue;
    const Vec2 a = mesh.node(mesh.elements(e, 0));
    const Vec2 b = mesh.node(mesh.elements(e, 1));
    const Vec2 c = mesh.node(mesh.elements(e, 2));
    const Eigen::Matrix3d he = p1_mass(a, b, c, volumetric_coefficient);
    const Vec3 fe = p1_source_load(a, b, c, volumetric_coefficient);
    for (int i = 0; i < 3; ++i) {
      out.unit_reference_load[mesh.elements(e, i)] += fe[i];
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(mesh.elements(e, i), mesh.elements(e, j), he(i, j));
    }
    out.measure += mesh.element_area(e);
  }
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  return out;
}

ConstrainedOperator::ConstrainedOperator(const SpMat& matrix,
                                         std::vector<int> constrained_nodes,
                                         SolverBackend backend)
    : n_(static_cast<int>(matrix.rows())),
      backend_(backend),
      constrained_(std::move(constrained_nodes)) {
  if (matrix.rows() != matrix.cols()) throw Error("constrained operator needs a square matrix");
  std::sort(constrained_.begin(), constrained_.end());
  constrained_.erase(std::unique(constrained_.begin(), constrained_.end()),
                     constrained_.end());
  if (!constrained_.empty() && (constrained_.front() < 0 || constrained_.back() >= n_))
    throw Error("constrained node index out of range");

  std::vector<char> is_constrained(static_cast<std::size_t>(n_), 0);
  for (int node : constrained_) is_constrained[static_cast<std::size_t>(node)] = 1;
  full_to_free_.assign(static_cast<std::size_t>(n_), -1);
  free_.reserve(static_cast<std::size_t>(n_) - constrained_.size());
  for (int i = 0; i < n_; ++i) {
    if (!is_constrained[static_cast<std::size_t>(i)]) {
      full_to_free_[static_cast<std::size_t>(i)] = static_cast<int>(free_.size());
      free_.push_back(i);
    }
  }

  const int nf = free_count();
  const int nc = static_cast<int>(constrained_.size());
  std::vector<Triplet> ff, fc;
  for (int outer = 0; outer < matrix.outerSize(); ++outer) {
    for (SpMat::InnerIterator it(matrix, outer); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int col = static_cast<int>(it.col());
      if (is_constrained[static_cast<std::size_t>(row)]) continue;
      const int fr = full_to_free_[static_cast<std::size_t>(row)];
      if (is_constrained[static_cast<std::size_t>(col)]) {
        const int cc = static_cast<int>(
            std::lower_bound(constrained_.begin(), constrained_.end(), col) -
            constrained_.begin());
        fc.emplace_back(fr, cc, it.value());
      } else {
        ff.emplace_back(fr, full_to_free_[static_cast<std::size_t>(col)], it.value());
      }
    }
  }
  A_ff_.resize(nf, nf);
  A_ff_.setFromTriplets(ff.begin(), ff.end());
  A_fc_.resize(nf, nc);
  A_fc_.setFromTriplets(fc.begin(), fc.end());

  Vec row_sums = Vec::Zero(nf);
  for (int outer = 0; outer < A_ff_.outerSize(); ++outer)
    for (SpMat::InnerIterator it(A_ff_, outer); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  norm_ = nf > 0 ? row_sums.maxCoeff() : 0.0;

  if (nf > 0) {
    if (backend_ == SolverBackend::direct) {
      ldlt_.compute(A_ff_);
      if (ldlt_.info() != Eigen::Success)
        throw NumericalError("factorisation failed; the system may be singular");
    } else {
      cg_.setTolerance(kLinearSolveTolerance);
      cg_.setMaxIterations(std::max(1000, 4 * nf));
      cg_.compute(A_ff_);
    }
  }
}

Vec ConstrainedOperator::solve(const Vec& rhs, const Vec& constrained_values) const {
  if (rhs.size() != n_) throw Error("right-hand side size mismatch");
  if (constrained_values.size() != static_cast<long>(constrained_.size()))
    throw Error("constrained value count mismatch");

  Vec x = Vec::Zero(n_);
  for (std::size_t i = 0; i < constrained_.size(); ++i)
    x[constrained_[i]] = constrained_values[static_cast<long>(i)];
  const int nf = free_count();
  if (nf == 0) return x;

  Vec bf(nf);
  for (int i = 0; i < nf; ++i) bf[i] = rhs[free_[static_cast<std::size_t>(i)]];
  if (!constrained_.empty()) bf -= A_fc_ * constrained_values;

  Vec xf;
  if (backend_ == SolverBackend::direct) {
    xf = ldlt_.solve(bf);
  } else {
    xf = cg_.solve(bf);
    if (cg_.info() != Eigen::Success) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "conjugate gradient stalled after %ld iterations (error %.3g)",
                    static_cast<long>(cg_.iterations()), cg_.error());
      throw NumericalError(msg);
    }
  }

  const double backward = (A_ff_ * xf - bf).cwiseAbs().maxCoeff() /
                          (norm_ * xf.cwiseAbs().maxCoeff() + bf.cwiseAbs().maxCoeff() +
                           std::numeric_limits<double>::min());
  if (!(backward <= kLinearSolveTolerance)) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "linear solve backward error %.3g exceeds %.1g; system singular or badly scaled",
                  backward, kLinearSolveTolerance);
    throw NumericalError(msg);
  }

  for (int i = 0; i < nf; ++i) x[free_[static_cast<std::size_t>(i)]] = xf[i];
  return x;
}

Vec LinearSystem::constrained_values_at(double time) const {
  Vec out = Vec::Zero(static_cast<long>(constrained_nodes.size()));
  for (const DirichletTerm& term : dirichlet) {
    const double value = term.value(time);
    for (int node : term.nodes) {
      const auto it =
          std::lower_bound(constrained_nodes.begin(), constrained_nodes.end(), node);
      out[it - constrained_nodes.begin()] = value;
    }
  }
  return out;
}

Vec LinearSystem::exchange_load_at(double time) const {
  Vec out = Vec::Zero(size);
  for (const RobinTerm& term : robin) out += term.reference(time) * term.unit_reference_load;
  return out;
}

LinearSystem build_linear_system(const Mesh& mesh, const MaterialTable& materials,
                                 const BoundarySpec& bc,
                                 std::vector<std::string>* warnings) {
  bc.validate(mesh, warnings);
  const auto resolved = resolve_materials(mesh, materials);

  LinearSystem sys;
  sys.size = mesh.node_count();
  sys.conduction = assemble_stiffness(mesh, resolved);
  sys.mass = assemble_mass(mesh, resolved);
  sys.exchange.resize(sys.size, sys.size);

  for (const auto& [name, spec] : bc.robin) {
    RobinContribution c =
        assemble_robin(mesh, *mesh.tags.edge_set_id(name), spec.film_coefficient);
    sys.exchange += c.matrix;
    sys.robin.push_back(RobinTerm{name, false, spec.film_coefficient, spec.reference,
                                  std::move(c.matrix), std::move(c.unit_reference_load),
                                  c.measure});
  }
  for (const auto& [name, spec] : bc.volumetric_exchange) {
    RobinContribution c = assemble_robin_volumetric(mesh, *mesh.tags.region_id(name),
                                                    spec.film_coefficient);
    sys.exchange += c.matrix;
    sys.robin.push_back(RobinTerm{name, true, spec.film_coefficient, spec.reference,
                                  std::move(c.matrix), std::move(c.unit_reference_load),
                                  c.measure});
  }

  for (const auto& [name, schedule] : bc.dirichlet) {
    DirichletTerm term;
    term.edge_set = name;
    term.value = schedule;
    for (int idx : mesh.edges_with_tag(name)) {
      const TaggedEdge& edge = mesh.tagged_edges[static_cast<std::size_t>(idx)];
      term.nodes.push_back(edge.nodes[0]);
      term.nodes.push_back(edge.nodes[1]);
    }
    std::sort(term.nodes.begin(), term.nodes.end());
    term.nodes.erase(std::unique(term.nodes.begin(), term.nodes.end()), term.nodes.end());
    sys.dirichlet.push_back(std::move(term));
  }

  std::map<int, const DirichletTerm*> owner;
  for (const DirichletTerm& term : sys.dirichlet) {
    for (int node : term.nodes) {
      auto [it, inserted] = owner.emplace(node, &term);
      if (!inserted && !(it->second->value == term.value))
        throw ConfigError("node " + std::to_string(node) +
                          " is prescribed by both '" + it->second->edge_set + "' and '" +
                          term.edge_set + "' with different temperatures");
    }
  }
  sys.constrained_nodes.reserve(owner.size());
  for (const auto& [node, term] : owner) {
    (void)term;
    sys.constrained_nodes.push_back(node);
  }
  return sys;
}

Vec solve_steady(const LinearSystem& system, const Vec& load, double time,
                 SolverBackend backend) {
  if (load.size() != system.size) throw Error("load vector size mismatch");
  if (system.constrained_nodes.empty() && system.robin.empty())
    throw ConfigError(
        "steady problem has neither a prescribed temperature nor a film boundary; "
        "the temperature level is undetermined");
  const SpMat A = system.conduction + system.exchange;
  const Vec rhs = load + system.exchange_load_at(time);
  ConstrainedOperator op(A, system.constrained_nodes, backend);
  return op.solve(rhs, system.constrained_values_at(time));
}

}  // namespace emtherm
