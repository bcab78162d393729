#include "emtherm/machine_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "emtherm/element_kernels.hpp"

// Mesh layout
// -----------
// The quarter section is generated on a polar parameter grid. One global
// angular subdivision serves every layer; radial subdivisions are chosen per
// layer. Region interfaces (layer circles, slot outlines) coincide with grid
// lines, so the triangulation conforms to them by construction. The polar
// map preserves orientation, and every emitted triangle is checked for
// positive Cartesian area.
//
// Slots are polar rectangles: angular width slot_width / stator_inner_radius
// centred in their sector, radial extent [bore, bore + depth]. The slot
// interior is a grid of packing cells, one conductor per cell, with one
// margin cell of insulation at the opening, the bottom, and both sides of
// the conductor block. Each cell is subdivided k x k (k = 2^level); a cell
// holding a conductor swaps its subcells for an O-grid template: a fan of
// 4k triangles inside the conductor polygon and a transition ring tying the
// polygon to the 4k structured nodes on the cell perimeter. In parameter
// space the polygon is an ellipse (semi-axes a, a / r_c), which the polar
// map sends to a near-exact circle of radius a.
//
// The big arcs satisfy the sagitta bound radius/103 already at level 1
// because the angular grid is slot-driven and much finer than the bound
// requires; conductor polygons follow the 4k-segment rule instead.

namespace emtherm {

namespace {

constexpr double kPi = std::numbers::pi;

// Fraction of a packing half-cell a conductor may span; beyond this the
// transition ring becomes too thin to mesh cleanly.
constexpr double kMaxConductorFill = 0.85;

// Region tag ids, fixed for generated meshes.
enum RegionId : int {
  kShaftId = 1,
  kRotorYokeId = 2,
  kCageId = 3,
  kAirGapId = 4,
  kStatorYokeId = 5,
  kSlotInsulationId = 6,
  kConductorUpperId = 7,
  kConductorLowerId = 8,
};
enum BoundaryId : int {
  kJacketId = 11,
  kSymmetryCutId = 12,
  kShaftSurfaceId = 13,
};

enum class LayerKind { shaft, rotor_yoke, cage, air_gap, band, outer_yoke };

}  // namespace

void MachineGeometry::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("machine geometry: ") + what);
  };
  require(std::isfinite(shaft_radius_m) && shaft_radius_m > 0.0,
          "shaft radius must be positive");
  require(rotor_yoke_outer_radius_m > shaft_radius_m,
          "rotor yoke outer radius must exceed the shaft radius");
  require(air_gap_thickness_m > 0.0, "air gap thickness must be positive");
  require(cage_outer_radius_m() > rotor_yoke_outer_radius_m,
          "air gap thickness leaves no room for the cage ring");
  require(stator_inner_radius_m > cage_outer_radius_m(),
          "stator inner radius must exceed the cage outer radius");
  require(stator_outer_radius_m > stator_inner_radius_m,
          "stator outer radius must exceed the stator inner radius");
  require(model_fraction == 0.25, "only quarter symmetry (model_fraction 0.25) is supported");
  require(slot_count >= 4, "slot count must be at least 4");
  require(slot_count % 4 == 0, "slot count must be divisible by 4 for quarter symmetry");
  require(slot_width_m > 0.0, "slot width must be positive");
  require(slot_depth_m > 0.0, "slot depth must be positive");
  require(slot_depth_m < stator_outer_radius_m - stator_inner_radius_m,
          "slot depth exceeds the stator annulus thickness");
  const int sectors = slot_count / 4;
  const double sector = (kPi / 2.0) / sectors;
  const double slot_angle = slot_width_m / stator_inner_radius_m;
  require(slot_angle < sector, "slot width exceeds the sector arc available per slot");
  require(conductors_per_slot >= 0, "conductor count must be non-negative");
  if (conductors_per_slot > 0) {
    require(conductor_radius_m > 0.0, "conductor radius must be positive");
    const int cols = conductor_columns();
    const int rows = conductor_rows();
    const double cell_r = slot_depth_m / (rows + 2);
    require(2.0 * conductor_radius_m <= kMaxConductorFill * cell_r,
            "conductors do not fit radially: slot too shallow for the conductor count");
    const double col_angle = slot_angle / cols;
    const double innermost_row_radius = stator_inner_radius_m + 1.5 * cell_r;
    require(2.0 * conductor_radius_m <=
                kMaxConductorFill * innermost_row_radius * col_angle,
            "conductors do not fit across the slot width");
  }
}

int MachineGeometry::conductor_columns() const {
  if (conductors_per_slot <= 0) return 0;
  const int by_width =
      static_cast<int>(std::floor(slot_width_m / (2.5 * conductor_radius_m)));
  return std::clamp(by_width, 1, conductors_per_slot);
}

int MachineGeometry::conductor_rows() const {
  const int cols = conductor_columns();
  if (cols == 0) return 0;
  return (conductors_per_slot + cols - 1) / cols;
}

int MachineGeometry::upper_layer_rows() const {
  const int rows = conductor_rows();
  return (rows + 1) / 2;
}

namespace {

struct GridPlan {
  // Angular grid, shared by all rings.
  std::vector<double> angles;        // size n_cols + 1, [0, pi/2]
  int cols_per_sector = 0;
  int tooth_cols = 0;                // per half tooth
  int slot_cols = 0;                 // cols inside the slot span

  // Radial rings (excluding the origin), ascending.
  std::vector<double> radii;
  std::vector<LayerKind> interval_kind;  // per interval; interval i ends at radii[i]
  int shaft_surface_ring = -1;
  int band_first_interval = -1;

  int k = 0;  // subcells per packing-cell edge
  int n_cols() const { return static_cast<int>(angles.size()) - 1; }
  int n_rings() const { return static_cast<int>(radii.size()); }
};

GridPlan plan_grid(const MachineGeometry& g, int level) {
  GridPlan plan;
  plan.k = 1 << level;

  const int sectors = g.slot_count / 4;
  const double sector = (kPi / 2.0) / sectors;
  const double slot_angle = g.slot_width_m / g.stator_inner_radius_m;
  const double half_tooth = (sector - slot_angle) / 2.0;
  const int cols = g.conductor_columns();
  const double band_mid_r = g.stator_inner_radius_m + 0.5 * g.slot_depth_m;

  // Subcolumn target: one conductor-cell width split k ways.
  const double cell_w = cols > 0 ? g.slot_width_m / cols : g.slot_width_m;
  const double sub_target = cell_w / plan.k;
  plan.tooth_cols =
      std::max(1, static_cast<int>(std::lround(half_tooth * band_mid_r / sub_target)));
  plan.slot_cols = cols > 0 ? cols * plan.k : plan.k;
  plan.cols_per_sector = 2 * plan.tooth_cols + plan.slot_cols;

  plan.angles.reserve(sectors * plan.cols_per_sector + 1);
  plan.angles.push_back(0.0);
  for (int s = 0; s < sectors; ++s) {
    const double t0 = s * sector;
    const double slot_start = t0 + half_tooth;
    const double slot_end = slot_start + slot_angle;
    const double t1 = (s + 1) * sector;
    for (int i = 1; i <= plan.tooth_cols; ++i)
      plan.angles.push_back(t0 + half_tooth * i / plan.tooth_cols);
    for (int i = 1; i <= plan.slot_cols; ++i)
      plan.angles.push_back(slot_start + slot_angle * i / plan.slot_cols);
    for (int i = 1; i <= plan.tooth_cols; ++i)
      plan.angles.push_back(slot_end + half_tooth * i / plan.tooth_cols);
    plan.angles.back() = t1;  // pin sector boundaries exactly
  }
  plan.angles.back() = kPi / 2.0;

  // Radial rings. Annular layers aim at a base element size halving per
  // level; the slot band inherits its subdivision from the packing grid.
  const double h0 = 0.003 / (1 << (level - 1));
  auto add_layer = [&plan](double r0, double r1, int divisions, LayerKind kind) {
    for (int d = 1; d <= divisions; ++d) {
      plan.radii.push_back(r0 + (r1 - r0) * d / divisions);
      plan.interval_kind.push_back(kind);
    }
    plan.radii.back() = r1;
  };
  auto auto_divs = [h0](double thickness, int minimum) {
    return std::max(minimum, static_cast<int>(std::lround(thickness / h0)));
  };

  add_layer(0.0, g.shaft_radius_m, auto_divs(g.shaft_radius_m, 2), LayerKind::shaft);
  plan.shaft_surface_ring = plan.n_rings() - 1;
  add_layer(g.shaft_radius_m, g.rotor_yoke_outer_radius_m,
            auto_divs(g.rotor_yoke_outer_radius_m - g.shaft_radius_m, 1),
            LayerKind::rotor_yoke);
  add_layer(g.rotor_yoke_outer_radius_m, g.cage_outer_radius_m(),
            auto_divs(g.cage_outer_radius_m() - g.rotor_yoke_outer_radius_m, 1),
            LayerKind::cage);
  add_layer(g.cage_outer_radius_m(), g.stator_inner_radius_m,
            auto_divs(g.air_gap_thickness_m, 1), LayerKind::air_gap);
  plan.band_first_interval = plan.n_rings();
  const int band_cells = (g.conductors_per_slot > 0 ? g.conductor_rows() + 2 : 2);
  add_layer(g.stator_inner_radius_m, g.stator_inner_radius_m + g.slot_depth_m,
            band_cells * plan.k, LayerKind::band);
  add_layer(g.stator_inner_radius_m + g.slot_depth_m, g.stator_outer_radius_m,
            auto_divs(g.stator_outer_radius_m - g.stator_inner_radius_m - g.slot_depth_m, 1),
            LayerKind::outer_yoke);
  return plan;
}

class MeshBuilder {
 public:
  explicit MeshBuilder(const GridPlan& plan) : plan_(plan) {
    const int structured = 1 + plan_.n_rings() * (plan_.n_cols() + 1);
    coords_.reserve(structured + 1024);
    coords_.emplace_back(0.0, 0.0);  // origin, id 0
    for (int i = 0; i < plan_.n_rings(); ++i) {
      const double r = plan_.radii[i];
      for (int j = 0; j <= plan_.n_cols(); ++j) {
        const double th = plan_.angles[j];
        double x = r * std::cos(th);
        double y = r * std::sin(th);
        if (j == 0) y = 0.0;
        if (j == plan_.n_cols()) x = 0.0;
        coords_.emplace_back(x, y);
      }
    }
  }

  int structured_node(int ring, int col) const {
    return 1 + ring * (plan_.n_cols() + 1) + col;
  }

  int add_node(double x, double y) {
    coords_.emplace_back(x, y);
    return static_cast<int>(coords_.size()) - 1;
  }

  void add_triangle(int a, int b, int c, int region) {
    const Vec2 pa(coords_[a].first, coords_[a].second);
    const Vec2 pb(coords_[b].first, coords_[b].second);
    const Vec2 pc(coords_[c].first, coords_[c].second);
    if (triangle_area<double>(pa, pb, pc) < 0.0) std::swap(b, c);
    triangles_.push_back({a, b, c});
    regions_.push_back(region);
  }

  void add_edge(int a, int b, int tag) { edges_.push_back(TaggedEdge{{a, b}, tag}); }

  Mesh finish(std::vector<std::string>* warnings) {
    // Structured nodes inside conductor patches are never referenced; compact
    // the numbering so every node carries mass.
    std::vector<int> remap(coords_.size(), -1);
    int used = 0;
    auto touch = [&](int n) {
      if (remap[n] == -1) remap[n] = 1;
    };
    for (const auto& t : triangles_) {
      touch(t[0]);
      touch(t[1]);
      touch(t[2]);
    }
    for (std::size_t n = 0; n < coords_.size(); ++n)
      if (remap[n] == 1) remap[n] = used++;

    Mesh mesh;
    mesh.nodes.resize(used, 2);
    for (std::size_t n = 0; n < coords_.size(); ++n) {
      if (remap[n] >= 0) {
        mesh.nodes(remap[n], 0) = coords_[n].first;
        mesh.nodes(remap[n], 1) = coords_[n].second;
      }
    }
    mesh.elements.resize(static_cast<long>(triangles_.size()), 3);
    mesh.element_region.resize(static_cast<long>(triangles_.size()));
    for (std::size_t e = 0; e < triangles_.size(); ++e) {
      for (int v = 0; v < 3; ++v) mesh.elements(static_cast<long>(e), v) = remap[triangles_[e][v]];
      mesh.element_region(static_cast<long>(e)) = regions_[e];
    }
    mesh.tagged_edges.reserve(edges_.size());
    for (auto edge : edges_) {
      edge.nodes[0] = remap[edge.nodes[0]];
      edge.nodes[1] = remap[edge.nodes[1]];
      mesh.tagged_edges.push_back(edge);
    }

    mesh.tags.add_region(kShaftId, region_names::kShaft);
    mesh.tags.add_region(kRotorYokeId, region_names::kRotorYoke);
    mesh.tags.add_region(kCageId, region_names::kCage);
    mesh.tags.add_region(kAirGapId, region_names::kAirGap);
    mesh.tags.add_region(kStatorYokeId, region_names::kStatorYoke);
    mesh.tags.add_region(kSlotInsulationId, region_names::kSlotInsulation);
    mesh.tags.add_region(kConductorUpperId, region_names::kConductorUpper);
    mesh.tags.add_region(kConductorLowerId, region_names::kConductorLower);
    mesh.tags.add_edge_set(kJacketId, boundary_names::kJacket);
    mesh.tags.add_edge_set(kSymmetryCutId, boundary_names::kSymmetryCut);
    mesh.tags.add_edge_set(kShaftSurfaceId, boundary_names::kShaftSurface);

    mesh.finalize(warnings);
    return mesh;
  }

 private:
  const GridPlan& plan_;
  std::vector<std::pair<double, double>> coords_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> regions_;
  std::vector<TaggedEdge> edges_;
};

// Angular cell -> is it inside a slot span, and which slot column.
struct SlotSpanIndex {
  int sector = -1;
  int local_col = -1;  // within the slot span, -1 outside
};

SlotSpanIndex classify_col(const GridPlan& plan, int col) {
  SlotSpanIndex out;
  out.sector = col / plan.cols_per_sector;
  const int local = col - out.sector * plan.cols_per_sector;
  if (local >= plan.tooth_cols && local < plan.tooth_cols + plan.slot_cols)
    out.local_col = local - plan.tooth_cols;
  return out;
}

int band_region(const GridPlan& plan, int col) {
  return classify_col(plan, col).local_col >= 0 ? kSlotInsulationId : kStatorYokeId;
}

}  // namespace

Mesh build_machine_mesh(const MachineGeometry& g, int resolution_level) {
  g.validate();
  if (resolution_level < 1) throw ConfigError("resolution_level must be at least 1");

  const GridPlan plan = plan_grid(g, resolution_level);
  MeshBuilder builder(plan);
  const int k = plan.k;
  const int cols = g.conductor_columns();
  const int upper_rows = g.upper_layer_rows();

  // Conductor patches: (interval, col) cells handled by O-grid templates.
  std::set<std::pair<int, int>> patch_cells;
  struct Patch {
    int first_interval;  // k intervals starting here
    int first_col;       // k angular cells starting here
    int region;
  };
  std::vector<Patch> patches;
  if (g.conductors_per_slot > 0) {
    const int sectors = g.slot_count / 4;
    for (int s = 0; s < sectors; ++s) {
      const int span_start = s * plan.cols_per_sector + plan.tooth_cols;
      for (int c = 0; c < g.conductors_per_slot; ++c) {
        const int row = c / cols;  // 0 = bore side
        const int col = c % cols;
        Patch p;
        p.first_interval = plan.band_first_interval + (1 + row) * k;
        p.first_col = span_start + col * k;
        p.region = row < upper_rows ? kConductorUpperId : kConductorLowerId;
        patches.push_back(p);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            patch_cells.insert({p.first_interval + i, p.first_col + j});
      }
    }
  }

  // Origin fan, then the structured quads.
  for (int j = 0; j < plan.n_cols(); ++j)
    builder.add_triangle(0, builder.structured_node(0, j), builder.structured_node(0, j + 1),
                         kShaftId);
  for (int i = 1; i < plan.n_rings(); ++i) {
    const LayerKind kind = plan.interval_kind[i];
    for (int j = 0; j < plan.n_cols(); ++j) {
      if (patch_cells.count({i, j})) continue;
      int region = kShaftId;
      switch (kind) {
        case LayerKind::shaft: region = kShaftId; break;
        case LayerKind::rotor_yoke: region = kRotorYokeId; break;
        case LayerKind::cage: region = kCageId; break;
        case LayerKind::air_gap: region = kAirGapId; break;
        case LayerKind::band: region = band_region(plan, j); break;
        case LayerKind::outer_yoke: region = kStatorYokeId; break;
      }
      const int a = builder.structured_node(i - 1, j);
      const int b = builder.structured_node(i, j);
      const int c = builder.structured_node(i, j + 1);
      const int d = builder.structured_node(i - 1, j + 1);
      builder.add_triangle(a, b, c, region);
      builder.add_triangle(a, c, d, region);
    }
  }

  // Conductor templates.
  const double a_cond = g.conductor_radius_m;
  for (const auto& p : patches) {
    const int is = p.first_interval;
    const int js = p.first_col;
    const double r_lo = plan.radii[is - 1];
    const double r_hi = plan.radii[is + k - 1];
    const double th_lo = plan.angles[js];
    const double th_hi = plan.angles[js + k];
    const double r_c = 0.5 * (r_lo + r_hi);
    const double th_c = 0.5 * (th_lo + th_hi);
    const double half_r = 0.5 * (r_hi - r_lo);
    const double half_th = 0.5 * (th_hi - th_lo);
    const double er = a_cond;         // parameter-space semi-axes
    const double eth = a_cond / r_c;
    if (er > kMaxConductorFill * half_r || eth > kMaxConductorFill * half_th)
      throw ConfigError("machine geometry: conductor does not fit its packing cell");

    // Perimeter cycle: 4k structured nodes, CCW in the (r, theta) plane.
    std::vector<int> perimeter;
    std::vector<std::pair<double, double>> perimeter_rt;
    auto push = [&](int ring, int col) {
      perimeter.push_back(builder.structured_node(ring, col));
      perimeter_rt.emplace_back(plan.radii[ring], plan.angles[col]);
    };
    for (int t = 0; t < k; ++t) push(is - 1 + t, js);
    for (int u = 0; u < k; ++u) push(is + k - 1, js + u);
    for (int t = 0; t < k; ++t) push(is + k - 1 - t, js + k);
    for (int u = 0; u < k; ++u) push(is - 1, js + k - u);

    const int m = 4 * k;
    const int centre = builder.add_node(r_c * std::cos(th_c), r_c * std::sin(th_c));
    std::vector<int> ring_nodes(m);
    for (int i = 0; i < m; ++i) {
      const double t = std::atan2((perimeter_rt[i].second - th_c) / half_th,
                                  (perimeter_rt[i].first - r_c) / half_r);
      const double r = r_c + er * std::cos(t);
      const double th = th_c + eth * std::sin(t);
      ring_nodes[i] = builder.add_node(r * std::cos(th), r * std::sin(th));
    }
    for (int i = 0; i < m; ++i) {
      const int n = (i + 1) % m;
      builder.add_triangle(centre, ring_nodes[i], ring_nodes[n], p.region);
      builder.add_triangle(ring_nodes[i], perimeter[n], perimeter[i], kSlotInsulationId);
      builder.add_triangle(ring_nodes[i], ring_nodes[n], perimeter[n], kSlotInsulationId);
    }
  }

  // Tagged edges: jacket arc, the two radial cuts, and the interior circle
  // at the shaft radius.
  const int outer_ring = plan.n_rings() - 1;
  for (int j = 0; j < plan.n_cols(); ++j)
    builder.add_edge(builder.structured_node(outer_ring, j),
                     builder.structured_node(outer_ring, j + 1), kJacketId);
  builder.add_edge(0, builder.structured_node(0, 0), kSymmetryCutId);
  for (int i = 0; i + 1 <= outer_ring; ++i)
    builder.add_edge(builder.structured_node(i, 0), builder.structured_node(i + 1, 0),
                     kSymmetryCutId);
  builder.add_edge(0, builder.structured_node(0, plan.n_cols()), kSymmetryCutId);
  for (int i = 0; i + 1 <= outer_ring; ++i)
    builder.add_edge(builder.structured_node(i, plan.n_cols()),
                     builder.structured_node(i + 1, plan.n_cols()), kSymmetryCutId);
  for (int j = 0; j < plan.n_cols(); ++j)
    builder.add_edge(builder.structured_node(plan.shaft_surface_ring, j),
                     builder.structured_node(plan.shaft_surface_ring, j + 1),
                     kShaftSurfaceId);

  std::vector<std::string> warnings;
  Mesh mesh = builder.finish(&warnings);
  return mesh;
}

std::map<std::string, Vec2> default_probes(const MachineGeometry& g) {
  g.validate();
  std::map<std::string, Vec2> probes;
  const int sectors = g.slot_count / 4;
  const double sector = (kPi / 2.0) / sectors;
  const double slot_angle = g.slot_width_m / g.stator_inner_radius_m;
  const double slot_centre = 0.5 * sector;

  Vec2 slot_point;
  if (g.conductors_per_slot > 0) {
    const int cols = g.conductor_columns();
    const int rows = g.conductor_rows();
    const double cell_r = g.slot_depth_m / (rows + 2);
    const int probe_row = g.upper_layer_rows() / 2;
    const int probe_col = cols / 2;
    const double r = g.stator_inner_radius_m + cell_r * (1 + probe_row + 0.5);
    const double th =
        slot_centre - 0.5 * slot_angle + (slot_angle / cols) * (probe_col + 0.5);
    slot_point = Vec2(r * std::cos(th), r * std::sin(th));
  } else {
    const double r = g.stator_inner_radius_m + 0.5 * g.slot_depth_m;
    slot_point = Vec2(r * std::cos(slot_centre), r * std::sin(slot_centre));
  }
  probes.emplace("slot", slot_point);

  const double yoke_r = 0.5 * (g.stator_inner_radius_m + g.slot_depth_m + g.stator_outer_radius_m);
  probes.emplace("stator_yoke", Vec2(yoke_r, 0.0));  // tooth centre line

  const double rotor_r = 0.5 * (g.shaft_radius_m + g.rotor_yoke_outer_radius_m);
  const double diag = kPi / 4.0;
  probes.emplace("rotor", Vec2(rotor_r * std::cos(diag), rotor_r * std::sin(diag)));
  probes.emplace("shaft",
                 Vec2(0.5 * g.shaft_radius_m * std::cos(diag), 0.5 * g.shaft_radius_m * std::sin(diag)));
  return probes;
}

}  // namespace emtherm
