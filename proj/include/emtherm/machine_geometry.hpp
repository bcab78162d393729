#pragma once

#include <map>
#include <string>

#include "emtherm/mesh.hpp"

namespace emtherm {

// Cross-section parameters of the modelled machine. Radii describe the
// concentric layers: shaft, rotor yoke, cage ring, air gap, stator annulus.
// Stator slots open toward the bore and hold round conductors in an upper
// (bore-side) and a lower (slot-bottom) winding layer. Default numbers are
// plausible values for a small (few-kW) induction machine frame; they are
// stand-ins, not measured data.
struct MachineGeometry {
  double shaft_radius_m = 0.024;
  double rotor_yoke_outer_radius_m = 0.0515;
  double air_gap_thickness_m = 0.0004;
  double stator_inner_radius_m = 0.055;
  double stator_outer_radius_m = 0.0875;

  int slot_count = 36;  // full machine; must be divisible by 4
  double slot_width_m = 0.006;
  double slot_depth_m = 0.016;

  int conductors_per_slot = 18;
  double conductor_radius_m = 0.00075;

  double model_fraction = 0.25;  // quarter symmetry is the only supported cut

  // Throws ConfigError naming the violated constraint.
  void validate() const;

  // Conductor packing derived from slot width: grid columns, rows, and how
  // many bore-side rows belong to the upper winding layer.
  int conductor_columns() const;
  int conductor_rows() const;
  int upper_layer_rows() const;

  double cage_outer_radius_m() const {
    return stator_inner_radius_m - air_gap_thickness_m;
  }
};

namespace region_names {
inline constexpr const char* kShaft = "shaft";
inline constexpr const char* kRotorYoke = "rotor_yoke";
inline constexpr const char* kCage = "cage";
inline constexpr const char* kAirGap = "air_gap";
inline constexpr const char* kStatorYoke = "stator_yoke";
inline constexpr const char* kSlotInsulation = "slot_insulation";
inline constexpr const char* kConductorUpper = "conductor_upper";
inline constexpr const char* kConductorLower = "conductor_lower";
}  // namespace region_names

namespace boundary_names {
inline constexpr const char* kJacket = "jacket";
inline constexpr const char* kSymmetryCut = "symmetry_cut";
inline constexpr const char* kShaftSurface = "shaft_surface";
}  // namespace boundary_names

// Builds the quarter cross-section as a structured polar triangulation.
// Layer circles and slot outlines are grid lines; each conductor becomes a
// polygonal disk (4 * 2^level segments) embedded in its slot cell. The
// jacket arc and the two radial cuts tag the hull; the circle at the shaft
// radius is tagged as an interior edge set with both neighbours recorded.
// resolution_level >= 1 halves target element sizes per level.
Mesh build_machine_mesh(const MachineGeometry& geometry, int resolution_level);

// Canonical probe points: centre conductor of the upper winding layer of
// the first slot, stator yoke above a tooth, mid rotor yoke, mid shaft.
std::map<std::string, Vec2> default_probes(const MachineGeometry& geometry);

}  // namespace emtherm
