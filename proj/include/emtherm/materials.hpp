#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emtherm/mesh.hpp"
#include "emtherm/types.hpp"

namespace emtherm {

// Where a property value came from. Carried through to reports so fitted
// values are never mistaken for handbook data.
enum class Provenance { literature, fitted, user };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// Properties of one mesh region. Conductivity is given along the local
// radial and tangential directions; equal values mean the region is
// isotropic in the plane. The axial value is carried for reporting only,
// the cross-section model never uses it.
struct MaterialRegion {
  double volumetric_heat_capacity = 0.0;  // J/(m^3 K)
  double lambda_radial = 0.0;             // W/(m K)
  double lambda_tangential = 0.0;
  std::optional<double> lambda_axial;
  Provenance provenance = Provenance::user;

  bool isotropic() const { return lambda_radial == lambda_tangential; }

  // Collapse the in-plane tensor to a single effective value. Used when a
  // calibrated lumped conductivity replaces the handbook tensor.
  void set_effective_conductivity(double lambda, Provenance source);

  void validate(std::string_view region_name) const;
};

// Region name -> properties. Names must match the mesh region tags.
class MaterialTable {
 public:
  void set(std::string region_name, MaterialRegion material);
  const MaterialRegion& at(std::string_view region_name) const;
  MaterialRegion& at(std::string_view region_name);
  bool contains(std::string_view region_name) const;

  const std::map<std::string, MaterialRegion, std::less<>>& regions() const {
    return regions_;
  }

  bool operator==(const MaterialTable&) const = default;

 private:
  std::map<std::string, MaterialRegion, std::less<>> regions_;
};

// Handbook values for the default machine regions. The cage entry is a
// plain aluminium fill standing in for bar plus trapped air.
MaterialTable literature_defaults();

// literature_defaults() with the calibrated effective conductivities
// applied to the stator yoke, rotor yoke, air gap and shaft.
MaterialTable fitted_defaults();

// Shaft-surface film coefficient belonging to the fitted table, W/(m^2 K).
inline constexpr double kFittedRobinH = 0.235;

// Per-element view used by assembly: material constants plus the rule for
// orienting the conductivity tensor at a point.
struct ResolvedMaterial {
  double volumetric_heat_capacity = 0.0;
  double lambda_radial = 0.0;
  double lambda_tangential = 0.0;

  // Conductivity tensor in Cartesian axes at the given position. Isotropic
  // regions take a rotation-free path so the tensor is exactly diagonal.
  Mat2 tensor_at(const Vec2& position) const;
};

// Match mesh regions with table entries. Every region present in the mesh
// must have a material; extra table entries are ignored. The result maps
// region tag id -> material.
std::map<int, ResolvedMaterial> resolve_materials(const Mesh& mesh,
                                                  const MaterialTable& table);

// CSV dump: region,c_v_J_per_m3K,lambda_radial_W_per_mK,
// lambda_tangential_W_per_mK,lambda_axial_W_per_mK,provenance.
std::string materials_csv(const MaterialTable& table);

}  // namespace emtherm
