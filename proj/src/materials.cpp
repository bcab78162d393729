#include "emtherm/materials.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "emtherm/machine_geometry.hpp"

namespace emtherm {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::literature: return "literature";
    case Provenance::fitted: return "fitted";
    case Provenance::user: return "user";
  }
  return "user";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "literature") return Provenance::literature;
  if (s == "fitted") return Provenance::fitted;
  if (s == "user") return Provenance::user;
  throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

void MaterialRegion::set_effective_conductivity(double lambda, Provenance source) {
  lambda_radial = lambda;
  lambda_tangential = lambda;
  provenance = source;
}

void MaterialRegion::validate(std::string_view region_name) const {
  auto bad = [&](const char* what) {
    throw ConfigError("material '" + std::string(region_name) + "': " + what);
  };
  if (!std::isfinite(volumetric_heat_capacity) || volumetric_heat_capacity <= 0.0)
    bad("volumetric heat capacity must be positive");
  if (!std::isfinite(lambda_radial) || lambda_radial <= 0.0)
    bad("radial conductivity must be positive");
  if (!std::isfinite(lambda_tangential) || lambda_tangential <= 0.0)
    bad("tangential conductivity must be positive");
  if (lambda_axial && (!std::isfinite(*lambda_axial) || *lambda_axial <= 0.0))
    bad("axial conductivity must be positive");
}

void MaterialTable::set(std::string region_name, MaterialRegion material) {
  material.validate(region_name);
  regions_[std::move(region_name)] = material;
}

const MaterialRegion& MaterialTable::at(std::string_view region_name) const {
  auto it = regions_.find(region_name);
  if (it == regions_.end())
    throw ConfigError("no material defined for region '" + std::string(region_name) + "'");
  return it->second;
}

MaterialRegion& MaterialTable::at(std::string_view region_name) {
  auto it = regions_.find(region_name);
  if (it == regions_.end())
    throw ConfigError("no material defined for region '" + std::string(region_name) + "'");
  return it->second;
}

bool MaterialTable::contains(std::string_view region_name) const {
  return regions_.find(region_name) != regions_.end();
}

MaterialTable literature_defaults() {
  MaterialTable t;
  auto iso = [](double lambda, double c_v, Provenance p) {
    MaterialRegion m;
    m.volumetric_heat_capacity = c_v;
    m.lambda_radial = lambda;
    m.lambda_tangential = lambda;
    m.provenance = p;
    return m;
  };

  MaterialRegion lamination = iso(40.0, 3.925e6, Provenance::literature);
  lamination.lambda_axial = 2.5;  // stacking direction, reporting only
  t.set(region_names::kStatorYoke, lamination);
  t.set(region_names::kRotorYoke, lamination);

  t.set(region_names::kConductorUpper, iso(398.0, 3.435e6, Provenance::literature));
  t.set(region_names::kConductorLower, iso(398.0, 3.435e6, Provenance::literature));
  t.set(region_names::kSlotInsulation, iso(0.7, 7.905e6, Provenance::literature));
  t.set(region_names::kAirGap, iso(0.026, 1.210e3, Provenance::literature));
  t.set(region_names::kShaft, iso(59.6, 3.777e6, Provenance::literature));
  t.set(region_names::kCage, iso(237.0, 2.422e6, Provenance::user));
  return t;
}

MaterialTable fitted_defaults() {
  MaterialTable t = literature_defaults();
  t.at(region_names::kStatorYoke).set_effective_conductivity(24.0, Provenance::fitted);
  t.at(region_names::kRotorYoke).set_effective_conductivity(16.0, Provenance::fitted);
  t.at(region_names::kAirGap).set_effective_conductivity(0.052, Provenance::fitted);
  t.at(region_names::kShaft).set_effective_conductivity(59.6, Provenance::fitted);
  return t;
}

Mat2 ResolvedMaterial::tensor_at(const Vec2& position) const {
  Mat2 out;
  if (lambda_radial == lambda_tangential) {
    out << lambda_radial, 0.0, 0.0, lambda_radial;
    return out;
  }
  const double norm = position.norm();
  Vec2 e_r;
  if (norm < 1e-12) {
    e_r << 1.0, 0.0;  // direction undefined at the axis; any unit vector works
  } else {
    e_r = position / norm;
  }
  const Vec2 e_t(-e_r.y(), e_r.x());
  out = lambda_radial * (e_r * e_r.transpose()) +
        lambda_tangential * (e_t * e_t.transpose());
  return out;
}

std::map<int, ResolvedMaterial> resolve_materials(const Mesh& mesh,
                                                  const MaterialTable& table) {
  std::set<int> present;
  for (long e = 0; e < mesh.element_count(); ++e) present.insert(mesh.element_region(e));

  std::map<int, ResolvedMaterial> out;
  for (int tag : present) {
    const std::string& name = mesh.tags.region_name(tag);
    const MaterialRegion& m = table.at(name);
    m.validate(name);
    out[tag] = ResolvedMaterial{m.volumetric_heat_capacity, m.lambda_radial,
                                m.lambda_tangential};
  }
  return out;
}

std::string materials_csv(const MaterialTable& table) {
  std::string out =
      "region,c_v_J_per_m3K,lambda_radial_W_per_mK,lambda_tangential_W_per_mK,"
      "lambda_axial_W_per_mK,provenance\n";
  char line[256];
  for (const auto& [name, m] : table.regions()) {
    std::string axial;
    if (m.lambda_axial) {
      std::snprintf(line, sizeof line, "%.17g", *m.lambda_axial);
      axial = line;
    }
    std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%s,%s\n", name.c_str(),
                  m.volumetric_heat_capacity, m.lambda_radial, m.lambda_tangential,
                  axial.c_str(), std::string(to_string(m.provenance)).c_str());
    out += line;
  }
  return out;
}

}  // namespace emtherm
