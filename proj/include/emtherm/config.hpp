#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emtherm/calibrate.hpp"
#include "emtherm/fem.hpp"
#include "emtherm/machine_geometry.hpp"
#include "emtherm/materials.hpp"
#include "emtherm/transient.hpp"

namespace emtherm {

// Calibration section as given in the config; the measured CSV files are
// read later, when the problem is assembled against a mesh.
struct CalibrationGroupConfig {
  std::string probe;
  std::string measured_csv;  // resolved against the config file directory
  std::vector<std::string> measured_probes;
  double weight = 1.0;
};

struct CalibrationConfig {
  std::vector<ParameterSpec> parameters;
  std::vector<CalibrationGroupConfig> groups;
  int max_evaluations = 500;
  unsigned seed = 0;
};

struct OutputConfig {
  std::string directory = "out";
  bool write_vtk = true;
  bool write_field_csv = true;
};

// Parsed and defaulted run configuration. The JSON schema is documented in
// the README; unknown keys are rejected wholesale.
struct RunConfig {
  bool mesh_from_file = false;
  std::string msh_path;  // resolved, set when mesh_from_file
  MachineGeometry geometry;
  int resolution_level = 1;

  MaterialTable materials;
  BoundarySpec boundary;

  std::optional<ScenarioSpec> scenario;  // probes left empty until resolved

  bool probes_auto = true;
  std::map<std::string, Vec2> probes;  // explicit table when not auto

  std::optional<CalibrationConfig> calibration;
  OutputConfig output;

  // The probe table to use: the explicit one, or the generated machine
  // defaults. Meshes loaded from file need explicit probes.
  std::map<std::string, Vec2> resolved_probes() const;
};

RunConfig parse_config(const std::string& text, const std::string& base_dir);
RunConfig read_config_file(const std::string& path);

// FNV-1a 64 over the canonical resolved document. The output section is
// excluded, so re-pointing outputs keeps the hash; everything that changes
// results changes it.
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace emtherm
