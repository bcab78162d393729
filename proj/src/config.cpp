#include "emtherm/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <initializer_list>
#include <utility>

#include "emtherm/field_io.hpp"

namespace emtherm {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "must be an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (item.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) fail(path, "has unknown key \"" + item.key() + "\"");
  }
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

int as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "must be an integer");
  return v.get<int>();
}

bool as_boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

// A schedule is a plain number (constant) or a list of [time_s, value]
// breakpoints with strictly increasing times.
Schedule as_schedule(const json& v, const std::string& path) {
  if (v.is_number()) return Schedule(as_number(v, path));
  if (v.is_array()) {
    std::vector<double> times, values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const json& pair = v[i];
      const std::string at = path + "[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2) fail(at, "must be a [time_s, value] pair");
      times.push_back(as_number(pair[0], at));
      values.push_back(as_number(pair[1], at));
    }
    if (times.empty()) fail(path, "must not be empty");
    try {
      return Schedule(std::move(times), std::move(values));
    } catch (const Error& e) {
      fail(path, std::string("is invalid: ") + e.what());
    }
  }
  fail(path, "must be a number or a list of [time_s, value] pairs");
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.lexically_normal().string();
  return (std::filesystem::path(base_dir) / fp).lexically_normal().string();
}

void parse_geometry(const json& sec, const std::string& base_dir, RunConfig& out) {
  require_object(sec, "geometry");
  std::string preset = "machine";
  if (auto it = sec.find("preset"); it != sec.end())
    preset = as_string(*it, "geometry.preset");
  if (preset == "msh_file") {
    check_keys(sec, "geometry", {"preset", "msh_path"});
    auto it = sec.find("msh_path");
    if (it == sec.end()) fail("geometry", "with preset \"msh_file\" needs msh_path");
    out.mesh_from_file = true;
    out.msh_path = resolve_path(base_dir, as_string(*it, "geometry.msh_path"));
    return;
  }
  if (preset != "machine") fail("geometry.preset", "must be \"machine\" or \"msh_file\"");
  check_keys(sec, "geometry",
             {"preset", "resolution_level", "shaft_radius_m", "rotor_yoke_outer_radius_m",
              "air_gap_thickness_m", "stator_inner_radius_m", "stator_outer_radius_m",
              "slot_count", "slot_width_m", "slot_depth_m", "conductors_per_slot",
              "conductor_radius_m", "model_fraction"});
  MachineGeometry& g = out.geometry;
  auto number_field = [&sec](const char* key, double& slot) {
    if (auto it = sec.find(key); it != sec.end())
      slot = as_number(*it, std::string("geometry.") + key);
  };
  number_field("shaft_radius_m", g.shaft_radius_m);
  number_field("rotor_yoke_outer_radius_m", g.rotor_yoke_outer_radius_m);
  number_field("air_gap_thickness_m", g.air_gap_thickness_m);
  number_field("stator_inner_radius_m", g.stator_inner_radius_m);
  number_field("stator_outer_radius_m", g.stator_outer_radius_m);
  number_field("slot_width_m", g.slot_width_m);
  number_field("slot_depth_m", g.slot_depth_m);
  number_field("conductor_radius_m", g.conductor_radius_m);
  number_field("model_fraction", g.model_fraction);
  if (auto it = sec.find("slot_count"); it != sec.end())
    g.slot_count = as_integer(*it, "geometry.slot_count");
  if (auto it = sec.find("conductors_per_slot"); it != sec.end())
    g.conductors_per_slot = as_integer(*it, "geometry.conductors_per_slot");
  if (auto it = sec.find("resolution_level"); it != sec.end()) {
    out.resolution_level = as_integer(*it, "geometry.resolution_level");
    if (out.resolution_level < 1 || out.resolution_level > 6)
      fail("geometry.resolution_level", "must be between 1 and 6");
  }
  g.validate();
}

void parse_materials(const json& sec, RunConfig& out) {
  require_object(sec, "materials");
  check_keys(sec, "materials", {"table", "override"});
  std::string table = "fitted";
  if (auto it = sec.find("table"); it != sec.end())
    table = as_string(*it, "materials.table");
  if (table == "fitted")
    out.materials = fitted_defaults();
  else if (table == "literature")
    out.materials = literature_defaults();
  else
    fail("materials.table", "must be \"fitted\" or \"literature\"");

  auto ov = sec.find("override");
  if (ov == sec.end()) return;
  require_object(*ov, "materials.override");
  for (const auto& item : ov->items()) {
    const std::string& region = item.key();
    const json& body = item.value();
    const std::string path = "materials.override." + region;
    require_object(body, path);
    check_keys(body, path,
               {"volumetric_heat_capacity_J_per_m3C", "lambda_W_per_mC",
                "lambda_radial_W_per_mC", "lambda_tangential_W_per_mC",
                "lambda_axial_W_per_mC", "provenance"});
    MaterialRegion m;
    if (out.materials.contains(region)) m = out.materials.at(region);
    m.provenance = Provenance::user;
    if (auto p = body.find("provenance"); p != body.end()) {
      try {
        m.provenance = provenance_from_string(as_string(*p, path + ".provenance"));
      } catch (const Error& e) {
        fail(path + ".provenance", e.what());
      }
    }
    const bool have_iso = body.contains("lambda_W_per_mC");
    if (have_iso && (body.contains("lambda_radial_W_per_mC") ||
                     body.contains("lambda_tangential_W_per_mC")))
      fail(path, "gives both lambda_W_per_mC and directional values");
    if (auto p = body.find("volumetric_heat_capacity_J_per_m3C"); p != body.end())
      m.volumetric_heat_capacity = as_number(*p, path + ".volumetric_heat_capacity_J_per_m3C");
    if (have_iso) {
      const double v = as_number(body["lambda_W_per_mC"], path + ".lambda_W_per_mC");
      m.lambda_radial = v;
      m.lambda_tangential = v;
    }
    if (auto p = body.find("lambda_radial_W_per_mC"); p != body.end())
      m.lambda_radial = as_number(*p, path + ".lambda_radial_W_per_mC");
    if (auto p = body.find("lambda_tangential_W_per_mC"); p != body.end())
      m.lambda_tangential = as_number(*p, path + ".lambda_tangential_W_per_mC");
    if (auto p = body.find("lambda_axial_W_per_mC"); p != body.end())
      m.lambda_axial = as_number(*p, path + ".lambda_axial_W_per_mC");
    try {
      m.validate(region);
    } catch (const Error& e) {
      fail(path, std::string("is invalid: ") + e.what());
    }
    out.materials.set(region, m);
  }
}

// The defaults reproduce the standard machine setup: jacket held at 26 degC,
// shaft surface exchanging with 26 degC surroundings, cuts adiabatic.
void default_boundaries(RunConfig& out) {
  out.boundary.dirichlet[boundary_names::kJacket] = Schedule(26.0);
  out.boundary.robin[boundary_names::kShaftSurface] = RobinSpec{kFittedRobinH, Schedule(26.0)};
  out.boundary.adiabatic.insert(boundary_names::kSymmetryCut);
}

void parse_boundaries(const json& sec, RunConfig& out) {
  require_object(sec, "boundaries");
  for (const auto& item : sec.items()) {
    const std::string& name = item.key();
    const json& body = item.value();
    const std::string path = "boundaries." + name;
    require_object(body, path);
    auto t = body.find("type");
    if (t == body.end()) fail(path, "needs a type");
    const std::string type = as_string(*t, path + ".type");
    if (type == "dirichlet") {
      check_keys(body, path, {"type", "temperature_C"});
      auto v = body.find("temperature_C");
      if (v == body.end()) fail(path, "needs temperature_C");
      out.boundary.dirichlet[name] = as_schedule(*v, path + ".temperature_C");
    } else if (type == "robin" || type == "volumetric_exchange") {
      const char* hkey = type == "robin" ? "h_W_per_m2C" : "h_W_per_m3C";
      check_keys(body, path, {"type", hkey, "reference_C"});
      auto h = body.find(hkey);
      if (h == body.end()) fail(path, std::string("needs ") + hkey);
      RobinSpec spec;
      spec.film_coefficient = as_number(*h, path + "." + hkey);
      spec.reference = Schedule(26.0);
      if (auto r = body.find("reference_C"); r != body.end())
        spec.reference = as_schedule(*r, path + ".reference_C");
      if (type == "robin")
        out.boundary.robin[name] = std::move(spec);
      else
        out.boundary.volumetric_exchange[name] = std::move(spec);
    } else if (type == "adiabatic") {
      check_keys(body, path, {"type"});
      out.boundary.adiabatic.insert(name);
    } else {
      fail(path + ".type", "must be dirichlet, robin, adiabatic or volumetric_exchange");
    }
  }
}

void parse_scenario(const json& sec, RunConfig& out) {
  require_object(sec, "scenario");
  check_keys(sec, "scenario",
             {"initial_temperature_C", "loss_power_W", "loss_fraction_in_model",
              "axial_length_m", "time_step_s", "end_time_s", "theta", "solver",
              "record_balance", "snapshot_times_s"});
  ScenarioSpec s;
  s.initial_temperature = 26.0;
  s.loss_fraction_in_model = out.mesh_from_file ? 1.0 : out.geometry.model_fraction;
  s.axial_length_m = 0.18;
  if (auto it = sec.find("initial_temperature_C"); it != sec.end())
    s.initial_temperature = as_number(*it, "scenario.initial_temperature_C");
  if (auto it = sec.find("loss_power_W"); it != sec.end())
    s.loss_power = as_schedule(*it, "scenario.loss_power_W");
  if (auto it = sec.find("loss_fraction_in_model"); it != sec.end())
    s.loss_fraction_in_model = as_number(*it, "scenario.loss_fraction_in_model");
  if (auto it = sec.find("axial_length_m"); it != sec.end())
    s.axial_length_m = as_number(*it, "scenario.axial_length_m");
  if (auto it = sec.find("time_step_s"); it != sec.end())
    s.time_step_s = as_number(*it, "scenario.time_step_s");
  auto e = sec.find("end_time_s");
  if (e == sec.end()) fail("scenario", "needs end_time_s");
  s.end_time_s = as_number(*e, "scenario.end_time_s");
  if (auto it = sec.find("theta"); it != sec.end()) s.theta = as_number(*it, "scenario.theta");
  if (auto it = sec.find("solver"); it != sec.end()) {
    const std::string b = as_string(*it, "scenario.solver");
    if (b == "direct")
      s.backend = SolverBackend::direct;
    else if (b == "cg")
      s.backend = SolverBackend::cg;
    else
      fail("scenario.solver", "must be \"direct\" or \"cg\"");
  }
  if (auto it = sec.find("record_balance"); it != sec.end())
    s.record_balance = as_boolean(*it, "scenario.record_balance");
  if (auto it = sec.find("snapshot_times_s"); it != sec.end()) {
    if (!it->is_array()) fail("scenario.snapshot_times_s", "must be a list of times");
    for (std::size_t i = 0; i < it->size(); ++i)
      s.snapshot_times.push_back(
          as_number((*it)[i], "scenario.snapshot_times_s[" + std::to_string(i) + "]"));
  }
  s.validate();
  out.scenario = std::move(s);
}

void parse_probes(const json& sec, RunConfig& out) {
  if (sec.is_string()) {
    if (sec.get<std::string>() != "auto") fail("probes", "must be \"auto\" or a table of points");
    out.probes_auto = true;
    return;
  }
  require_object(sec, "probes");
  out.probes_auto = false;
  for (const auto& item : sec.items()) {
    const std::string& name = item.key();
    const json& body = item.value();
    const std::string path = "probes." + name;
    require_object(body, path);
    check_keys(body, path, {"x_m", "y_m"});
    auto x = body.find("x_m");
    auto y = body.find("y_m");
    if (x == body.end() || y == body.end()) fail(path, "needs x_m and y_m");
    out.probes[name] = Vec2(as_number(*x, path + ".x_m"), as_number(*y, path + ".y_m"));
  }
  if (out.probes.empty()) fail("probes", "must name at least one point");
}

void parse_calibration(const json& sec, const std::string& base_dir, RunConfig& out) {
  require_object(sec, "calibration");
  check_keys(sec, "calibration", {"parameters", "groups", "max_evaluations", "seed"});
  CalibrationConfig cal;

  auto params = sec.find("parameters");
  if (params == sec.end()) fail("calibration", "needs parameters");
  require_object(*params, "calibration.parameters");
  if (params->empty()) fail("calibration.parameters", "is empty: nothing to fit");
  for (const auto& item : params->items()) {
    const std::string& name = item.key();
    const json& body = item.value();
    const std::string path = "calibration.parameters." + name;
    require_object(body, path);
    check_keys(body, path, {"initial", "lower", "upper"});
    ParameterSpec p;
    p.name = name;
    // Defaults: a film coefficient searches [1e-3, 10] starting from the
    // configured value; a conductivity searches a factor 10 around the
    // table value.
    double reference = 0.0;
    if (name == "robin_h") {
      if (!out.boundary.robin.empty())
        reference = out.boundary.robin.begin()->second.film_coefficient;
      else if (!out.boundary.volumetric_exchange.empty())
        reference = out.boundary.volumetric_exchange.begin()->second.film_coefficient;
      p.lower = 1e-3;
      p.upper = 10.0;
    } else if (name.rfind("lambda_eff:", 0) == 0) {
      const std::string region = name.substr(std::strlen("lambda_eff:"));
      if (region.empty()) fail(path, "names no region");
      if (out.materials.contains(region)) {
        const MaterialRegion& m = out.materials.at(region);
        reference = 0.5 * (m.lambda_radial + m.lambda_tangential);
      }
      if (reference > 0.0) {
        p.lower = 0.1 * reference;
        p.upper = 10.0 * reference;
      }
    } else {
      fail(path, "must be robin_h or lambda_eff:<region>");
    }
    p.initial = reference;
    if (auto v = body.find("lower"); v != body.end()) p.lower = as_number(*v, path + ".lower");
    if (auto v = body.find("upper"); v != body.end()) p.upper = as_number(*v, path + ".upper");
    if (auto v = body.find("initial"); v != body.end())
      p.initial = as_number(*v, path + ".initial");
    else if (p.initial <= 0.0)
      fail(path, "needs an initial value (no default is available)");
    cal.parameters.push_back(std::move(p));
  }

  auto groups = sec.find("groups");
  if (groups == sec.end()) fail("calibration", "needs groups");
  if (!groups->is_array() || groups->empty())
    fail("calibration.groups", "must be a non-empty list");
  for (std::size_t i = 0; i < groups->size(); ++i) {
    const json& body = (*groups)[i];
    const std::string path = "calibration.groups[" + std::to_string(i) + "]";
    require_object(body, path);
    check_keys(body, path, {"probe", "measured_csv", "measured_probes", "weight"});
    CalibrationGroupConfig g;
    auto p = body.find("probe");
    if (p == body.end()) fail(path, "needs probe");
    g.probe = as_string(*p, path + ".probe");
    auto c = body.find("measured_csv");
    if (c == body.end()) fail(path, "needs measured_csv");
    g.measured_csv = resolve_path(base_dir, as_string(*c, path + ".measured_csv"));
    if (auto m = body.find("measured_probes"); m != body.end()) {
      if (!m->is_array()) fail(path + ".measured_probes", "must be a list of probe ids");
      for (std::size_t j = 0; j < m->size(); ++j)
        g.measured_probes.push_back(
            as_string((*m)[j], path + ".measured_probes[" + std::to_string(j) + "]"));
    }
    if (g.measured_probes.empty()) g.measured_probes = {g.probe};
    if (auto w = body.find("weight"); w != body.end())
      g.weight = as_number(*w, path + ".weight");
    cal.groups.push_back(std::move(g));
  }

  if (auto m = sec.find("max_evaluations"); m != sec.end()) {
    cal.max_evaluations = as_integer(*m, "calibration.max_evaluations");
    if (cal.max_evaluations < 1) fail("calibration.max_evaluations", "must be positive");
  }
  if (auto s = sec.find("seed"); s != sec.end()) {
    const int v = as_integer(*s, "calibration.seed");
    if (v < 0) fail("calibration.seed", "must be non-negative");
    cal.seed = static_cast<unsigned>(v);
  }
  out.calibration = std::move(cal);
}

void parse_output(const json& sec, RunConfig& out) {
  require_object(sec, "output");
  check_keys(sec, "output", {"directory", "write_vtk", "write_field_csv"});
  if (auto it = sec.find("directory"); it != sec.end())
    out.output.directory = as_string(*it, "output.directory");
  if (auto it = sec.find("write_vtk"); it != sec.end())
    out.output.write_vtk = as_boolean(*it, "output.write_vtk");
  if (auto it = sec.find("write_field_csv"); it != sec.end())
    out.output.write_field_csv = as_boolean(*it, "output.write_field_csv");
}

json schedule_json(const Schedule& s) {
  json arr = json::array();
  for (std::size_t i = 0; i < s.times().size(); ++i)
    arr.push_back(json::array({s.times()[i], s.values()[i]}));
  return arr;
}

// Canonical form of everything that affects results. nlohmann objects keep
// keys sorted, so dump() of this document is a stable serialization.
json resolved_json(const RunConfig& c) {
  json doc;

  json geom;
  if (c.mesh_from_file) {
    geom["source"] = "msh_file";
    geom["path"] = c.msh_path;
  } else {
    const MachineGeometry& g = c.geometry;
    geom["source"] = "machine";
    geom["resolution_level"] = c.resolution_level;
    geom["shaft_radius_m"] = g.shaft_radius_m;
    geom["rotor_yoke_outer_radius_m"] = g.rotor_yoke_outer_radius_m;
    geom["air_gap_thickness_m"] = g.air_gap_thickness_m;
    geom["stator_inner_radius_m"] = g.stator_inner_radius_m;
    geom["stator_outer_radius_m"] = g.stator_outer_radius_m;
    geom["slot_count"] = g.slot_count;
    geom["slot_width_m"] = g.slot_width_m;
    geom["slot_depth_m"] = g.slot_depth_m;
    geom["conductors_per_slot"] = g.conductors_per_slot;
    geom["conductor_radius_m"] = g.conductor_radius_m;
    geom["model_fraction"] = g.model_fraction;
  }
  doc["geometry"] = geom;

  json mats;
  for (const auto& [name, m] : c.materials.regions()) {
    json r;
    r["volumetric_heat_capacity"] = m.volumetric_heat_capacity;
    r["lambda_radial"] = m.lambda_radial;
    r["lambda_tangential"] = m.lambda_tangential;
    if (m.lambda_axial) r["lambda_axial"] = *m.lambda_axial;
    r["provenance"] = std::string(to_string(m.provenance));
    mats[name] = r;
  }
  doc["materials"] = mats;

  json bc;
  for (const auto& [name, sched] : c.boundary.dirichlet)
    bc[name] = {{"type", "dirichlet"}, {"temperature", schedule_json(sched)}};
  for (const auto& [name, spec] : c.boundary.robin)
    bc[name] = {{"type", "robin"},
                {"h", spec.film_coefficient},
                {"reference", schedule_json(spec.reference)}};
  for (const auto& [name, spec] : c.boundary.volumetric_exchange)
    bc[name] = {{"type", "volumetric_exchange"},
                {"h", spec.film_coefficient},
                {"reference", schedule_json(spec.reference)}};
  for (const auto& name : c.boundary.adiabatic) bc[name] = {{"type", "adiabatic"}};
  doc["boundaries"] = bc;

  if (c.scenario) {
    const ScenarioSpec& s = *c.scenario;
    json sc;
    sc["initial_temperature"] = s.initial_temperature;
    sc["loss_power"] = schedule_json(s.loss_power);
    sc["loss_fraction_in_model"] = s.loss_fraction_in_model;
    sc["axial_length_m"] = s.axial_length_m;
    sc["time_step_s"] = s.time_step_s;
    sc["end_time_s"] = s.end_time_s;
    sc["theta"] = s.theta;
    sc["solver"] = s.backend == SolverBackend::cg ? "cg" : "direct";
    sc["record_balance"] = s.record_balance;
    sc["snapshot_times_s"] = s.snapshot_times;
    doc["scenario"] = sc;
  }

  if (c.probes_auto && c.mesh_from_file) {
    // Unresolvable without the machine geometry; hash the request itself.
    doc["probes"] = "auto";
  } else {
    json pr;
    for (const auto& [name, p] : c.resolved_probes()) pr[name] = json::array({p.x(), p.y()});
    doc["probes"] = pr;
  }

  if (c.calibration) {
    const CalibrationConfig& cal = *c.calibration;
    json j;
    json params;
    for (const ParameterSpec& p : cal.parameters)
      params[p.name] = json::array({p.lower, p.initial, p.upper});
    j["parameters"] = params;
    json groups = json::array();
    for (const CalibrationGroupConfig& g : cal.groups)
      groups.push_back({{"probe", g.probe},
                        {"measured_csv", g.measured_csv},
                        {"measured_probes", g.measured_probes},
                        {"weight", g.weight}});
    j["groups"] = groups;
    j["max_evaluations"] = cal.max_evaluations;
    j["seed"] = cal.seed;
    doc["calibration"] = j;
  }

  return doc;
}

}  // namespace

std::map<std::string, Vec2> RunConfig::resolved_probes() const {
  if (!probes_auto) return probes;
  if (mesh_from_file)
    throw ConfigError(
        "config: probes \"auto\" needs the generated machine geometry; meshes "
        "loaded from a file need explicit probe coordinates");
  return default_probes(geometry);
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(doc, "config",
             {"geometry", "materials", "boundaries", "scenario", "probes", "calibration",
              "output"});
  RunConfig out;
  if (auto it = doc.find("geometry"); it != doc.end())
    parse_geometry(*it, base_dir, out);
  else
    out.geometry.validate();
  if (auto it = doc.find("materials"); it != doc.end())
    parse_materials(*it, out);
  else
    out.materials = fitted_defaults();
  if (auto it = doc.find("boundaries"); it != doc.end())
    parse_boundaries(*it, out);
  else
    default_boundaries(out);
  if (auto it = doc.find("scenario"); it != doc.end()) parse_scenario(*it, out);
  if (auto it = doc.find("probes"); it != doc.end()) parse_probes(*it, out);
  if (auto it = doc.find("calibration"); it != doc.end()) parse_calibration(*it, base_dir, out);
  if (auto it = doc.find("output"); it != doc.end()) parse_output(*it, out);
  return out;
}

RunConfig read_config_file(const std::string& path) {
  std::filesystem::path p(path);
  const std::string dir = p.has_parent_path() ? p.parent_path().string() : std::string(".");
  return parse_config(read_text_file(path), dir);
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = resolved_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char byte : text) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

}  // namespace emtherm
