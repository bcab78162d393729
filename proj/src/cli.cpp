#include "emtherm/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "emtherm/analysis.hpp"
#include "emtherm/calibrate.hpp"
#include "emtherm/config.hpp"
#include "emtherm/field_io.hpp"
#include "emtherm/machine_geometry.hpp"
#include "emtherm/msh_io.hpp"
#include "emtherm/transient.hpp"

namespace emtherm {
namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // empty: use the config's output.directory
  int seed = -1;        // -1: not given
  int threads = 0;      // 0: not given
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required) {
  auto* config =
      sub->add_option("--config", args.config_path, "Run configuration file (JSON)");
  if (config_required) config->required();
  sub->add_option("--out", args.out_dir,
                  "Output directory, overrides the config's output.directory");
  sub->add_option("--seed", args.seed, "Seed override for calibration restarts")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--threads", args.threads, "Thread count for the linear algebra backend")
      ->check(CLI::PositiveNumber);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

Mesh load_mesh(const RunConfig& config) {
  std::vector<std::string> warnings;
  Mesh mesh = config.mesh_from_file
                  ? read_msh_file(config.msh_path, &warnings)
                  : build_machine_mesh(config.geometry, config.resolution_level);
  print_warnings(warnings);
  return mesh;
}

std::string output_directory(const RunConfig& config, const CommonArgs& args) {
  const std::string dir = args.out_dir.empty() ? config.output.directory : args.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const std::string& dir, const std::string& command,
                    const RunConfig& config, double wall_seconds,
                    std::optional<unsigned> seed = std::nullopt) {
  nlohmann::json doc;
  doc["command"] = command;
  doc["config_hash"] = config_hash_hex(config);
  doc["version"] = kVersion;
  doc["wall_time_s"] = wall_seconds;
  if (seed) doc["seed"] = *seed;
  write_text_file(join_path(dir, "manifest.json"), doc.dump(2) + "\n");
}

// The level traces relax toward: the first prescribed temperature, or the
// first film reference, each at the end of its schedule.
double ambient_level(const RunConfig& config) {
  if (!config.boundary.dirichlet.empty())
    return config.boundary.dirichlet.begin()->second.values().back();
  if (!config.boundary.robin.empty())
    return config.boundary.robin.begin()->second.reference.values().back();
  if (!config.boundary.volumetric_exchange.empty())
    return config.boundary.volumetric_exchange.begin()->second.reference.values().back();
  throw ConfigError(
      "config: cannot derive the ambient level: no prescribed or film boundary present");
}

int cmd_mesh(const RunConfig& config, const CommonArgs& args) {
  const WallClock clock;
  const Mesh mesh = load_mesh(config);
  const std::string dir = output_directory(config, args);
  write_msh_file(mesh, join_path(dir, "mesh.msh"));

  char line[256];
  std::printf("nodes %d\n", mesh.node_count());
  std::printf("elements %d\n", mesh.element_count());
  std::printf("regions %zu\n", mesh.tags.regions().size());
  std::printf("edge_sets %zu\n", mesh.tags.edge_sets().size());
  std::snprintf(line, sizeof line, "total_area_m2 %.9g\n", mesh.total_area());
  std::fputs(line, stdout);
  for (const auto& [id, name] : mesh.tags.regions()) {
    std::snprintf(line, sizeof line, "region %s %.9g\n", name.c_str(), mesh.region_area(id));
    std::fputs(line, stdout);
  }
  std::printf("wrote %s\n", join_path(dir, "mesh.msh").c_str());
  write_manifest(dir, "mesh", config, clock.seconds());
  return 0;
}

int cmd_simulate(const RunConfig& config, const CommonArgs& args) {
  const WallClock clock;
  if (!config.scenario)
    throw ConfigError("config: simulate needs a scenario section");
  const Mesh mesh = load_mesh(config);
  std::vector<std::string> warnings;
  const LinearSystem system = build_linear_system(mesh, config.materials, config.boundary, &warnings);
  print_warnings(warnings);

  ScenarioSpec spec = *config.scenario;
  spec.probes = config.resolved_probes();
  const ScenarioResult result = run_scenario(mesh, system, spec);

  const std::string dir = output_directory(config, args);
  std::map<std::string, Trace> traces;
  for (const auto& [name, values] : result.probe_traces)
    traces[name] = Trace{result.times, values};
  write_traces_file(traces, join_path(dir, "traces.csv"));

  if (spec.record_balance) {
    std::string csv = "time_s,stored_W,net_input_W,residual_W,rel_error\n";
    char line[256];
    for (const StepBalance& b : result.balance) {
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.3e\n", b.time, b.stored,
                    b.net_input, b.residual, b.relative_error);
      csv += line;
    }
    write_text_file(join_path(dir, "balance.csv"), csv);
  }

  if (config.output.write_vtk) {
    write_text_file(join_path(dir, "final_field.vtk"), field_vtk(mesh, result.final_field));
    for (const auto& [time, field] : result.snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%gs.vtk", time);
      write_text_file(join_path(dir, name), field_vtk(mesh, field));
    }
  }
  if (config.output.write_field_csv)
    write_text_file(join_path(dir, "final_field.csv"), field_csv(mesh, result.final_field));

  std::printf("steps %zu\n", result.times.size() - 1);
  char line[256];
  for (const auto& [name, values] : result.probe_traces) {
    std::snprintf(line, sizeof line, "probe %s final_C %.9g\n", name.c_str(), values.back());
    std::fputs(line, stdout);
  }
  if (spec.record_balance) {
    std::snprintf(line, sizeof line, "max_balance_rel_error %.3e\n", result.max_balance_error);
    std::fputs(line, stdout);
  }
  std::printf("wrote %s\n", join_path(dir, "traces.csv").c_str());
  write_manifest(dir, "simulate", config, clock.seconds());
  return 0;
}

int cmd_analyze(const RunConfig& config, const CommonArgs& args,
                const std::string& traces_path, const std::string& measured_path) {
  const WallClock clock;
  const std::map<std::string, Trace> simulated = read_traces_file(traces_path);
  std::map<std::string, Trace> measured;
  if (!measured_path.empty()) measured = read_traces_file(measured_path);
  const double ambient = ambient_level(config);

  struct Group {
    std::string domain;
    std::vector<std::string> measured_probes;
  };
  std::vector<Group> groups;
  if (config.calibration) {
    for (const CalibrationGroupConfig& g : config.calibration->groups)
      groups.push_back({g.probe, g.measured_probes});
  } else {
    for (const auto& [name, trace] : simulated) groups.push_back({name, {name}});
  }

  std::vector<ValidationRow> rows;
  std::map<std::string, Trace> error_traces;
  const double nan = std::nan("");
  for (const Group& g : groups) {
    auto sim = simulated.find(g.domain);
    if (sim == simulated.end())
      throw ConfigError("traces file has no probe \"" + g.domain + "\"");
    ValidationRow row;
    row.domain = g.domain;
    row.tau_simulated_s = time_constant(sim->second, ambient);
    row.initial_temperature = sim->second.values.front();
    row.tau_measured_s = nan;
    row.relative_error_percent = nan;
    if (!measured.empty()) {
      std::vector<Trace> group_traces;
      for (const std::string& id : g.measured_probes) {
        auto it = measured.find(id);
        if (it == measured.end())
          throw ConfigError("measured file has no probe \"" + id + "\"");
        group_traces.push_back(it->second);
      }
      const Trace mean = sensor_group_mean(group_traces);
      row.tau_measured_s = time_constant(mean, ambient);
      row.initial_temperature = mean.values.front();
      row.relative_error_percent =
          100.0 * relative_error(row.tau_measured_s, row.tau_simulated_s);
      error_traces[g.domain] = abs_error_trace(mean, sim->second);
    }
    rows.push_back(std::move(row));
  }

  const std::string dir = output_directory(config, args);
  const std::string csv = validation_csv(rows);
  write_text_file(join_path(dir, "validation.csv"), csv);
  std::fputs(csv.c_str(), stdout);
  if (!error_traces.empty())
    write_traces_file(error_traces, join_path(dir, "error_traces.csv"));
  write_manifest(dir, "analyze", config, clock.seconds());
  return 0;
}

int cmd_calibrate(const RunConfig& config, const CommonArgs& args, const Mesh& mesh) {
  const WallClock clock;
  if (!config.calibration)
    throw ConfigError("config: calibrate needs a calibration section; nothing to fit");
  if (!config.scenario)
    throw ConfigError("config: calibrate needs a scenario section as the run template");
  const CalibrationConfig& cal = *config.calibration;

  CalibrationProblem problem;
  problem.mesh = &mesh;
  problem.materials = config.materials;
  problem.boundary = config.boundary;
  problem.scenario = *config.scenario;
  problem.scenario.probes = config.resolved_probes();
  problem.parameters = cal.parameters;
  for (const CalibrationGroupConfig& g : cal.groups) {
    MeasurementGroup group;
    group.probe = g.probe;
    group.weight = g.weight;
    const std::map<std::string, Trace> file = read_traces_file(g.measured_csv);
    for (const std::string& id : g.measured_probes) {
      auto it = file.find(id);
      if (it == file.end())
        throw ConfigError(g.measured_csv + ": no probe \"" + id + "\"");
      group.measured.push_back(it->second);
    }
    problem.groups.push_back(std::move(group));
  }

  FitOptions options;
  options.max_evaluations = cal.max_evaluations;
  options.seed = args.seed >= 0 ? static_cast<unsigned>(args.seed) : cal.seed;
  const CalibrationResult result = fit(problem, options);

  const std::string dir = output_directory(config, args);
  write_text_file(join_path(dir, "calibration.csv"), calibration_csv(problem, result));
  std::string log;
  for (const std::string& entry : result.log) log += entry + "\n";
  char line[256];
  for (std::size_t g = 0; g < result.group_rms.size(); ++g) {
    std::snprintf(line, sizeof line, "group %s rms_C %.6g\n",
                  problem.groups[g].probe.c_str(), result.group_rms[g]);
    log += line;
  }
  write_text_file(join_path(dir, "calibration_log.txt"), log);

  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    std::snprintf(line, sizeof line, "%s %.9g\n", problem.parameters[i].name.c_str(),
                  result.parameters[static_cast<int>(i)]);
    std::fputs(line, stdout);
  }
  std::snprintf(line, sizeof line, "misfit_C2 %.6e\n", result.misfit);
  std::fputs(line, stdout);
  std::printf("evaluations %d\n", result.evaluations);
  std::printf("converged %s\n", result.converged ? "yes" : "no");
  std::printf("wrote %s\n", join_path(dir, "calibration.csv").c_str());
  write_manifest(dir, "calibrate", config, clock.seconds(), options.seed);
  return result.converged ? 0 : 3;
}

int dispatch(const CLI::App& app, const CommonArgs& args, const std::string& traces_path,
             const std::string& measured_path) {
  if (args.threads > 0) Eigen::setNbThreads(args.threads);

  if (app.got_subcommand("dump-materials")) {
    // The configured table when a config is given, the fitted defaults
    // otherwise.
    const MaterialTable table = args.config_path.empty()
                                    ? fitted_defaults()
                                    : read_config_file(args.config_path).materials;
    std::fputs(materials_csv(table).c_str(), stdout);
    return 0;
  }

  const RunConfig config = read_config_file(args.config_path);
  if (app.got_subcommand("mesh")) return cmd_mesh(config, args);
  if (app.got_subcommand("simulate")) return cmd_simulate(config, args);
  if (app.got_subcommand("analyze"))
    return cmd_analyze(config, args, traces_path, measured_path);
  const Mesh mesh = load_mesh(config);
  return cmd_calibrate(config, args, mesh);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"2D transient heat conduction on electric machine cross-sections"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string traces_path, measured_path;

  add_common(app.add_subcommand("mesh", "Generate the mesh and write it as MSH"), args, true);
  add_common(app.add_subcommand("simulate", "Run the configured transient scenario"), args,
             true);
  CLI::App* analyze = app.add_subcommand("analyze", "Extract time constants from traces");
  add_common(analyze, args, true);
  analyze->add_option("traces", traces_path, "Trace CSV to analyze (simulated or measured)")
      ->required();
  analyze->add_option("--measured", measured_path,
                      "Measured trace CSV to compare the analyzed traces against");
  add_common(app.add_subcommand("calibrate", "Fit model parameters to measured traces"),
             args, true);
  add_common(app.add_subcommand("dump-materials", "Print the material table as CSV"), args,
             false);

  try {
    app.parse(argc, argv);
    return dispatch(app, args, traces_path, measured_path);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("emtherm");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace emtherm
