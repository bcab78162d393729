#include "emtherm/cli.hpp"

#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "emtherm/config.hpp"
#include "emtherm/field_io.hpp"
#include "emtherm/msh_io.hpp"
#include "test_meshes.hpp"

using namespace emtherm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("emtherm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string file(const std::string& name) const { return (path / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(file(name));
    out << text;
  }
};

// A 4x4 square with a film on the right edge; cooldown from 80 degC against
// 20 degC takes tau of roughly ten minutes, so the 1200 s horizon settles
// far enough for time constants.
void write_square_mesh(const TempDir& dir) {
  write_msh_file(testing::structured_rectangle(4, 4, 0.05, 0.05), dir.file("m.msh"));
}

std::string square_config(double lambda, double h, const std::string& tail = "") {
  return std::string(R"({
  "geometry": {"preset": "msh_file", "msh_path": "m.msh"},
  "materials": {"override": {"domain": {
    "volumetric_heat_capacity_J_per_m3C": 1e5,
    "lambda_W_per_mC": )") + std::to_string(lambda) + R"(}}},
  "boundaries": {
    "right": {"type": "robin", "h_W_per_m2C": )" + std::to_string(h) + R"(, "reference_C": 20},
    "left": {"type": "adiabatic"}, "top": {"type": "adiabatic"},
    "bottom": {"type": "adiabatic"}},
  "scenario": {"initial_temperature_C": 80, "time_step_s": 30, "end_time_s": 1200},
  "probes": {"centre": {"x_m": 0.025, "y_m": 0.025}})" + tail + "\n}";
}

int cli(const std::vector<std::string>& args) { return run_cli(args); }

double csv_value_after(const std::string& csv, const std::string& prefix) {
  const auto pos = csv.find(prefix);
  REQUIRE(pos != std::string::npos);
  return std::stod(csv.substr(pos + prefix.size()));
}

int run_binary(const std::string& args, std::string* output) {
  const std::string cmd = std::string(EMTHERM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  output->clear();
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) *output += buf;
  const int status = ::pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes traces, balance, fields and a manifest") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));
  const std::string out = dir.file("out");

  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", out}) == 0);

  const auto traces = read_traces_file(out + "/traces.csv");
  REQUIRE(traces.count("centre") == 1);
  CHECK(traces.at("centre").times.size() == 41);
  CHECK(traces.at("centre").values.front() == 80.0);
  CHECK(traces.at("centre").values.back() < 35.0);

  const std::string balance = read_text_file(out + "/balance.csv");
  CHECK(balance.rfind("time_s,stored_W,net_input_W,residual_W,rel_error\n", 0) == 0);

  CHECK(fs::exists(out + "/final_field.vtk"));
  CHECK(fs::exists(out + "/final_field.csv"));

  const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["config_hash"] ==
        config_hash_hex(read_config_file(dir.file("run.json"))));
  CHECK(manifest["wall_time_s"].get<double>() >= 0.0);
  CHECK_FALSE(manifest.contains("seed"));
}

TEST_CASE("a second identical run reproduces every result byte") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));

  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", dir.file("a")}) == 0);
  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", dir.file("b")}) == 0);

  CHECK(read_text_file(dir.file("a/traces.csv")) == read_text_file(dir.file("b/traces.csv")));
  CHECK(read_text_file(dir.file("a/final_field.csv")) ==
        read_text_file(dir.file("b/final_field.csv")));
  CHECK(read_text_file(dir.file("a/balance.csv")) == read_text_file(dir.file("b/balance.csv")));
}

TEST_CASE("output toggles drop the optional files") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0, R"(,
    "output": {"write_vtk": false, "write_field_csv": false})"));
  // record_balance off silences the balance file as well.
  std::string text = read_text_file(dir.file("run.json"));
  text.replace(text.find("\"end_time_s\": 1200"), 18,
               "\"end_time_s\": 1200, \"record_balance\": false");
  dir.write("run.json", text);
  const std::string out = dir.file("out");

  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", out}) == 0);
  CHECK(fs::exists(out + "/traces.csv"));
  CHECK_FALSE(fs::exists(out + "/final_field.vtk"));
  CHECK_FALSE(fs::exists(out + "/final_field.csv"));
  CHECK_FALSE(fs::exists(out + "/balance.csv"));
}

TEST_CASE("snapshots are written at their nominal times") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0, R"(,
    "output": {"write_field_csv": false})"));
  std::string text = read_text_file(dir.file("run.json"));
  text.replace(text.find("\"end_time_s\": 1200"), 18,
               "\"end_time_s\": 1200, \"snapshot_times_s\": [0, 300]");
  dir.write("run.json", text);
  const std::string out = dir.file("out");

  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", out}) == 0);
  CHECK(fs::exists(out + "/snapshot_0s.vtk"));
  CHECK(fs::exists(out + "/snapshot_300s.vtk"));
}

TEST_CASE("mesh subcommand writes a readable mesh file") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));
  const std::string out = dir.file("out");

  REQUIRE(cli({"mesh", "--config", dir.file("run.json"), "--out", out}) == 0);
  const Mesh written = read_msh_file(out + "/mesh.msh");
  CHECK(written.node_count() == 25);
  CHECK(written.element_count() == 32);
  CHECK(written.tags.region_name(written.element_region(0)) == "domain");

  const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
  CHECK(manifest["command"] == "mesh");
}

TEST_CASE("analyze reports time constants and optional measured errors") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));
  REQUIRE(cli({"simulate", "--config", dir.file("run.json"), "--out", dir.file("sim")}) == 0);

  const std::string out = dir.file("ana");
  REQUIRE(cli({"analyze", "--config", dir.file("run.json"), dir.file("sim/traces.csv"),
               "--out", out}) == 0);
  const std::string csv = read_text_file(out + "/validation.csv");
  CHECK(csv.find("centre,") != std::string::npos);
  // No measured column, so the simulated tau follows an empty cell.
  // Around tau = 625 s, reported in minutes.
  const double tau_min = csv_value_after(csv, "centre,,");
  CHECK(tau_min > 8.0);
  CHECK(tau_min < 13.0);
  CHECK_FALSE(fs::exists(out + "/error_traces.csv"));

  // Comparing the run against itself gives a zero error column.
  const std::string out2 = dir.file("ana2");
  REQUIRE(cli({"analyze", "--config", dir.file("run.json"), dir.file("sim/traces.csv"),
               "--measured", dir.file("sim/traces.csv"), "--out", out2}) == 0);
  const std::string csv2 = read_text_file(out2 + "/validation.csv");
  CHECK(csv2.find(",0\n") != std::string::npos);
  CHECK(fs::exists(out2 + "/error_traces.csv"));
  const auto errors = read_traces_file(out2 + "/error_traces.csv");
  CHECK(errors.at("centre").values.back() == 0.0);
}

TEST_CASE("calibrate recovers the parameters behind a synthetic measurement") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("truth.json", square_config(5.0, 8.0));
  REQUIRE(cli({"simulate", "--config", dir.file("truth.json"), "--out", dir.file("truth")}) ==
          0);
  fs::copy_file(dir.file("truth/traces.csv"), dir.file("measured.csv"));

  dir.write("fit.json", square_config(5.0, 8.0, R"(,
  "calibration": {
    "parameters": {
      "lambda_eff:domain": {"initial": 2.0, "lower": 0.5, "upper": 50},
      "robin_h": {"initial": 2.0, "lower": 0.8, "upper": 80}},
    "groups": [{"probe": "centre", "measured_csv": "measured.csv"}],
    "max_evaluations": 250, "seed": 9})"));

  const std::string out = dir.file("out");
  REQUIRE(cli({"calibrate", "--config", dir.file("fit.json"), "--out", out,
               "--seed", "11"}) == 0);

  const std::string csv = read_text_file(out + "/calibration.csv");
  CHECK(csv.rfind("domain,parameter,value,unit\n", 0) == 0);
  CHECK(csv_value_after(csv, "domain,lambda_eff,") == doctest::Approx(5.0).epsilon(0.02));
  CHECK(csv_value_after(csv, "right,h,") == doctest::Approx(8.0).epsilon(0.02));

  const std::string log = read_text_file(out + "/calibration_log.txt");
  CHECK(log.find("converged") != std::string::npos);
  CHECK(log.find("rms_C") != std::string::npos);

  const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
  CHECK(manifest["command"] == "calibrate");
  CHECK(manifest["seed"] == 11);  // the flag wins over the config
}

TEST_CASE("an exhausted fit budget exits 3 but still writes the best point") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("truth.json", square_config(5.0, 8.0));
  REQUIRE(cli({"simulate", "--config", dir.file("truth.json"), "--out", dir.file("truth")}) ==
          0);
  fs::copy_file(dir.file("truth/traces.csv"), dir.file("measured.csv"));
  dir.write("fit.json", square_config(5.0, 8.0, R"(,
  "calibration": {
    "parameters": {"robin_h": {"initial": 2.0, "lower": 0.8, "upper": 80}},
    "groups": [{"probe": "centre", "measured_csv": "measured.csv"}],
    "max_evaluations": 2})"));

  const std::string out = dir.file("out");
  CHECK(cli({"calibrate", "--config", dir.file("fit.json"), "--out", out}) == 3);
  CHECK(fs::exists(out + "/calibration.csv"));
  CHECK(fs::exists(out + "/calibration_log.txt"));
}

TEST_CASE("configuration problems exit 1") {
  TempDir dir;
  write_square_mesh(dir);

  dir.write("bad.json", R"({"unknown_section": 1})");
  CHECK(cli({"simulate", "--config", dir.file("bad.json"), "--out", dir.file("o")}) == 1);

  // A valid config without the section the subcommand needs.
  dir.write("no_scenario.json", R"({
    "geometry": {"preset": "msh_file", "msh_path": "m.msh"},
    "probes": {"centre": {"x_m": 0.025, "y_m": 0.025}}})");
  CHECK(cli({"simulate", "--config", dir.file("no_scenario.json"),
             "--out", dir.file("o")}) == 1);
  CHECK(cli({"calibrate", "--config", dir.file("no_scenario.json"),
             "--out", dir.file("o")}) == 1);

  // Command line errors report as exit 1 as well.
  CHECK(cli({"frobnicate"}) == 1);
  CHECK(cli({"simulate"}) == 1);
}

TEST_CASE("a trace that never settles exits 2") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));
  dir.write("flat.csv", "time_s,probe_id,temperature_C\n0,flat,80\n600,flat,79.5\n");
  CHECK(cli({"analyze", "--config", dir.file("run.json"), dir.file("flat.csv"),
             "--out", dir.file("o")}) == 2);
}

TEST_CASE("the installed binary reports results on stdout") {
  TempDir dir;
  write_square_mesh(dir);
  dir.write("run.json", square_config(5.0, 8.0));
  std::string out;

  CHECK(run_binary("mesh --config " + dir.file("run.json") + " --out " + dir.file("m"),
                   &out) == 0);
  CHECK(out.find("nodes 25") != std::string::npos);
  CHECK(out.find("elements 32") != std::string::npos);
  CHECK(out.find("region domain 0.0025") != std::string::npos);

  CHECK(run_binary("simulate --config " + dir.file("run.json") + " --out " + dir.file("s"),
                   &out) == 0);
  CHECK(out.find("steps 40") != std::string::npos);
  CHECK(out.find("probe centre final_C") != std::string::npos);
  CHECK(out.find("max_balance_rel_error") != std::string::npos);

  CHECK(run_binary("dump-materials", &out) == 0);
  CHECK(out.find("stator_yoke,3925000,24,24,2.5,fitted") != std::string::npos);

  CHECK(run_binary("--help", &out) == 0);
  CHECK(out.find("simulate") != std::string::npos);

  CHECK(run_binary("simulate --config " + dir.file("run.json") + " --bogus", &out) == 1);
}

}  // TEST_SUITE
