#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "emtherm/fem.hpp"

namespace emtherm {

// One-parameter time stepping family on M dT/dt + (K + H) T = f(t):
// implicit Euler at theta = 1, Crank-Nicolson at theta = 0.5. The iteration
// matrix M/dt + theta (K + H) is factored once per (dt, theta) and reused
// for every step; prescribed temperatures are imposed at the end of the
// step.
class ThetaIntegrator {
 public:
  ThetaIntegrator(const LinearSystem& system, double time_step, double theta,
                  SolverBackend backend = SolverBackend::direct);

  // Advances one step. load_now / load_next are the full right-hand sides
  // (sources plus film loads) at the start and end of the step.
  Vec step(double time, const Vec& temperature, const Vec& load_now,
           const Vec& load_next) const;

  double time_step() const { return dt_; }
  double theta() const { return theta_; }

 private:
  const LinearSystem* system_;
  double dt_;
  double theta_;
  SpMat rhs_matrix_;  // M/dt - (1 - theta)(K + H)
  ConstrainedOperator op_;
};

// Right-hand side for one watt of total machine loss, distributed uniformly
// over the regions whose names start with "conductor". model_fraction is
// the share of the machine the mesh covers, axial_length its depth. Throws
// if the mesh has no conductor region.
Vec joule_unit_load(const Mesh& mesh, double model_fraction, double axial_length);

// Heat book-keeping for one step, in watts (scaled by the axial length).
// stored is the rate of change of the heat content; net_input counts
// sources, film exchange and the reactions holding prescribed nodes. Their
// difference is the defect left by the linear solver.
struct StepBalance {
  double time = 0.0;
  double stored = 0.0;
  double net_input = 0.0;
  double residual = 0.0;
  double relative_error = 0.0;
};

struct ScenarioSpec {
  double initial_temperature = 0.0;  // uniform start field, degC
  Schedule loss_power{0.0};          // total machine losses, W
  double loss_fraction_in_model = 0.25;
  double axial_length_m = 1.0;
  double time_step_s = 1.0;
  double end_time_s = 0.0;
  double theta = 1.0;
  SolverBackend backend = SolverBackend::direct;
  bool record_balance = true;
  std::map<std::string, Vec2> probes;
  std::vector<double> snapshot_times;

  void validate() const;
};

struct ScenarioResult {
  std::vector<double> times;  // includes t = 0
  std::map<std::string, std::vector<double>> probe_traces;
  std::vector<StepBalance> balance;  // one entry per step when recorded
  std::vector<std::pair<double, Vec>> snapshots;
  Vec final_field;
  double max_balance_error = 0.0;
};

ScenarioResult run_scenario(const Mesh& mesh, const LinearSystem& system,
                            const ScenarioSpec& spec);

}  // namespace emtherm
