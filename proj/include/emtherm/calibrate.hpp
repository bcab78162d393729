#pragma once

#include <string>
#include <vector>

#include "emtherm/analysis.hpp"
#include "emtherm/fem.hpp"
#include "emtherm/transient.hpp"

namespace emtherm {

// One free model factor. Names follow a small grammar:
//   "lambda_eff:<region>"  effective in-plane conductivity of a region
//   "robin_h"              film coefficient of every film boundary term
// The search runs in log space, so bounds must be strictly positive.
struct ParameterSpec {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double initial = 0.0;
};

// Measured sensor traces compared against one simulated probe. Several
// sensors in a group are averaged before comparison; weight scales the
// group's contribution to the misfit.
struct MeasurementGroup {
  std::string probe;
  std::vector<Trace> measured;
  double weight = 1.0;
};

struct CalibrationProblem {
  const Mesh* mesh = nullptr;
  MaterialTable materials;  // base values; parameters are applied on top
  BoundarySpec boundary;
  ScenarioSpec scenario;  // template run; probes must cover the group probes
  std::vector<ParameterSpec> parameters;
  std::vector<MeasurementGroup> groups;

  void validate(std::vector<std::string>* warnings = nullptr) const;
};

struct FitOptions {
  int max_evaluations = 500;
  unsigned seed = 0;
  double simplex_tolerance = 1e-3;  // simplex size in log space (= relative)
  double misfit_tolerance = 1e-4;   // spread across vertices, degC^2
  double misfit_floor = 1e-8;       // early exit when the data is matched
  int stagnation_window = 40;       // evaluations without improvement -> restart
};

struct CalibrationResult {
  Vec parameters;  // natural units, aligned with problem.parameters
  double misfit = 0.0;
  double initial_misfit = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> group_rms;  // degC per group at the fitted point
  std::vector<std::string> log;
};

// Copies the base tables and overwrites them with the given parameter
// values (aligned with problem.parameters).
void apply_parameters(const CalibrationProblem& problem, const Vec& values,
                      MaterialTable& materials, BoundarySpec& boundary);

// Weighted sum over groups of the mean squared temperature residual, degC^2,
// with the simulation resampled onto each group's measurement times.
double misfit(const CalibrationProblem& problem, const Vec& values);

// The per-group mean squared residuals behind the misfit.
std::vector<double> group_mean_squared_errors(const CalibrationProblem& problem,
                                              const Vec& values);

// Bounded Nelder-Mead in log space: projection onto the bounds, restarts
// around the incumbent on stagnation, deterministic for a fixed seed.
// Stops when the simplex is small and the misfit spread is negligible, when
// the misfit falls below the floor, or when the evaluation budget runs out
// (best-so-far returned with converged = false).
CalibrationResult fit(const CalibrationProblem& problem, const FitOptions& options = {});

// domain,parameter,value,unit rows for the fitted parameters.
std::string calibration_csv(const CalibrationProblem& problem,
                            const CalibrationResult& result);

}  // namespace emtherm
