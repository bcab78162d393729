#include "emtherm/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>

namespace emtherm {

namespace {

constexpr const char* kLambdaPrefix = "lambda_eff:";

bool is_lambda_name(const std::string& name) {
  return name.rfind(kLambdaPrefix, 0) == 0 && name.size() > std::strlen(kLambdaPrefix);
}

std::string lambda_region(const std::string& name) {
  return name.substr(std::strlen(kLambdaPrefix));
}

}  // namespace

void CalibrationProblem::validate(std::vector<std::string>* warnings) const {
  if (mesh == nullptr) throw Error("calibration problem has no mesh");
  scenario.validate();
  if (parameters.empty()) throw ConfigError("calibration needs at least one parameter");
  std::vector<std::string> seen;
  for (const ParameterSpec& p : parameters) {
    if (std::find(seen.begin(), seen.end(), p.name) != seen.end())
      throw ConfigError("duplicate calibration parameter '" + p.name + "'");
    seen.push_back(p.name);
    if (!(std::isfinite(p.lower) && std::isfinite(p.upper) && std::isfinite(p.initial)))
      throw ConfigError("parameter '" + p.name + "' has non-finite bounds or start");
    if (!(p.lower > 0.0))
      throw ConfigError("parameter '" + p.name + "' needs a positive lower bound");
    if (!(p.lower <= p.upper))
      throw ConfigError("parameter '" + p.name + "' has lower bound above upper bound");
    if (p.initial < p.lower || p.initial > p.upper)
      throw ConfigError("parameter '" + p.name + "' starts outside its bounds");
    if (p.name == "robin_h") {
      if (boundary.robin.empty() && boundary.volumetric_exchange.empty())
        throw ConfigError("parameter robin_h given, but the model has no film boundary");
    } else if (is_lambda_name(p.name)) {
      const std::string region = lambda_region(p.name);
      if (!materials.contains(region))
        throw ConfigError("parameter '" + p.name + "' references unknown region '" +
                          region + "'");
    } else {
      throw ConfigError("unknown parameter '" + p.name +
                        "'; expected robin_h or lambda_eff:<region>");
    }
  }

  if (groups.empty()) throw ConfigError("calibration needs at least one measurement group");
  double weight_sum = 0.0;
  for (const MeasurementGroup& g : groups) {
    if (scenario.probes.find(g.probe) == scenario.probes.end())
      throw ConfigError("measurement group references unknown probe '" + g.probe + "'");
    if (g.measured.empty())
      throw ConfigError("measurement group for probe '" + g.probe + "' has no traces");
    for (const Trace& t : g.measured) t.validate();
    if (!std::isfinite(g.weight) || g.weight < 0.0)
      throw ConfigError("measurement group for probe '" + g.probe +
                        "' needs a non-negative weight");
    weight_sum += g.weight;
  }
  if (weight_sum == 0.0 && warnings)
    warnings->push_back("all measurement group weights are zero; the misfit is identically zero");
}

void apply_parameters(const CalibrationProblem& problem, const Vec& values,
                      MaterialTable& materials, BoundarySpec& boundary) {
  if (values.size() != static_cast<long>(problem.parameters.size()))
    throw Error("parameter value count mismatch");
  materials = problem.materials;
  boundary = problem.boundary;
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    const ParameterSpec& p = problem.parameters[i];
    const double v = values[static_cast<long>(i)];
    if (!std::isfinite(v) || v <= 0.0)
      throw ConfigError("parameter '" + p.name + "' must be positive");
    if (p.name == "robin_h") {
      for (auto& [name, spec] : boundary.robin) {
        (void)name;
        spec.film_coefficient = v;
      }
      for (auto& [name, spec] : boundary.volumetric_exchange) {
        (void)name;
        spec.film_coefficient = v;
      }
    } else {
      materials.at(lambda_region(p.name))
          .set_effective_conductivity(v, Provenance::fitted);
    }
  }
}

std::vector<double> group_mean_squared_errors(const CalibrationProblem& problem,
                                              const Vec& values) {
  MaterialTable materials;
  BoundarySpec boundary;
  apply_parameters(problem, values, materials, boundary);
  LinearSystem system = build_linear_system(*problem.mesh, materials, boundary);

  ScenarioSpec scenario = problem.scenario;
  scenario.record_balance = false;  // misfit runs skip the book-keeping
  scenario.snapshot_times.clear();
  const ScenarioResult sim = run_scenario(*problem.mesh, system, scenario);

  std::vector<double> out;
  out.reserve(problem.groups.size());
  for (const MeasurementGroup& g : problem.groups) {
    const Trace mean = sensor_group_mean(g.measured);
    Trace simulated;
    simulated.times = sim.times;
    simulated.values = sim.probe_traces.at(g.probe);
    const Trace on_measured = resample(simulated, mean.times);
    double mse = 0.0;
    for (std::size_t i = 0; i < mean.values.size(); ++i) {
      const double d = on_measured.values[i] - mean.values[i];
      mse += d * d;
    }
    out.push_back(mse / static_cast<double>(mean.values.size()));
  }
  return out;
}

double misfit(const CalibrationProblem& problem, const Vec& values) {
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    const ParameterSpec& p = problem.parameters[i];
    const double v = values[static_cast<long>(i)];
    if (v < p.lower || v > p.upper)
      throw ConfigError("parameter '" + p.name + "' is outside its bounds");
  }
  const std::vector<double> mses = group_mean_squared_errors(problem, values);
  double total = 0.0;
  for (std::size_t g = 0; g < mses.size(); ++g) total += problem.groups[g].weight * mses[g];
  return total;
}

namespace {

struct Vertex {
  Vec x;  // log-space, already inside bounds
  double f = 0.0;
};

}  // namespace

CalibrationResult fit(const CalibrationProblem& problem, const FitOptions& options) {
  CalibrationResult result;
  problem.validate(&result.log);
  if (options.max_evaluations < 1) throw ConfigError("evaluation budget must be positive");

  const int d = static_cast<int>(problem.parameters.size());
  Vec lower(d), upper(d), start(d);
  for (int i = 0; i < d; ++i) {
    lower[i] = std::log(problem.parameters[static_cast<std::size_t>(i)].lower);
    upper[i] = std::log(problem.parameters[static_cast<std::size_t>(i)].upper);
    start[i] = std::log(problem.parameters[static_cast<std::size_t>(i)].initial);
  }
  auto clip = [&](Vec x) {
    for (int i = 0; i < d; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  };

  int evaluations = 0;
  Vec best_x;
  double best_f = std::numeric_limits<double>::infinity();
  int last_improvement_eval = 0;
  char line[160];

  auto evaluate = [&](const Vec& x_clipped) {
    Vec natural(d);
    for (int i = 0; i < d; ++i) natural[i] = std::exp(x_clipped[i]);
    const std::vector<double> mses = group_mean_squared_errors(problem, natural);
    double f = 0.0;
    for (std::size_t g = 0; g < mses.size(); ++g)
      f += problem.groups[g].weight * mses[g];
    ++evaluations;
    if (f < best_f) {
      const bool notable = best_f == std::numeric_limits<double>::infinity() ||
                           f < 0.5 * best_f;
      best_f = f;
      best_x = x_clipped;
      last_improvement_eval = evaluations;
      if (notable) {
        std::snprintf(line, sizeof line, "evaluation %d: misfit %.6g degC^2", evaluations, f);
        result.log.push_back(line);
      }
    }
    return f;
  };

  std::mt19937 rng(options.seed);
  Vec base_step(d);
  for (int i = 0; i < d; ++i)
    base_step[i] = std::min(0.25, 0.4 * (upper[i] - lower[i]));

  auto make_simplex = [&](const Vec& centre, bool perturb) {
    std::vector<Vertex> s(static_cast<std::size_t>(d) + 1);
    s[0].x = clip(centre);
    s[0].f = evaluate(s[0].x);
    for (int i = 0; i < d; ++i) {
      double step = base_step[i];
      if (perturb) {
        std::uniform_real_distribution<double> mag(0.5, 1.5);
        const double scale = mag(rng);
        const double sign = (rng() % 2 == 0) ? 1.0 : -1.0;
        step *= scale * sign;
      }
      Vec x = s[0].x;
      x[i] = (x[i] + step > upper[i]) ? x[i] - std::abs(step) : x[i] + step;
      s[static_cast<std::size_t>(i) + 1].x = clip(x);
      s[static_cast<std::size_t>(i) + 1].f = evaluate(s[static_cast<std::size_t>(i) + 1].x);
    }
    return s;
  };

  auto order = [](std::vector<Vertex>& s) {
    std::stable_sort(s.begin(), s.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };

  std::vector<Vertex> simplex = make_simplex(start, false);
  result.initial_misfit = simplex[0].f;  // first evaluation is the start point

  bool converged = false;
  while (evaluations < options.max_evaluations && !converged) {
    order(simplex);
    const double spread = simplex.back().f - simplex.front().f;
    double size = 0.0;
    for (const Vertex& v : simplex)
      size = std::max(size, (v.x - simplex.front().x).cwiseAbs().maxCoeff());
    if (best_f <= options.misfit_floor ||
        (size < options.simplex_tolerance && spread < options.misfit_tolerance)) {
      converged = true;
      break;
    }
    if (evaluations - last_improvement_eval > options.stagnation_window) {
      std::snprintf(line, sizeof line, "evaluation %d: stagnated, restarting around best",
                    evaluations);
      result.log.push_back(line);
      simplex = make_simplex(best_x, true);
      continue;
    }

    Vec centroid = Vec::Zero(d);
    for (std::size_t v = 0; v + 1 < simplex.size(); ++v) centroid += simplex[v].x;
    centroid /= static_cast<double>(d);
    const Vec& worst = simplex.back().x;

    const Vec reflected = clip(centroid + (centroid - worst));
    const double f_r = evaluate(reflected);
    if (f_r < simplex.front().f) {
      const Vec expanded = clip(centroid + 2.0 * (centroid - worst));
      const double f_e = evaluate(expanded);
      simplex.back() = f_e < f_r ? Vertex{expanded, f_e} : Vertex{reflected, f_r};
    } else if (f_r < simplex[simplex.size() - 2].f) {
      simplex.back() = Vertex{reflected, f_r};
    } else if (f_r < simplex.back().f) {
      const Vec contracted = clip(centroid + 0.5 * (centroid - worst));
      const double f_c = evaluate(contracted);
      if (f_c <= f_r) {
        simplex.back() = Vertex{contracted, f_c};
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) {
          simplex[v].x = clip(simplex.front().x + 0.5 * (simplex[v].x - simplex.front().x));
          simplex[v].f = evaluate(simplex[v].x);
          if (evaluations >= options.max_evaluations) break;
        }
      }
    } else {
      const Vec contracted = clip(centroid - 0.5 * (centroid - worst));
      const double f_c = evaluate(contracted);
      if (f_c < simplex.back().f) {
        simplex.back() = Vertex{contracted, f_c};
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) {
          simplex[v].x = clip(simplex.front().x + 0.5 * (simplex[v].x - simplex.front().x));
          simplex[v].f = evaluate(simplex[v].x);
          if (evaluations >= options.max_evaluations) break;
        }
      }
    }
  }

  result.parameters.resize(d);
  for (int i = 0; i < d; ++i) result.parameters[i] = std::exp(best_x[i]);
  result.misfit = best_f;
  result.evaluations = evaluations;
  result.converged = converged;
  result.group_rms.clear();
  Vec natural = result.parameters;
  for (double mse : group_mean_squared_errors(problem, natural))
    result.group_rms.push_back(std::sqrt(mse));
  std::snprintf(line, sizeof line,
                "%s after %d evaluations, misfit %.6g degC^2",
                converged ? "converged" : "stopped at the evaluation budget", evaluations,
                best_f);
  result.log.push_back(line);
  return result;
}

std::string calibration_csv(const CalibrationProblem& problem,
                            const CalibrationResult& result) {
  if (result.parameters.size() != static_cast<long>(problem.parameters.size()))
    throw Error("result does not match the problem");
  std::string out = "domain,parameter,value,unit\n";
  char line[160];
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    const std::string& name = problem.parameters[i].name;
    const double value = result.parameters[static_cast<long>(i)];
    if (name == "robin_h") {
      std::string domains;
      for (const auto& [n, spec] : problem.boundary.robin) {
        (void)spec;
        if (!domains.empty()) domains += ';';
        domains += n;
      }
      for (const auto& [n, spec] : problem.boundary.volumetric_exchange) {
        (void)spec;
        if (!domains.empty()) domains += ';';
        domains += n;
      }
      std::snprintf(line, sizeof line, "%s,h,%.6g,W/degC/m^2\n", domains.c_str(), value);
    } else {
      std::snprintf(line, sizeof line, "%s,lambda_eff,%.6g,W/degC/m\n",
                    lambda_region(name).c_str(), value);
    }
    out += line;
  }
  return out;
}

}  // namespace emtherm
