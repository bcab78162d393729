#include "emtherm/transient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace emtherm {

namespace {

SpMat scaled_sum(const SpMat& mass, double inv_dt, const SpMat& stiffness, double factor) {
  SpMat out = inv_dt * mass;
  if (factor != 0.0) out += factor * stiffness;
  return out;
}

double checked_time_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  return dt;
}

double checked_theta(double theta) {
  if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("theta must lie in [0.5, 1]");
  return theta;
}

}  // namespace

ThetaIntegrator::ThetaIntegrator(const LinearSystem& system, double time_step,
                                 double theta, SolverBackend backend)
    : system_(&system),
      dt_(checked_time_step(time_step)),
      theta_(checked_theta(theta)),
      rhs_matrix_(scaled_sum(system.mass, 1.0 / dt_,
                             SpMat(system.conduction + system.exchange),
                             -(1.0 - theta_))),
      op_(scaled_sum(system.mass, 1.0 / dt_,
                     SpMat(system.conduction + system.exchange), theta_),
          system.constrained_nodes, backend) {}

Vec ThetaIntegrator::step(double time, const Vec& temperature, const Vec& load_now,
                          const Vec& load_next) const {
  if (temperature.size() != system_->size) throw Error("temperature vector size mismatch");
  const Vec rhs =
      rhs_matrix_ * temperature + theta_ * load_next + (1.0 - theta_) * load_now;
  return op_.solve(rhs, system_->constrained_values_at(time + dt_));
}

Vec joule_unit_load(const Mesh& mesh, double model_fraction, double axial_length) {
  if (!(model_fraction > 0.0 && model_fraction <= 1.0))
    throw ConfigError("model fraction must lie in (0, 1]");
  if (!(axial_length > 0.0)) throw ConfigError("axial length must be positive");

  double conductor_area = 0.0;
  std::map<int, double> density;
  for (const auto& [tag, name] : mesh.tags.regions()) {
    if (name.rfind("conductor", 0) == 0) {
      density[tag] = 0.0;
      conductor_area += mesh.region_area(tag);
    }
  }
  if (density.empty() || conductor_area <= 0.0)
    throw ConfigError("losses require a region named 'conductor...' with positive area");

  const double q = model_fraction / (conductor_area * axial_length);  // W/m^3 per W
  for (auto& [tag, value] : density) value = q;
  return assemble_source(mesh, density);
}

void ScenarioSpec::validate() const {
  if (!(time_step_s > 0.0) || !std::isfinite(time_step_s))
    throw ConfigError("time step must be positive");
  if (!(end_time_s > 0.0) || !std::isfinite(end_time_s))
    throw ConfigError("end time must be positive");
  const double steps = end_time_s / time_step_s;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("end time must be an integer number of time steps");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("theta must lie in [0.5, 1]");
  if (!std::isfinite(initial_temperature))
    throw ConfigError("initial temperature must be finite");
  if (!(loss_fraction_in_model > 0.0 && loss_fraction_in_model <= 1.0))
    throw ConfigError("model fraction must lie in (0, 1]");
  if (!(axial_length_m > 0.0)) throw ConfigError("axial length must be positive");
  for (double t : snapshot_times)
    if (t < 0.0 || t > end_time_s)
      throw ConfigError("snapshot time outside the simulated interval");
}

ScenarioResult run_scenario(const Mesh& mesh, const LinearSystem& system,
                            const ScenarioSpec& spec) {
  spec.validate();
  if (mesh.node_count() != system.size)
    throw Error("mesh and linear system sizes disagree");
  const int n_steps = static_cast<int>(std::round(spec.end_time_s / spec.time_step_s));
  const double dt = spec.time_step_s;

  // Probe locations resolve before any stepping so bad probes fail fast.
  std::vector<std::pair<std::string, ProbeLocation>> probes;
  probes.reserve(spec.probes.size());
  for (const auto& [name, point] : spec.probes) {
    try {
      probes.emplace_back(name, locate_probe(mesh, point));
    } catch (const ConfigError& e) {
      throw ConfigError("probe '" + name + "': " + e.what());
    }
  }

  const bool has_losses =
      spec.loss_power.min_value() != 0.0 || spec.loss_power.max_value() != 0.0;
  Vec unit_load;
  if (has_losses)
    unit_load = joule_unit_load(mesh, spec.loss_fraction_in_model, spec.axial_length_m);

  auto load_at = [&](double t) {
    Vec f = system.exchange_load_at(t);
    if (has_losses) f += spec.loss_power(t) * unit_load;
    return f;
  };

  // Snapshot requests snap to the nearest step boundary.
  std::vector<int> snapshot_steps;
  snapshot_steps.reserve(spec.snapshot_times.size());
  for (double t : spec.snapshot_times)
    snapshot_steps.push_back(
        std::clamp(static_cast<int>(std::round(t / dt)), 0, n_steps));
  std::sort(snapshot_steps.begin(), snapshot_steps.end());
  snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()),
                       snapshot_steps.end());

  ThetaIntegrator integrator(system, dt, spec.theta, spec.backend);
  const SpMat operator_matrix = system.conduction + system.exchange;

  ScenarioResult result;
  result.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  for (const auto& [name, loc] : probes) {
    (void)loc;
    result.probe_traces[name].reserve(static_cast<std::size_t>(n_steps) + 1);
  }
  if (spec.record_balance) result.balance.reserve(static_cast<std::size_t>(n_steps));

  Vec temperature = Vec::Constant(system.size, spec.initial_temperature);
  auto record = [&](double t, const Vec& field) {
    result.times.push_back(t);
    for (const auto& [name, loc] : probes)
      result.probe_traces[name].push_back(probe_value(mesh, loc, field));
  };
  record(0.0, temperature);
  auto snapshot_it = snapshot_steps.begin();
  if (snapshot_it != snapshot_steps.end() && *snapshot_it == 0) {
    result.snapshots.emplace_back(0.0, temperature);
    ++snapshot_it;
  }

  Vec load_now = load_at(0.0);
  for (int step = 1; step <= n_steps; ++step) {
    const double t0 = (step - 1) * dt;
    const double t1 = step * dt;
    const Vec load_next = load_at(t1);
    const Vec next = integrator.step(t0, temperature, load_now, load_next);

    if (spec.record_balance) {
      const Vec t_weighted = spec.theta * next + (1.0 - spec.theta) * temperature;
      const Vec f_weighted = spec.theta * load_next + (1.0 - spec.theta) * load_now;
      const Vec defect = system.mass * ((next - temperature) / dt) +
                         operator_matrix * t_weighted - f_weighted;
      const double scale = spec.axial_length_m;
      StepBalance b;
      b.time = t1;
      b.stored = scale * (system.mass * ((next - temperature) / dt)).sum();
      double reactions = 0.0;
      for (int node : system.constrained_nodes) reactions += defect[node];
      b.net_input =
          scale * (f_weighted.sum() - (operator_matrix * t_weighted).sum() + reactions);
      b.residual = b.stored - b.net_input;
      b.relative_error =
          std::abs(b.residual) /
          std::max({std::abs(b.stored), std::abs(b.net_input), 1e-6});
      result.max_balance_error = std::max(result.max_balance_error, b.relative_error);
      result.balance.push_back(b);
    }

    temperature = next;
    load_now = load_next;
    record(t1, temperature);
    if (snapshot_it != snapshot_steps.end() && *snapshot_it == step) {
      result.snapshots.emplace_back(t1, temperature);
      ++snapshot_it;
    }
  }

  result.final_field = std::move(temperature);
  return result;
}

}  // namespace emtherm
