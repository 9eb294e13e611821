#include "mns/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mns {

std::optional<double> ErrorReport::rate(std::size_t row, int column) const {
  if (row == 0 || row >= rows.size()) return std::nullopt;
  const double coarse = rows[row - 1].columns()[column];
  const double fine = rows[row].columns()[column];
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

ErrorRow compute_errors(const State& state, const PreparedSystems& systems, const Config& config) {
  const double t = state.t;
  Field eu = interpolate([t](Point x) { return exact_solution(t, x).u; }, systems.velocity_space);
  Field ep = interpolate([t](Point x) { return exact_solution(t, x).p; }, systems.pressure_space);
  Field ew = interpolate([t](Point x) { return exact_solution(t, x).w; }, systems.angular_space);
  eu.coeffs = state.u.coeffs - eu.coeffs;
  ep.coeffs = state.p.coeffs - ep.coeffs;
  ew.coeffs = state.w.coeffs - ew.coeffs;
  // Pressure is determined up to a constant.
  systems.stokes->project_mean_zero(ep.coeffs);

  const auto nu = field_norms(eu);
  const auto np = field_norms(ep);
  const auto nw = field_norms(ew);
  ErrorRow row;
  row.tau = systems.tau;
  row.eu_l2 = nu.l2;
  row.eu_h1 = nu.h1_semi;
  row.ep_l2 = np.l2;
  row.ew_l2 = nw.l2;
  row.ew_h1 = nw.h1_semi;
  row.ew_div = 0.0;
  row.eq = std::abs(state.q - std::exp(-t / config.final_time));
  return row;
}

ErrorReport run_convergence(const Config& config, const std::vector<double>& tau_list) {
  if (tau_list.empty()) throw std::invalid_argument("tau list is empty");
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    const double tau = tau_list[i];
    if (!(tau > 0.0)) throw std::invalid_argument("time steps must be positive");
    if (i > 0 && !(tau < tau_list[i - 1])) throw std::invalid_argument("tau list must be strictly descending");
    const double ratio = config.final_time / tau;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw std::invalid_argument("each time step must divide T");
    }
  }

  Config base = config;
  base.momentum_force = [cfg = config](Point x, double t) { return manufactured_forcing(t, x, cfg).f; };
  base.angular_force = [cfg = config](Point x, double t) { return manufactured_forcing(t, x, cfg).g; };

  ErrorReport report;
  for (double tau : tau_list) {
    Config run = base;
    run.tau = tau;
    auto [state, systems] = init_stepper(
        run, [](Point x) { return exact_solution(0.0, x).u; }, [](Point x) { return exact_solution(0.0, x).w; });
    for (int n = 0; n < run.steps(); ++n) state = advance(state, systems, run);
    report.rows.push_back(compute_errors(state, systems, run));
  }
  return report;
}

EnergySeries record_trajectory(State state, const PreparedSystems& systems, const Config& config,
                               const std::function<void(const State&)>& observer) {
  EnergySeries series;
  series.tau = systems.tau;
  EnergyRecord first;
  first.n = state.n;
  first.t = state.t;
  first.energy = discrete_energy(state, systems, config);
  first.physical_energy = physical_energy(state, systems, config);
  first.q = state.q;
  series.records.push_back(first);
  if (observer) observer(state);
  for (int n = 0; n < config.steps(); ++n) {
    State next = advance(state, systems, config);
    EnergyRecord rec;
    rec.n = next.n;
    rec.t = next.t;
    rec.energy = discrete_energy(next, systems, config);
    rec.physical_energy = physical_energy(next, systems, config);
    rec.q = next.q;
    rec.S = next.diagnostics.S;
    rec.bracket = next.diagnostics.bracket;
    rec.dissipation_residual = energy_dissipation_residual(state, next, systems, config);
    series.records.push_back(rec);
    state = std::move(next);
    if (observer) observer(state);
  }
  return series;
}

std::vector<EnergySeries> run_stability(const Config& config, const std::vector<double>& tau_list) {
  std::vector<EnergySeries> out;
  for (double tau : tau_list) {
    Config run = config;
    run.tau = tau;
    run.momentum_force = {};
    run.angular_force = {};
    auto [state, systems] = init_stepper(run, stability_initial_velocity, stability_initial_angular);
    out.push_back(record_trajectory(std::move(state), systems, run));
  }
  return out;
}

Config stirring_config(double viscosity) {
  Config c;
  c.nu = viscosity;
  c.nu_r = viscosity;
  c.domain = {-1.0, 1.0, -1.0, 1.0};
  c.tau = 0.01;
  c.final_time = 25.0;
  c.h = 1.0 / 48.0;
  return c;
}

StirringResult run_stirring(const Config& config, const std::vector<double>& snapshot_times,
                            const std::function<void(const StirringSnapshot&)>& on_snapshot) {
  Config run = config;
  run.momentum_force = {};
  run.angular_force = [](Point x, double) { return 25.0 * (x.x - 1.0); };
  auto [state, systems] = init_stepper(
      run, [](Point) { return Vec2{0.0, 0.0}; }, [](Point) { return 0.0; });

  auto p1 = FeSpace::scalar(systems.mesh, 1);
  const Field phi0 = interpolate([](Point x) { return x.y < 0.0 ? 1.0 : 0.0; }, p1);
  ScalarField phi = ScalarField::from(phi0);

  StirringResult result;
  result.phi_min = phi.min();
  result.phi_max = phi.max();
  result.min_bracket = std::numeric_limits<double>::infinity();
  const double tau = systems.tau;

  auto take_snapshot = [&](const State& s) {
    StirringSnapshot snap{s.t, phi.field, s.u, s.w};
    snap.total_variation = total_variation(phi.field);
    Field diff{p1, (phi.field.coeffs - phi0.coeffs).cwiseAbs()};
    snap.l1_change = integrate(diff);
    if (on_snapshot) on_snapshot(snap);
    result.snapshots.push_back(std::move(snap));
  };
  auto wanted = [&](double t) {
    return std::any_of(snapshot_times.begin(), snapshot_times.end(),
                       [&](double ts) { return std::abs(ts - t) < 0.5 * tau; });
  };

  if (wanted(0.0)) take_snapshot(state);
  for (int n = 0; n < run.steps(); ++n) {
    state = advance(state, systems, run);
    result.min_bracket = std::min(result.min_bracket, state.diagnostics.bracket);
    phi = advect(phi, state.u, tau);
    result.phi_min = std::min(result.phi_min, phi.min());
    result.phi_max = std::max(result.phi_max, phi.max());
    if (wanted(state.t)) take_snapshot(state);
  }
  result.steps = run.steps();
  return result;
}

}  // namespace mns
