#pragma once

#include "mns/sav_stepper.hpp"
#include "mns/scalar_transport.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace mns {

// ---------------------------------------------------------------------------
// Manufactured solution on (0,1)^2

struct ExactValues {
  Vec2 u;
  double p;  // shifted to zero mean over (0,1)^2
  double w;
};

ExactValues exact_solution(double t, Point x);

struct Forcing {
  Vec2 f;
  double g;
};

/// Right-hand sides that make exact_solution solve the forced micropolar
/// system with the parameters of `config`.
Forcing manufactured_forcing(double t, Point x, const Config& config);

// ---------------------------------------------------------------------------
// Convergence study

/// Final-time errors of one run.
struct ErrorRow {
  double tau = 0.0;
  double eu_l2 = 0.0;
  double eu_h1 = 0.0;
  double ep_l2 = 0.0;
  double ew_l2 = 0.0;
  double ew_h1 = 0.0;
  double ew_div = 0.0;  // identically zero in 2D
  double eq = 0.0;

  static constexpr int kColumns = 6;
  /// eu_l2, eu_h1, ep_l2, ew_l2, ew_h1, eq
  std::array<double, kColumns> columns() const { return {eu_l2, eu_h1, ep_l2, ew_l2, ew_h1, eq}; }
};

struct ErrorReport {
  std::vector<ErrorRow> rows;

  /// log2(err(previous row) / err(row)); empty for the first row.
  std::optional<double> rate(std::size_t row, int column) const;
};

/// Errors against the nodal interpolant of exact_solution at state.t.
/// The pressure error is taken modulo constants; e_q = |q - exp(-t/T)|.
ErrorRow compute_errors(const State& state, const PreparedSystems& systems, const Config& config);

/// Runs the forced manufactured problem to T for each step size
/// (descending, each dividing T).
ErrorReport run_convergence(const Config& config, const std::vector<double>& tau_list);

// ---------------------------------------------------------------------------
// Energy stability

struct EnergyRecord {
  int n = 0;
  double t = 0.0;
  double energy = 0.0;
  double physical_energy = 0.0;
  double q = 1.0;
  std::optional<double> S;
  std::optional<double> dissipation_residual;
  std::optional<double> bracket;
};

struct EnergySeries {
  double tau = 0.0;
  std::vector<EnergyRecord> records;
};

/// Initial data of the unforced energy test.
Vec2 stability_initial_velocity(Point x);
double stability_initial_angular(Point x);

/// Unforced runs from the stability initial data, one series per step size.
std::vector<EnergySeries> run_stability(const Config& config, const std::vector<double>& tau_list);

/// Steps an already-initialised run to T, recording every level.
EnergySeries record_trajectory(State state, const PreparedSystems& systems, const Config& config,
                               const std::function<void(const State&)>& observer = {});

// ---------------------------------------------------------------------------
// Passive-scalar stirring

struct StirringSnapshot {
  double t = 0.0;
  Field phi;
  Field velocity;
  Field angular;
  double total_variation = 0.0;
  double l1_change = 0.0;  // (|phi - phi0|, 1)
};

struct StirringResult {
  std::vector<StirringSnapshot> snapshots;
  double phi_min = 0.0;  // over all steps
  double phi_max = 0.0;
  double min_bracket = 0.0;
  int steps = 0;
};

/// Torque-driven stirring on config.domain (the experiment uses (-1,1)^2):
/// u0 = w0 = 0, angular forcing g = 25(x - 1), phi0 = 1 below y = 0.
/// Each step advances the flow, then advects phi with the new velocity.
StirringResult run_stirring(const Config& config, const std::vector<double>& snapshot_times,
                            const std::function<void(const StirringSnapshot&)>& on_snapshot = {});

/// Default stirring configuration for a given nu = nu_r.
Config stirring_config(double viscosity);

}  // namespace mns
