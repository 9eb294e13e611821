#include "mns/sav_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mns {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument(std::string(name) + " must be positive");
}

double quadratic_form(const SparseMatrix& m, const Vector& x) { return x.dot(m * x); }

}  // namespace

int Config::steps() const { return std::max(1, static_cast<int>(std::lround(final_time / tau))); }

double Config::time_step() const { return final_time / steps(); }

std::pair<int, int> Config::cells() const {
  const double side = std::min(domain.width(), domain.height());
  const int base = std::max(1, static_cast<int>(std::lround(side / h)));
  const double hh = side / base;
  return {std::max(1, static_cast<int>(std::lround(domain.width() / hh))),
          std::max(1, static_cast<int>(std::lround(domain.height() / hh)))};
}

void Config::validate() const {
  require_positive(nu, "nu");
  require_positive(nu_r, "nu_r");
  require_positive(microinertia, "j");
  require_positive(c1, "c1");
  require_positive(c2, "c2");
  require_positive(final_time, "T");
  require_positive(tau, "tau");
  require_positive(h, "h");
  require_positive(solver.rtol, "rtol");
  require_positive(solver.rtol_div, "rtol_div");
  if (!(domain.xmin < domain.xmax) || !(domain.ymin < domain.ymax)) {
    throw std::invalid_argument("domain must satisfy xmin < xmax and ymin < ymax");
  }
}

std::pair<State, PreparedSystems> init_stepper(const Config& config, std::shared_ptr<const Mesh> mesh, const Field& u0,
                                               const Field& w0) {
  config.validate();
  PreparedSystems sys;
  sys.mesh = mesh;
  sys.velocity_space = FeSpace::vector(mesh, 2);
  sys.pressure_space = FeSpace::scalar(mesh, 1);
  sys.angular_space = FeSpace::scalar(mesh, 2);
  if (!u0.space->same_layout(*sys.velocity_space) || !w0.space->same_layout(*sys.angular_space)) {
    throw std::invalid_argument("initial fields must be P2 vector / P2 scalar fields on the run mesh");
  }

  const auto& vb = sys.velocity_space->boundary_dofs();
  const auto& wb = sys.angular_space->boundary_dofs();
  for (int d : vb) {
    if (u0.coeffs[d] != 0.0) throw std::invalid_argument("initial velocity must vanish on the boundary");
  }
  for (int d : wb) {
    if (w0.coeffs[d] != 0.0) throw std::invalid_argument("initial angular velocity must vanish on the boundary");
  }

  sys.tau = config.time_step();
  const double tau = sys.tau;
  sys.velocity_mass = assemble_mass(*sys.velocity_space);
  sys.velocity_stiffness = assemble_stiffness(*sys.velocity_space);
  sys.divergence = assemble_div(*sys.velocity_space, *sys.pressure_space);
  sys.curl = assemble_curl(*sys.velocity_space, *sys.angular_space);
  sys.angular_mass = assemble_mass(*sys.angular_space);
  sys.angular_stiffness = assemble_stiffness(*sys.angular_space);
  sys.pressure_mass = assemble_mass(*sys.pressure_space);

  SparseMatrix a_u = linear_combination(1.0 / tau, sys.velocity_mass, config.nu0(), sys.velocity_stiffness);
  a_u.eliminate_symmetric(vb);
  SparseMatrix b = sys.divergence;
  b.zero_columns(vb);
  sys.stokes = std::make_shared<const StokesSolver>(std::move(a_u), std::move(b), sys.pressure_mass, config.solver);

  // The c2 grad-div term acts on (0, 0, w) and vanishes identically.
  SparseMatrix a_w = linear_combination(config.microinertia / tau + 4.0 * config.nu_r, sys.angular_mass, config.c1,
                                        sys.angular_stiffness);
  a_w.eliminate_symmetric(wb);
  sys.angular = std::make_shared<const SpdSolver>(std::move(a_w), config.solver);

  State state;
  state.u = u0;
  state.w = w0;
  state.p = Field::zeros(sys.pressure_space);
  state.q = 1.0;
  state.t = 0.0;
  state.n = 0;
  return {std::move(state), std::move(sys)};
}

std::pair<State, PreparedSystems> init_stepper(const Config& config, const VectorFunction& u0,
                                               const ScalarFunction& w0) {
  config.validate();
  const auto [nx, ny] = config.cells();
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(nx, ny, config.domain));
  Field u = interpolate(u0, FeSpace::vector(mesh, 2));
  Field w = interpolate(w0, FeSpace::scalar(mesh, 2));
  // Analytic initial data may leave rounding-level boundary values.
  zero_dofs(u.coeffs, u.space->boundary_dofs());
  zero_dofs(w.coeffs, w.space->boundary_dofs());
  return init_stepper(config, mesh, u, w);
}

ConvectionLoads convection_loads(const State& state, const PreparedSystems& systems) {
  return {assemble_convection_load(state.u, state.u, *systems.velocity_space),
          assemble_convection_load(state.u, state.w, *systems.angular_space)};
}

namespace {

struct AuxRhs {
  Vector u;
  Vector w;
};

void record(State::Diagnostics* diag, const SolveStats& stats) {
  if (!diag) return;
  diag->stokes_iterations += stats.iterations;
  diag->stokes_residual = std::max(diag->stokes_residual, stats.relative_residual);
  diag->divergence_residual = std::max(diag->divergence_residual, stats.divergence_residual);
}

AuxSolution finish_pair(const PreparedSystems& sys, const Config& config, StokesSolution up, const Vector& rhs_w_base) {
  Vector rhs_w = rhs_w_base + 2.0 * config.nu_r * (sys.curl * up.velocity);
  zero_dofs(rhs_w, sys.angular_space->boundary_dofs());
  Vector w = sys.angular->solve(rhs_w);
  return {std::move(up.velocity), std::move(up.pressure), std::move(w)};
}

AuxSolution solve_pair(const PreparedSystems& sys, const Config& config, AuxRhs rhs, State::Diagnostics* diag) {
  SolveStats stats;
  StokesSolution up = sys.stokes->solve(rhs.u, &stats);
  record(diag, stats);
  return finish_pair(sys, config, std::move(up), rhs.w);
}

AuxRhs aux1_rhs(const State& s, const PreparedSystems& sys, const Config& config) {
  const double tau = sys.tau;
  const double t_next = s.t + tau;
  AuxRhs rhs;
  rhs.u = (sys.velocity_mass * s.u.coeffs) / tau + 2.0 * config.nu_r * sys.curl.transpose_multiply(s.w.coeffs);
  if (config.momentum_force) rhs.u += assemble_load(config.momentum_force, *sys.velocity_space, t_next);
  zero_dofs(rhs.u, sys.velocity_space->boundary_dofs());
  rhs.w = (config.microinertia / tau) * (sys.angular_mass * s.w.coeffs);
  if (config.angular_force) rhs.w += assemble_load(config.angular_force, *sys.angular_space, t_next);
  return rhs;
}

AuxRhs aux2_rhs(const PreparedSystems& sys, const Config& config, const ConvectionLoads& loads) {
  AuxRhs rhs{-loads.velocity, -config.microinertia * loads.angular};
  zero_dofs(rhs.u, sys.velocity_space->boundary_dofs());
  return rhs;
}

}  // namespace

AuxSolution solve_aux1(const State& state, const PreparedSystems& systems, const Config& config) {
  return solve_pair(systems, config, aux1_rhs(state, systems, config), nullptr);
}

AuxSolution solve_aux2(const State&, const PreparedSystems& systems, const Config& config,
                       const ConvectionLoads& loads) {
  return solve_pair(systems, config, aux2_rhs(systems, config, loads), nullptr);
}

ScalarUpdate compute_S(const State& state, const AuxSolution& aux1, const AuxSolution& aux2,
                       const ConvectionLoads& loads, const Config& config, double tau) {
  const double T = config.final_time;
  const double t_next = state.t + tau;
  ScalarUpdate out;
  out.A1 = loads.velocity.dot(aux1.u) + config.microinertia * loads.angular.dot(aux1.w);
  out.A2 = loads.velocity.dot(aux2.u) + config.microinertia * loads.angular.dot(aux2.w);
  const double growth = std::exp(t_next / T);
  out.bracket = (tau + T) / (tau * T) - growth * growth * out.A2;
  if (!(out.bracket > 0.0)) {
    throw std::runtime_error("scalar auxiliary equation has a nonpositive coefficient (" +
                             std::to_string(out.bracket) + "); check the linear solves");
  }
  // bracket * exp(-t/T) * S = exp(t/T) A1 + q^n / tau, with q^{n+1} = exp(-t/T) S.
  out.q = (growth * out.A1 + state.q / tau) / out.bracket;
  out.S = out.q * growth;
  return out;
}

State advance(const State& state, const PreparedSystems& systems, const Config& config) {
  State next;
  next.diagnostics = {};
  const ConvectionLoads loads = convection_loads(state, systems);
  // Both Stokes sub-problems share the operator; solve them together.
  AuxRhs rhs1 = aux1_rhs(state, systems, config);
  AuxRhs rhs2 = aux2_rhs(systems, config, loads);
  std::vector<SolveStats> stats;
  std::vector<StokesSolution> up = systems.stokes->solve({rhs1.u, rhs2.u}, &stats);
  for (const auto& st : stats) record(&next.diagnostics, st);
  const AuxSolution aux1 = finish_pair(systems, config, std::move(up[0]), rhs1.w);
  const AuxSolution aux2 = finish_pair(systems, config, std::move(up[1]), rhs2.w);
  const ScalarUpdate su = compute_S(state, aux1, aux2, loads, config, systems.tau);

  next.u = {systems.velocity_space, aux1.u + su.S * aux2.u};
  next.p = {systems.pressure_space, aux1.p + su.S * aux2.p};
  systems.stokes->project_mean_zero(next.p.coeffs);
  next.w = {systems.angular_space, aux1.w + su.S * aux2.w};
  next.q = su.q;
  next.n = state.n + 1;
  next.t = next.n * systems.tau;
  next.diagnostics.S = su.S;
  next.diagnostics.bracket = su.bracket;
  next.diagnostics.A1 = su.A1;
  next.diagnostics.A2 = su.A2;
  return next;
}

double discrete_energy(const State& state, const PreparedSystems& systems, const Config& config) {
  const double wweight = config.microinertia + 4.0 * systems.tau * config.nu_r;
  return 0.5 * quadratic_form(systems.velocity_mass, state.u.coeffs) +
         0.5 * wweight * quadratic_form(systems.angular_mass, state.w.coeffs) + 0.5 * state.q * state.q;
}

double physical_energy(const State& state, const PreparedSystems& systems, const Config& config) {
  return 0.5 * quadratic_form(systems.velocity_mass, state.u.coeffs) +
         0.5 * config.microinertia * quadratic_form(systems.angular_mass, state.w.coeffs);
}

double energy_dissipation_residual(const State& prev, const State& next, const PreparedSystems& systems,
                                   const Config& config) {
  const double tau = systems.tau;
  const double de = discrete_energy(next, systems, config) - discrete_energy(prev, systems, config);
  const double grad_u = quadratic_form(systems.velocity_stiffness, next.u.coeffs);
  const double grad_w = quadratic_form(systems.angular_stiffness, next.w.coeffs);
  constexpr double div_w = 0.0;  // w = (0, 0, w) is divergence free
  return de + tau * config.nu * grad_u + tau * config.c1 * grad_w + tau * config.c2 * div_w +
         (tau / config.final_time) * next.q * next.q;
}

}  // namespace mns
