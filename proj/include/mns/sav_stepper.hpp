#pragma once

#include "mns/assembly.hpp"
#include "mns/fe_space.hpp"
#include "mns/mesh.hpp"
#include "mns/solvers.hpp"

#include <memory>
#include <optional>

namespace mns {

/// Physical and numerical parameters of a micropolar flow run.
struct Config {
  double nu = 1.0;           // Newtonian viscosity
  double nu_r = 1.0;         // microrotation viscosity
  double microinertia = 1.0; // j
  double c1 = 2.0;           // angular diffusion c_a + c_d
  double c2 = 1.0;           // c_0 + c_d - c_a (grad-div term, vanishes in 2D)
  double final_time = 1.0;   // T, also the decay scale of the auxiliary variable
  double tau = 0.1;          // requested time step; snapped to T / round(T / tau)
  double h = 1.0 / 64.0;     // mesh size along the shorter side
  Rect domain{0.0, 1.0, 0.0, 1.0};
  SolverOptions solver;
  VectorSource momentum_force;  // f(x, t), optional
  ScalarSource angular_force;   // g(x, t), optional

  double nu0() const { return nu + nu_r; }
  int steps() const;
  double time_step() const;
  /// Cell counts along x and y for mesh size h.
  std::pair<int, int> cells() const;
  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// Discrete solution at time level n.
struct State {
  Field u;  // P2 velocity
  Field p;  // P1 pressure, zero mean
  Field w;  // P2 angular velocity
  double q = 1.0;
  double t = 0.0;
  int n = 0;

  struct Diagnostics {
    double S = 1.0;
    double bracket = 0.0;  // coefficient (tau+T)/(tau T) - exp(2t/T) A_2
    double A1 = 0.0;
    double A2 = 0.0;
    int stokes_iterations = 0;
    double stokes_residual = 0.0;
    double divergence_residual = 0.0;
  } diagnostics;
};

/// Time-independent operators, assembled and prepared once per run.
struct PreparedSystems {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> velocity_space;
  std::shared_ptr<const FeSpace> pressure_space;
  std::shared_ptr<const FeSpace> angular_space;

  SparseMatrix velocity_mass;
  SparseMatrix velocity_stiffness;
  SparseMatrix divergence;
  SparseMatrix curl;
  SparseMatrix angular_mass;
  SparseMatrix angular_stiffness;
  SparseMatrix pressure_mass;

  double tau = 0.0;  // effective step
  std::shared_ptr<const StokesSolver> stokes;   // M_u / tau + nu0 K_u
  std::shared_ptr<const SpdSolver> angular;     // (j/tau) M_w + c1 K_w + 4 nu_r M_w
};

/// One of the two linear sub-problems of a step.
struct AuxSolution {
  Vector u;
  Vector p;
  Vector w;
};

/// Explicit convection loads of a step, (u^n . grad u^n, v) and
/// (u^n . grad w^n, psi), shared by the second sub-problem and the scalar
/// equation.
struct ConvectionLoads {
  Vector velocity;
  Vector angular;
};

struct ScalarUpdate {
  double S = 1.0;
  double q = 1.0;
  double bracket = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
};

/// Assembles and prepares all operators; returns the state at t = 0, q = 1.
/// u0 and w0 must vanish on the boundary.
std::pair<State, PreparedSystems> init_stepper(const Config& config, std::shared_ptr<const Mesh> mesh, const Field& u0,
                                               const Field& w0);

/// Builds the mesh and spaces from config.domain/h and interpolates initial data.
std::pair<State, PreparedSystems> init_stepper(const Config& config, const VectorFunction& u0,
                                               const ScalarFunction& w0);

ConvectionLoads convection_loads(const State& state, const PreparedSystems& systems);

/// Sub-problem carrying the old state, curl coupling and forcing at t^{n+1}.
AuxSolution solve_aux1(const State& state, const PreparedSystems& systems, const Config& config);
/// Sub-problem carrying the explicit convection (multiplied by S^{n+1}).
AuxSolution solve_aux2(const State& state, const PreparedSystems& systems, const Config& config,
                       const ConvectionLoads& loads);

/// Solves the scalar equation for S^{n+1}; throws std::runtime_error if its
/// coefficient is not positive.
ScalarUpdate compute_S(const State& state, const AuxSolution& aux1, const AuxSolution& aux2,
                       const ConvectionLoads& loads, const Config& config, double tau);

/// One full step of the decoupled scheme.
State advance(const State& state, const PreparedSystems& systems, const Config& config);

/// E = 1/2 |u|^2 + (j + 4 tau nu_r)/2 |w|^2 + 1/2 q^2.
double discrete_energy(const State& state, const PreparedSystems& systems, const Config& config);
/// 1/2 |u|^2 + j/2 |w|^2.
double physical_energy(const State& state, const PreparedSystems& systems, const Config& config);

/// (E^{n+1} - E^n) + tau nu |grad u|^2 + tau c1 |grad w|^2 + tau c2 |div w|^2
/// + tau/T q^2, evaluated at n+1; nonpositive for unforced runs.
double energy_dissipation_residual(const State& prev, const State& next, const PreparedSystems& systems,
                                   const Config& config);

}  // namespace mns
