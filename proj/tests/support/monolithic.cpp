#include "monolithic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace mns::testing {

namespace {

void add_block(Eigen::MatrixXd& big, int r0, int c0, const Eigen::MatrixXd& block, double scale) {
  big.block(r0, c0, block.rows(), block.cols()) += scale * block;
}

}  // namespace

MonolithicStep monolithic_step(const State& state, const PreparedSystems& sys, const Config& config) {
  const double tau = sys.tau;
  const double T = config.final_time;
  const double t = state.t + tau;
  const double growth = std::exp(t / T);
  const double j = config.microinertia;

  // Unassembled operators, straight from the spaces.
  const Eigen::MatrixXd Mu = sys.velocity_mass.to_dense();
  const Eigen::MatrixXd Ku = sys.velocity_stiffness.to_dense();
  const Eigen::MatrixXd B = sys.divergence.to_dense();
  const Eigen::MatrixXd C = sys.curl.to_dense();
  const Eigen::MatrixXd Mw = sys.angular_mass.to_dense();
  const Eigen::MatrixXd Kw = sys.angular_stiffness.to_dense();
  const Vector mean_weights = sys.pressure_mass.to_dense() * Vector::Ones(B.rows());

  const int nu = static_cast<int>(Mu.rows());
  const int np = static_cast<int>(B.rows());
  const int nw = static_cast<int>(Mw.rows());
  const int iu = 0, ip = nu, iw = nu + np, iq = nu + np + nw, il = iq + 1;
  const int n = il + 1;

  const ConvectionLoads loads = convection_loads(state, sys);
  Vector F = Vector::Zero(nu);
  Vector G = Vector::Zero(nw);
  if (config.momentum_force) F = assemble_load(config.momentum_force, *sys.velocity_space, t);
  if (config.angular_force) G = assemble_load(config.angular_force, *sys.angular_space, t);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Vector rhs = Vector::Zero(n);

  // Momentum: (u - u^n)/tau + nu0 K u - B^T p + S N_u = 2 nu_r C^T w^n + F
  add_block(A, iu, iu, Mu, 1.0 / tau);
  add_block(A, iu, iu, Ku, config.nu0());
  add_block(A, iu, ip, B.transpose(), -1.0);
  A.block(iu, iq, nu, 1) += growth * loads.velocity;
  rhs.segment(iu, nu) = Mu * state.u.coeffs / tau + 2.0 * config.nu_r * C.transpose() * state.w.coeffs + F;

  // Continuity and the pressure mean.
  add_block(A, ip, iu, B, 1.0);
  A.block(ip, il, np, 1) = mean_weights;
  A.block(il, ip, 1, np) = mean_weights.transpose();

  // Angular: j (w - w^n)/tau + c1 K w + 4 nu_r w - 2 nu_r C u + j S N_w = G
  add_block(A, iw, iw, Mw, j / tau + 4.0 * config.nu_r);
  add_block(A, iw, iw, Kw, config.c1);
  add_block(A, iw, iu, C, -2.0 * config.nu_r);
  A.block(iw, iq, nw, 1) += j * growth * loads.angular;
  rhs.segment(iw, nw) = (j / tau) * Mw * state.w.coeffs + G;

  // Auxiliary scalar: (q - q^n)/tau + q/T = exp(t/T) [(N_u, u) + j (N_w, w)]
  A(iq, iq) = 1.0 / tau + 1.0 / T;
  A.block(iq, iu, 1, nu) = -growth * loads.velocity.transpose();
  A.block(iq, iw, 1, nw) = -growth * j * loads.angular.transpose();
  rhs(iq) = state.q / tau;

  // Homogeneous Dirichlet data: replace rows by identity, drop the columns.
  auto pin = [&](int offset, const std::vector<int>& dofs) {
    for (int d : dofs) {
      const int r = offset + d;
      A.row(r).setZero();
      A.col(r).setZero();
      A(r, r) = 1.0;
      rhs(r) = 0.0;
    }
  };
  pin(iu, sys.velocity_space->boundary_dofs());
  pin(iw, sys.angular_space->boundary_dofs());

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw std::runtime_error("monolithic system is singular");
  const Vector z = lu.solve(rhs);
  return {z.segment(iu, nu), z.segment(ip, np), z.segment(iw, nw), z(iq)};
}

double relative_difference(const Vector& a, const Vector& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

}  // namespace mns::testing
