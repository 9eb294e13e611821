#include "mns/solvers.hpp"

#include <cmath>
#include <vector>

namespace mns {

namespace {

int iteration_budget(const SolverOptions& opt, int n) {
  return opt.max_iterations > 0 ? opt.max_iterations : std::max(100, 10 * n);
}

}  // namespace

SpdSolver::SpdSolver(SparseMatrix matrix, SolverOptions options)
    : matrix_(std::move(matrix)), options_(options) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("SPD solver needs a square matrix");
  const Vector diag = matrix_.diagonal();
  for (int i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) throw SolverError("matrix is not positive definite: nonpositive diagonal", 0.0);
  }
  inverse_diagonal_ = diag.cwiseInverse();
  if (options_.method == SolverMethod::direct) {
    cholesky_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    cholesky_->compute(matrix_.to_eigen());
    if (cholesky_->info() != Eigen::Success) {
      throw SolverError("Cholesky factorization broke down: matrix is not positive definite", 0.0);
    }
  }
}

Vector SpdSolver::solve_pcg(const Vector& b, double rtol, SolveStats& stats) const {
  const int n = matrix_.rows();
  Vector x = Vector::Zero(n);
  Vector r = b;
  const double bnorm = b.norm();
  Vector z = inverse_diagonal_.cwiseProduct(r);
  Vector d = z;
  double rz = r.dot(z);
  const int budget = iteration_budget(options_, n);
  int it = 0;
  while (r.norm() > rtol * bnorm) {
    if (it == budget) throw SolverError("PCG reached the iteration limit", r.norm() / bnorm);
    const Vector ad = matrix_ * d;
    const double curvature = d.dot(ad);
    if (!(curvature > 0.0)) throw SolverError("PCG met a nonpositive curvature direction", r.norm() / bnorm);
    const double alpha = rz / curvature;
    x += alpha * d;
    r -= alpha * ad;
    z = inverse_diagonal_.cwiseProduct(r);
    const double rz_next = r.dot(z);
    d = z + (rz_next / rz) * d;
    rz = rz_next;
    ++it;
  }
  stats.iterations = it;
  return x;
}

Vector SpdSolver::solve(const Vector& rhs, SolveStats* stats) const {
  if (rhs.size() != matrix_.rows()) throw std::invalid_argument("rhs length does not match the SPD matrix");
  SolveStats local;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = local;
    return Vector::Zero(rhs.size());
  }
  Vector x;
  if (cholesky_) {
    x = cholesky_->solve(rhs);
  } else {
    // The recurrence residual drifts from the true one; aim a little lower.
    x = solve_pcg(rhs, 0.1 * options_.rtol, local);
  }
  local.relative_residual = (matrix_ * x - rhs).norm() / bnorm;
  if (!(local.relative_residual <= options_.rtol)) {
    throw SolverError("SPD solve missed its residual tolerance", local.relative_residual);
  }
  if (stats) *stats = local;
  return x;
}

SpdSolver prepare_spd(SparseMatrix matrix, SolverOptions options) { return SpdSolver(std::move(matrix), options); }

Vector solve_spd(const SpdSolver& solver, const Vector& rhs, SolveStats* stats) { return solver.solve(rhs, stats); }

StokesSolver::StokesSolver(SparseMatrix velocity_block, SparseMatrix divergence, SparseMatrix pressure_mass,
                           SolverOptions options)
    : velocity_block_(std::move(velocity_block)),
      divergence_(std::move(divergence)),
      pressure_mass_(std::move(pressure_mass)),
      options_(options) {
  const int nu = velocity_block_.rows();
  const int np = divergence_.rows();
  if (velocity_block_.cols() != nu || divergence_.cols() != nu || pressure_mass_.rows() != np ||
      pressure_mass_.cols() != np) {
    throw std::invalid_argument("Stokes blocks have inconsistent shapes");
  }
  divergence_t_ = divergence_.transpose();
  mass_weights_ = pressure_mass_ * Vector::Ones(np);
  measure_ = mass_weights_.sum();
  divergence_scale_ = divergence_.max_abs();

  if (options_.method == SolverMethod::iterative) {
    SolverOptions inner = options_;
    inner.rtol = 0.01 * options_.rtol;
    velocity_solver_ = std::make_unique<SpdSolver>(velocity_block_, inner);
    mass_solver_ = std::make_unique<SpdSolver>(pressure_mass_, inner);
    return;
  }

  // [A B^T; B 0] in the unknowns (u, -p), pressure dof 0 pinned.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(velocity_block_.nonzeros() + 2 * divergence_.nonzeros() + 1);
  {
    const auto rp = velocity_block_.row_ptr();
    const auto ci = velocity_block_.col_idx();
    const auto v = velocity_block_.values();
    for (int r = 0; r < nu; ++r) {
      for (int k = rp[r]; k < rp[r + 1]; ++k) {
        if (v[k] != 0.0) t.emplace_back(r, ci[k], v[k]);
      }
    }
  }
  {
    const auto rp = divergence_.row_ptr();
    const auto ci = divergence_.col_idx();
    const auto v = divergence_.values();
    for (int q = 1; q < np; ++q) {
      for (int k = rp[q]; k < rp[q + 1]; ++k) {
        if (v[k] == 0.0) continue;
        t.emplace_back(nu + q, ci[k], v[k]);
        t.emplace_back(ci[k], nu + q, v[k]);
      }
    }
  }
  t.emplace_back(nu, nu, 1.0);
  Eigen::SparseMatrix<double> saddle(nu + np, nu + np);
  saddle.setFromTriplets(t.begin(), t.end());
  saddle.makeCompressed();
  saddle_lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  saddle_lu_->compute(saddle);
  if (saddle_lu_->info() != Eigen::Success) {
    throw SolverError("saddle-point factorization failed: " + saddle_lu_->lastErrorMessage(), 0.0);
  }
}

void StokesSolver::project_mean_zero(Vector& pressure) const {
  pressure.array() -= mass_weights_.dot(pressure) / measure_;
}

StokesSolution StokesSolver::solve_direct(const Vector& f) const {
  const int nu = velocity_block_.rows();
  const int np = divergence_.rows();
  Vector rhs = Vector::Zero(nu + np);
  rhs.head(nu) = f;
  const Vector x = saddle_lu_->solve(rhs);
  StokesSolution sol{x.head(nu), -x.tail(np)};
  return sol;
}

StokesSolution StokesSolver::solve_uzawa(const Vector& f, SolveStats& stats) const {
  const int np = divergence_.rows();
  // Schur complement S = B A^{-1} B^T acting on p; residual of S p = -B A^{-1} f is -B u.
  Vector p = Vector::Zero(np);
  Vector u = velocity_solver_->solve(f);
  Vector r = -(divergence_ * u);
  Vector z = mass_solver_->solve(r);
  Vector d = z;
  double rz = r.dot(z);
  const int budget = iteration_budget(options_, np);
  int it = 0;
  auto converged = [&] { return r.norm() <= 0.1 * options_.rtol_div * divergence_scale_ * u.norm(); };
  while (!converged()) {
    if (it == budget) throw SolverError("Uzawa pressure iteration reached its limit", r.norm());
    const Vector du = velocity_solver_->solve(divergence_t_ * d);
    const Vector sd = divergence_ * du;
    const double curvature = d.dot(sd);
    if (!(curvature > 0.0)) throw SolverError("Schur complement lost definiteness", r.norm());
    const double alpha = rz / curvature;
    p += alpha * d;
    u += alpha * du;
    r -= alpha * sd;
    z = mass_solver_->solve(r);
    const double rz_next = r.dot(z);
    d = z + (rz_next / rz) * d;
    rz = rz_next;
    project_mean_zero(d);
    ++it;
  }
  stats.iterations = it;
  // Refresh u from p to remove recurrence drift in the momentum residual.
  u = velocity_solver_->solve(f + divergence_t_ * p);
  return {u, p};
}

void StokesSolver::check_contract(const Vector& f, const StokesSolution& sol, SolveStats& stats) const {
  const double fnorm = f.norm();
  const Vector momentum = velocity_block_ * sol.velocity - divergence_t_ * sol.pressure - f;
  stats.relative_residual = fnorm > 0.0 ? momentum.norm() / fnorm : momentum.norm();
  const double div = (divergence_ * sol.velocity).norm();
  const double scale = divergence_scale_ * sol.velocity.norm();
  stats.divergence_residual = scale > 0.0 ? div / scale : div;
  if (!(stats.relative_residual <= options_.rtol)) {
    throw SolverError("Stokes momentum residual above tolerance", stats.relative_residual);
  }
  if (!(stats.divergence_residual <= options_.rtol_div)) {
    throw SolverError("Stokes divergence residual above tolerance", stats.divergence_residual);
  }
}

StokesSolution StokesSolver::solve(const Vector& rhs_velocity, SolveStats* stats) const {
  if (rhs_velocity.size() != velocity_block_.rows()) throw std::invalid_argument("Stokes rhs has the wrong length");
  SolveStats local;
  StokesSolution sol;
  if (rhs_velocity.norm() == 0.0) {
    sol = {Vector::Zero(velocity_block_.rows()), Vector::Zero(divergence_.rows())};
  } else if (saddle_lu_) {
    sol = solve_direct(rhs_velocity);
  } else {
    sol = solve_uzawa(rhs_velocity, local);
  }
  project_mean_zero(sol.pressure);
  check_contract(rhs_velocity, sol, local);
  if (stats) *stats = local;
  return sol;
}

std::vector<StokesSolution> StokesSolver::solve(const std::vector<Vector>& rhs_velocity,
                                                std::vector<SolveStats>* stats) const {
  const int nu = velocity_block_.rows();
  const int np = divergence_.rows();
  std::vector<StokesSolution> out(rhs_velocity.size());
  std::vector<SolveStats> local(rhs_velocity.size());
  if (!saddle_lu_) {
    for (std::size_t i = 0; i < rhs_velocity.size(); ++i) out[i] = solve(rhs_velocity[i], &local[i]);
    if (stats) *stats = std::move(local);
    return out;
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < rhs_velocity.size(); ++i) {
    if (rhs_velocity[i].size() != nu) throw std::invalid_argument("Stokes rhs has the wrong length");
    if (rhs_velocity[i].norm() == 0.0) {
      out[i] = {Vector::Zero(nu), Vector::Zero(np)};
    } else {
      active.push_back(i);
    }
  }
  if (!active.empty()) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nu + np, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) rhs.col(k).head(nu) = rhs_velocity[active[k]];
    const Eigen::MatrixXd x = saddle_lu_->solve(rhs);
    for (std::size_t k = 0; k < active.size(); ++k) {
      out[active[k]] = {x.col(k).head(nu), -x.col(k).tail(np)};
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    project_mean_zero(out[i].pressure);
    check_contract(rhs_velocity[i], out[i], local[i]);
  }
  if (stats) *stats = std::move(local);
  return out;
}

StokesSolver prepare_stokes(SparseMatrix velocity_block, SparseMatrix divergence, SparseMatrix pressure_mass,
                            SolverOptions options) {
  return StokesSolver(std::move(velocity_block), std::move(divergence), std::move(pressure_mass), options);
}

StokesSolution solve_stokes(const StokesSolver& solver, const Vector& rhs_velocity, SolveStats* stats) {
  return solver.solve(rhs_velocity, stats);
}

}  // namespace mns
