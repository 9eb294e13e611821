#pragma once

#include "mns/sparse_matrix.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mns {

enum class SolverMethod {
  direct,     // sparse Cholesky / sparse LU
  iterative,  // Jacobi PCG / Uzawa Schur-complement CG
};

struct SolverOptions {
  SolverMethod method = SolverMethod::direct;
  double rtol = 1e-10;      // momentum / angular residual
  double rtol_div = 1e-8;   // discrete divergence
  int max_iterations = 0;   // 0: a multiple of the system size
};

/// Raised when a solve misses its residual contract or the operator is not
/// of the expected class. Carries the achieved relative residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  double divergence_residual = 0.0;
};

/// Prepared symmetric positive definite operator.
class SpdSolver {
 public:
  SpdSolver(SparseMatrix matrix, SolverOptions options);

  /// ||A x - b|| <= rtol ||b||, or SolverError.
  Vector solve(const Vector& rhs, SolveStats* stats = nullptr) const;

  const SparseMatrix& matrix() const { return matrix_; }
  const SolverOptions& options() const { return options_; }

 private:
  Vector solve_pcg(const Vector& rhs, double rtol, SolveStats& stats) const;

  SparseMatrix matrix_;
  SolverOptions options_;
  Vector inverse_diagonal_;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> cholesky_;
};

SpdSolver prepare_spd(SparseMatrix matrix, SolverOptions options = {});
Vector solve_spd(const SpdSolver& solver, const Vector& rhs, SolveStats* stats = nullptr);

struct StokesSolution {
  Vector velocity;
  Vector pressure;
};

/// Generalized Stokes operator
///   A u - B^T p = f,   B u = 0,   (p, 1) = 0
/// with A the Dirichlet-eliminated velocity block and B the divergence matrix
/// whose constrained velocity columns are zeroed.
class StokesSolver {
 public:
  StokesSolver(SparseMatrix velocity_block, SparseMatrix divergence, SparseMatrix pressure_mass, SolverOptions options);

  StokesSolution solve(const Vector& rhs_velocity, SolveStats* stats = nullptr) const;
  /// Several right-hand sides at once; one factorization sweep when direct.
  std::vector<StokesSolution> solve(const std::vector<Vector>& rhs_velocity,
                                    std::vector<SolveStats>* stats = nullptr) const;

  /// Shifts p by a constant so that (p, 1) = 0.
  void project_mean_zero(Vector& pressure) const;

  const SparseMatrix& velocity_block() const { return velocity_block_; }
  const SparseMatrix& divergence() const { return divergence_; }

 private:
  StokesSolution solve_uzawa(const Vector& f, SolveStats& stats) const;
  StokesSolution solve_direct(const Vector& f) const;
  void check_contract(const Vector& f, const StokesSolution& sol, SolveStats& stats) const;

  SparseMatrix velocity_block_;
  SparseMatrix divergence_;
  SparseMatrix divergence_t_;
  SparseMatrix pressure_mass_;
  SolverOptions options_;
  std::unique_ptr<SpdSolver> velocity_solver_;
  std::unique_ptr<SpdSolver> mass_solver_;
  Vector mass_weights_;  // M_p 1
  double measure_ = 0.0;  // 1^T M_p 1
  double divergence_scale_ = 0.0;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> saddle_lu_;
};

StokesSolver prepare_stokes(SparseMatrix velocity_block, SparseMatrix divergence, SparseMatrix pressure_mass,
                            SolverOptions options = {});
StokesSolution solve_stokes(const StokesSolver& solver, const Vector& rhs_velocity, SolveStats* stats = nullptr);

}  // namespace mns
