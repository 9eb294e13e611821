#pragma once

#include "mns/fe_space.hpp"
#include "mns/sparse_matrix.hpp"

#include <functional>
#include <optional>
#include <span>

namespace mns {

using ScalarFunction = std::function<double(Point)>;
using VectorFunction = std::function<Vec2(Point)>;
using ScalarSource = std::function<double(Point, double)>;
using VectorSource = std::function<Vec2(Point, double)>;

/// M_ij = (phi_j, phi_i), block-diagonal over components.
SparseMatrix assemble_mass(const FeSpace& space);

/// K_ij = (grad phi_j, grad phi_i), block-diagonal over components.
SparseMatrix assemble_stiffness(const FeSpace& space);

/// B_qj = (q, div phi_j): pressure rows, velocity columns.
/// The momentum coupling of a pressure p is -B^T p.
SparseMatrix assemble_div(const FeSpace& velocity, const FeSpace& pressure);

/// C_kj = (psi_k, curl phi_j) with curl u = d_x u_2 - d_y u_1: angular rows,
/// velocity columns. For zero-trace fields (curl w, v) = (w, curl v), so the
/// momentum coupling of w is C^T w with curl w = (d_y w, -d_x w).
SparseMatrix assemble_curl(const FeSpace& velocity, const FeSpace& angular);

/// N_i = ((transport . grad) advected, phi_i) on the advected field's space.
Vector assemble_convection_load(const Field& transport, const Field& advected, const FeSpace& test_space);

/// F_i = (f(., t), phi_i).
Vector assemble_load(const ScalarSource& f, const FeSpace& space, double t);
Vector assemble_load(const VectorSource& f, const FeSpace& space, double t);

/// Nodal interpolation.
Field interpolate(const ScalarFunction& f, std::shared_ptr<const FeSpace> space);
Field interpolate(const VectorFunction& f, std::shared_ptr<const FeSpace> space);

struct FieldNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  /// Vector fields only.
  std::optional<double> div_l2;
  std::optional<double> curl_l2;
};

/// L2, H1-seminorm, and for vector fields the L2 norms of div and curl,
/// all by element quadrature.
FieldNorms field_norms(const Field& field);

/// (a_h, curl v_h) and (curl a_h, v_h) by quadrature, for checking the
/// discrete curl identity independently of assemble_curl.
double curl_pairing_scalar_side(const Field& angular, const Field& velocity);
double curl_pairing_vector_side(const Field& angular, const Field& velocity);

/// Symmetric elimination of Dirichlet dofs: constrained rows and columns are
/// zeroed with unit diagonal, and the rhs is lifted so the constrained dofs
/// solve to `values`. Throws std::out_of_range for invalid dofs.
void apply_dirichlet(SparseMatrix& matrix, Vector& rhs, std::span<const int> dofs, std::span<const double> values);

/// Sets rhs entries of the listed dofs to zero (homogeneous data on an
/// already-eliminated matrix).
void zero_dofs(Vector& v, std::span<const int> dofs);

/// Integral of a scalar field, (1, field).
double integrate(const Field& field);

}  // namespace mns
