#pragma once

#include "mns/fe_space.hpp"

namespace mns {

/// Passive scalar on a P1 space.
struct ScalarField {
  Field field;
  double initial_min = 0.0;
  double initial_max = 0.0;

  static ScalarField from(Field f);
  double min() const { return field.coeffs.minCoeff(); }
  double max() const { return field.coeffs.maxCoeff(); }
};

/// Semi-Lagrangian step for phi_t + u . grad phi = 0: each P1 node takes the
/// old value at its departure point x - tau u(x - tau/2 u(x)), clamped into
/// the domain.
/// The update is a convex combination of old nodal values.
ScalarField advect(const ScalarField& phi, const Field& velocity, double tau);

/// Total variation (|grad phi|, 1) of a P1 field; for a sharp 0/1 interface
/// this is the interface length.
double total_variation(const Field& phi);

}  // namespace mns
