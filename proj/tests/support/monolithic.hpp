#pragma once

#include "mns/sav_stepper.hpp"

namespace mns::testing {

struct MonolithicStep {
  Vector u;
  Vector p;
  Vector w;
  double q = 0.0;
};

// One step of the coupled linear scheme, assembled as a single dense system
// in (u, p, w, q) with a Lagrange multiplier for the pressure mean, and
// solved by full-pivot LU. S = q exp(t/T) enters bilinearly with the
// explicit convection loads.
MonolithicStep monolithic_step(const State& state, const PreparedSystems& systems, const Config& config);

double relative_difference(const Vector& a, const Vector& b);

}  // namespace mns::testing
