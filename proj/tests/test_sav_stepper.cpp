#include "mns/experiments.hpp"
#include "support/monolithic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mns;
using mns::testing::monolithic_step;
using mns::testing::relative_difference;

namespace {

Config coarse(double h = 1.0 / 8.0) {
  Config c;
  c.h = h;
  return c;
}

std::pair<State, PreparedSystems> at_rest(const Config& c) {
  return init_stepper(c, [](Point) { return Vec2{0.0, 0.0}; }, [](Point) { return 0.0; });
}

Config forced(Config c) {
  c.momentum_force = [c](Point x, double t) { return manufactured_forcing(t, x, c).f; };
  c.angular_force = [c](Point x, double t) { return manufactured_forcing(t, x, c).g; };
  return c;
}

}  // namespace

TEST(Config, Validation) {
  Config c;
  EXPECT_NO_THROW(c.validate());
  c.nu = -1;
  try {
    c.validate();
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "nu must be positive");
  }
  c = Config{};
  c.c2 = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = Config{};
  c.domain = {1, 0, 0, 1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, UniformTimeGrid) {
  Config c;
  c.final_time = 1.0;
  c.tau = 0.3;
  EXPECT_EQ(c.steps(), 3);
  EXPECT_DOUBLE_EQ(c.time_step(), 1.0 / 3.0);
  c.tau = 0.025;
  EXPECT_EQ(c.steps(), 40);
  EXPECT_DOUBLE_EQ(c.nu0(), c.nu + c.nu_r);
  c.domain = {-1, 1, -1, 1};
  c.h = 1.0 / 48.0;
  EXPECT_EQ(c.cells(), (std::pair<int, int>{96, 96}));
}

TEST(Init, ZeroDataEnergyIsHalf) {
  auto [s, sys] = at_rest(coarse());
  EXPECT_EQ(s.q, 1.0);
  EXPECT_EQ(s.t, 0.0);
  EXPECT_EQ(s.n, 0);
  EXPECT_EQ(discrete_energy(s, sys, coarse()), 0.5);
}

TEST(Init, StabilityDataVanishesOnBoundary) {
  auto [s, sys] = init_stepper(coarse(), stability_initial_velocity, stability_initial_angular);
  EXPECT_GT(s.u.coeffs.norm(), 0.0);
  for (int d : s.u.space->boundary_dofs()) EXPECT_EQ(s.u.coeffs[d], 0.0);
  for (int d : s.w.space->boundary_dofs()) EXPECT_EQ(s.w.coeffs[d], 0.0);
}

TEST(Init, RejectsNonzeroBoundaryData) {
  const Config c = coarse();
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(4, 4, c.domain));
  const Field u = interpolate([](Point) { return Vec2{1.0, 0.0}; }, FeSpace::vector(mesh, 2));
  const Field w = Field::zeros(FeSpace::scalar(mesh, 2));
  EXPECT_THROW(init_stepper(c, mesh, u, w), std::invalid_argument);
}

TEST(Aux, ZeroDataGivesZero) {
  const Config c = coarse();
  auto [s, sys] = at_rest(c);
  const AuxSolution a1 = solve_aux1(s, sys, c);
  EXPECT_EQ(a1.u.norm() + a1.p.norm() + a1.w.norm(), 0.0);
  const ConvectionLoads loads = convection_loads(s, sys);
  const AuxSolution a2 = solve_aux2(s, sys, c, loads);
  EXPECT_EQ(a2.u.norm() + a2.p.norm() + a2.w.norm(), 0.0);
}

TEST(Aux, CurlCouplingDrivesVelocity) {
  const Config c = coarse();
  auto [s, sys] = init_stepper(
      c, [](Point) { return Vec2{0.0, 0.0}; }, [](Point x) { return std::sin(M_PI * x.x) * std::sin(M_PI * x.y); });
  EXPECT_GT(sys.curl.transpose_multiply(s.w.coeffs).norm(), 0.0);
  const AuxSolution a1 = solve_aux1(s, sys, c);
  EXPECT_GT(a1.u.norm(), 0.0);
  const double div = (sys.divergence * a1.u).norm() / (sys.divergence.max_abs() * a1.u.norm());
  EXPECT_LE(div, c.solver.rtol_div);
}

TEST(Aux, ConvectionCouplesIntoAngular) {
  const Config c = coarse();
  auto [s, sys] = init_stepper(c, stability_initial_velocity, [](Point) { return 0.0; });
  const ConvectionLoads loads = convection_loads(s, sys);
  EXPECT_EQ(loads.angular.norm(), 0.0);
  const AuxSolution a2 = solve_aux2(s, sys, c, loads);
  EXPECT_GT(a2.u.norm(), 0.0);
  EXPECT_GT(a2.w.norm(), 0.0);
}

TEST(ComputeS, ZeroDataExample) {
  Config c = coarse();
  c.tau = 0.1;
  c.final_time = 1.0;
  auto [s, sys] = at_rest(c);
  const AuxSolution zero{Vector::Zero(s.u.coeffs.size()), Vector::Zero(s.p.coeffs.size()),
                         Vector::Zero(s.w.coeffs.size())};
  const ConvectionLoads loads = convection_loads(s, sys);
  const ScalarUpdate su = compute_S(s, zero, zero, loads, c, 0.1);
  EXPECT_NEAR(su.bracket, 11.0, 1e-12);
  EXPECT_NEAR(su.S, 10.0 / (11.0 * std::exp(-0.1)), 1e-14);
  EXPECT_NEAR(su.S, 1.0047008, 1e-7);
  EXPECT_NEAR(su.q, 10.0 / 11.0, 1e-15);
}

TEST(ComputeS, RejectsNonpositiveBracket) {
  Config c = coarse();
  auto [s, sys] = at_rest(c);
  const int nu = s.u.coeffs.size(), nw = s.w.coeffs.size();
  ConvectionLoads loads{Vector::Ones(nu), Vector::Zero(nw)};
  AuxSolution a1{Vector::Zero(nu), Vector::Zero(s.p.coeffs.size()), Vector::Zero(nw)};
  AuxSolution a2 = a1;
  a2.u = Vector::Constant(nu, 1.0);  // A2 = nu, far above (tau + T) / (tau T)
  EXPECT_THROW(compute_S(s, a1, a2, loads, c, sys.tau), std::runtime_error);
}

TEST(Advance, ZeroDataFollowsScalarRecursion) {
  Config c = coarse(0.25);
  c.tau = 0.01;
  c.final_time = 1.0;
  auto [s, sys] = at_rest(c);
  const double ratio = c.final_time / (c.final_time + sys.tau);
  for (int n = 1; n <= 100; ++n) {
    State next = advance(s, sys, c);
    const double expect = std::pow(ratio, n);
    EXPECT_LE(std::abs(next.q - expect), 1e-13 * expect) << "n=" << n;
    EXPECT_EQ(next.u.coeffs.norm() + next.w.coeffs.norm() + next.p.coeffs.norm(), 0.0);
    // Only q carries energy: r = (q^2 - q_prev^2) / 2 + (tau/T) q^2 = -(tau q / T)^2 / 2.
    const double r = energy_dissipation_residual(s, next, sys, c);
    const double expect_r = 0.5 * (next.q * next.q - s.q * s.q) + (sys.tau / c.final_time) * next.q * next.q;
    EXPECT_NEAR(r, expect_r, 1e-15);
    EXPECT_NEAR(r, -0.5 * std::pow(sys.tau * next.q / c.final_time, 2), 1e-14);
    EXPECT_LE(r, 0.0);
    s = std::move(next);
  }
  EXPECT_EQ(s.n, 100);
  EXPECT_NEAR(s.t, 1.0, 1e-14);
}

TEST(Advance, MatchesDenseMonolithicSolve) {
  Config c = forced(coarse(1.0 / 3.0));
  c.nu = 0.3;
  c.nu_r = 0.7;
  c.microinertia = 1.3;
  c.tau = 0.1;
  auto [s, sys] = init_stepper(c, stability_initial_velocity, stability_initial_angular);
  // Scale the data up so the convective terms matter.
  s.u.coeffs *= 50.0;
  s.w.coeffs *= 2.0;
  const int total = s.u.coeffs.size() + s.p.coeffs.size() + s.w.coeffs.size() + 1;
  ASSERT_LE(total, 200);
  for (int step = 0; step < 3; ++step) {
    const auto mono = monolithic_step(s, sys, c);
    State next = advance(s, sys, c);
    EXPECT_LE(relative_difference(next.u.coeffs, mono.u), 1e-8);
    EXPECT_LE(relative_difference(next.p.coeffs, mono.p), 1e-8);
    EXPECT_LE(relative_difference(next.w.coeffs, mono.w), 1e-8);
    EXPECT_LE(std::abs(next.q - mono.q), 1e-8 * std::abs(mono.q));
    s = std::move(next);
  }
}

TEST(Advance, ScalarRecursionConsistency) {
  Config c = forced(coarse());
  c.tau = 0.05;
  auto [s, sys] = init_stepper(c, stability_initial_velocity, stability_initial_angular);
  for (int n = 0; n < 5; ++n) {
    State next = advance(s, sys, c);
    const auto& d = next.diagnostics;
    const double lhs = next.q * (1.0 / sys.tau + 1.0 / c.final_time) -
                       std::exp(next.t / c.final_time) * (d.A1 + d.S * d.A2);
    EXPECT_NEAR(lhs, s.q / sys.tau, 1e-10 * s.q / sys.tau);
    EXPECT_GT(d.bracket, 0.0);
    s = std::move(next);
  }
}

TEST(Advance, EnergyDecaysFromStabilityData) {
  Config c = coarse();
  c.nu = c.nu_r = 0.01;
  c.final_time = 5.0;
  for (double tau : {1.0, 0.1}) {
    c.tau = tau;
    auto [s, sys] = init_stepper(c, stability_initial_velocity, stability_initial_angular);
    const double e0 = discrete_energy(s, sys, c);
    EXPECT_NEAR(e0, 0.5 * s.u.coeffs.dot(sys.velocity_mass * s.u.coeffs) +
                        0.5 * (c.microinertia + 4 * sys.tau * c.nu_r) * s.w.coeffs.dot(sys.angular_mass * s.w.coeffs) +
                        0.5,
                1e-15);
    for (int n = 0; n < 5; ++n) {
      State next = advance(s, sys, c);
      EXPECT_LE(discrete_energy(next, sys, c), discrete_energy(s, sys, c) + 1e-8 * e0);
      EXPECT_LE(energy_dissipation_residual(s, next, sys, c), 1e-8 * e0);
      s = std::move(next);
    }
  }
}

TEST(Energy, QuadraticInVelocity) {
  const Config c = coarse();
  auto [s, sys] = init_stepper(c, stability_initial_velocity, [](Point) { return 0.0; });
  s.q = 0.0;
  const double e1 = discrete_energy(s, sys, c);
  s.u.coeffs *= 2.0;
  EXPECT_NEAR(discrete_energy(s, sys, c), 4.0 * e1, 1e-15);
  EXPECT_NEAR(physical_energy(s, sys, c), 4.0 * e1, 1e-15);
}

TEST(Advance, ManufacturedRunKeepsSNearOne) {
  Config c = forced(coarse(1.0 / 16.0));
  c.tau = 0.025;
  auto [s, sys] = init_stepper(
      c, [](Point x) { return exact_solution(0.0, x).u; }, [](Point x) { return exact_solution(0.0, x).w; });
  for (int n = 0; n < c.steps(); ++n) {
    s = advance(s, sys, c);
    EXPECT_GT(s.diagnostics.S, 0.9);
    EXPECT_LT(s.diagnostics.S, 1.1);
  }
}

TEST(Advance, IterativeSolversAgreeWithDirect) {
  Config c = forced(coarse());
  c.tau = 0.1;
  Config ci = c;
  ci.solver.method = SolverMethod::iterative;
  auto [sd, sysd] = init_stepper(c, stability_initial_velocity, stability_initial_angular);
  auto [si, sysi] = init_stepper(ci, stability_initial_velocity, stability_initial_angular);
  for (int n = 0; n < 3; ++n) {
    sd = advance(sd, sysd, c);
    si = advance(si, sysi, ci);
  }
  EXPECT_LE(relative_difference(sd.u.coeffs, si.u.coeffs), 1e-7);
  EXPECT_LE(relative_difference(sd.w.coeffs, si.w.coeffs), 1e-7);
  EXPECT_LE(relative_difference(sd.p.coeffs, si.p.coeffs), 1e-6);
  EXPECT_NEAR(sd.q, si.q, 1e-9);
}

TEST(Advance, PressureHasZeroMean) {
  Config c = forced(coarse());
  auto [s, sys] = init_stepper(c, stability_initial_velocity, stability_initial_angular);
  s = advance(s, sys, c);
  const Vector weights = sys.pressure_mass * Vector::Ones(s.p.coeffs.size());
  EXPECT_NEAR(weights.dot(s.p.coeffs), 0.0, 1e-12 * (1.0 + s.p.coeffs.norm()));
}
