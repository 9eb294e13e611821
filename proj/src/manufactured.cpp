#include "mns/experiments.hpp"

#include <cmath>
#include <numbers>

namespace mns {

namespace {

constexpr double pi = std::numbers::pi;

// a(z) = sin^2(pi z), b(z) = sin(2 pi z) and their derivatives.
struct Profile {
  double a, da, dda, b, db, ddb;
  explicit Profile(double z) {
    const double s = std::sin(pi * z);
    a = s * s;
    da = pi * std::sin(2.0 * pi * z);
    dda = 2.0 * pi * pi * std::cos(2.0 * pi * z);
    b = std::sin(2.0 * pi * z);
    db = 2.0 * pi * std::cos(2.0 * pi * z);
    ddb = -4.0 * pi * pi * b;
  }
};

}  // namespace

ExactValues exact_solution(double t, Point x) {
  const Profile X(x.x), Y(x.y);
  const double s = std::sin(t);
  ExactValues v;
  v.u = {s * X.a * Y.b, -s * X.b * Y.a};
  // (sin(pi x) sin(pi y), 1) = 4 / pi^2
  v.p = s * (std::sin(pi * x.x) * std::sin(pi * x.y) - 4.0 / (pi * pi));
  v.w = s * X.a * Y.a;
  return v;
}

Forcing manufactured_forcing(double t, Point x, const Config& config) {
  const Profile X(x.x), Y(x.y);
  const double s = std::sin(t);
  const double c = std::cos(t);

  const double u1 = s * X.a * Y.b;
  const double u2 = -s * X.b * Y.a;
  const double u1_t = c * X.a * Y.b;
  const double u2_t = -c * X.b * Y.a;
  const double u1_x = s * X.da * Y.b;
  const double u1_y = s * X.a * Y.db;
  const double u2_x = -s * X.db * Y.a;
  const double u2_y = -s * X.b * Y.da;
  const double lap_u1 = s * (X.dda * Y.b + X.a * Y.ddb);
  const double lap_u2 = -s * (X.ddb * Y.a + X.b * Y.dda);

  const double p_x = s * pi * std::cos(pi * x.x) * std::sin(pi * x.y);
  const double p_y = s * pi * std::sin(pi * x.x) * std::cos(pi * x.y);

  const double w = s * X.a * Y.a;
  const double w_t = c * X.a * Y.a;
  const double w_x = s * X.da * Y.a;
  const double w_y = s * X.a * Y.da;
  const double lap_w = s * (X.dda * Y.a + X.a * Y.dda);

  const double nu0 = config.nu0();
  const double nr = config.nu_r;
  const double j = config.microinertia;

  Forcing out;
  // u_t + u.grad u - nu0 lap u + grad p - 2 nu_r curl w, curl w = (w_y, -w_x)
  out.f[0] = u1_t + u1 * u1_x + u2 * u1_y - nu0 * lap_u1 + p_x - 2.0 * nr * w_y;
  out.f[1] = u2_t + u1 * u2_x + u2 * u2_y - nu0 * lap_u2 + p_y + 2.0 * nr * w_x;
  // j w_t + j u.grad w - c1 lap w + 4 nu_r w - 2 nu_r curl u
  out.g = j * w_t + j * (u1 * w_x + u2 * w_y) - config.c1 * lap_w + 4.0 * nr * w - 2.0 * nr * (u2_x - u1_y);
  return out;
}

Vec2 stability_initial_velocity(Point p) {
  const double x = p.x, y = p.y;
  return {x * x * (x - 1.0) * (x - 1.0) * y * (y - 1.0) * (2.0 * y - 1.0),
          -y * y * (y - 1.0) * (y - 1.0) * x * (x - 1.0) * (2.0 * x - 1.0)};
}

double stability_initial_angular(Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); }

}  // namespace mns
