#include "mns/scalar_transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mns {

ScalarField ScalarField::from(Field f) {
  ScalarField s{std::move(f)};
  s.initial_min = s.min();
  s.initial_max = s.max();
  return s;
}

ScalarField advect(const ScalarField& phi, const Field& velocity, double tau) {
  const FeSpace& ps = *phi.field.space;
  const FeSpace& vs = *velocity.space;
  if (ps.order() != 1 || ps.components() != 1) throw std::invalid_argument("advected scalar must be P1");
  if (vs.components() != 2) throw std::invalid_argument("advecting velocity must be a vector field");
  if (ps.mesh_ptr() != vs.mesh_ptr()) throw std::invalid_argument("scalar and velocity live on different meshes");

  const Mesh& mesh = ps.mesh();
  const Rect& box = mesh.bounds();
  ScalarField out = phi;
  const auto& coords = ps.dof_coords();
  auto back = [&](Point x, Vec2 u, double dt) {
    return Point{std::clamp(x.x - dt * u[0], box.xmin, box.xmax), std::clamp(x.y - dt * u[1], box.ymin, box.ymax)};
  };
  for (std::size_t i = 0; i < coords.size(); ++i) {
    // P1 nodes are mesh vertices, which carry the first velocity dofs.
    const Vec2 u{velocity.coeffs[2 * i], velocity.coeffs[2 * i + 1]};
    // Midpoint rule for the characteristic foot.
    const Vec2 u_mid = evaluate_vector(velocity, back(coords[i], u, 0.5 * tau));
    const Point departure = back(coords[i], u_mid, tau);
    const auto loc = mesh.locate(departure);
    const auto& tri = mesh.triangles()[loc.triangle];
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += loc.barycentric[k] * phi.field.coeffs[tri[k]];
    out.field.coeffs[i] = v;
  }
  return out;
}

double total_variation(const Field& phi) {
  const FeSpace& space = *phi.space;
  if (space.order() != 1 || space.components() != 1) throw std::invalid_argument("total variation needs a P1 scalar");
  const Mesh& mesh = space.mesh();
  double tv = 0.0;
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    const auto& tri = mesh.triangles()[k];
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += phi.coeffs[tri[i]] * geo.grad_lambda[i][0];
      gy += phi.coeffs[tri[i]] * geo.grad_lambda[i][1];
    }
    tv += geo.area * std::hypot(gx, gy);
  }
  return tv;
}

}  // namespace mns
