#include "mns/fe_space.hpp"

#include <cmath>
#include <stdexcept>

namespace mns {

BasisEval barycentric_basis(int order, const std::array<double, 3>& l, const std::array<Vec2, 3>& g) {
  BasisEval b;
  if (order == 1) {
    b.count = 3;
    for (int i = 0; i < 3; ++i) {
      b.values[i] = l[i];
      b.grads[i] = g[i];
    }
    return b;
  }
  if (order != 2) throw std::invalid_argument("only P1 and P2 bases are supported");
  b.count = 6;
  for (int i = 0; i < 3; ++i) {
    b.values[i] = l[i] * (2.0 * l[i] - 1.0);
    const double s = 4.0 * l[i] - 1.0;
    b.grads[i] = {s * g[i][0], s * g[i][1]};
  }
  for (int e = 0; e < 3; ++e) {
    const int i = e;
    const int j = (e + 1) % 3;
    b.values[3 + e] = 4.0 * l[i] * l[j];
    b.grads[3 + e] = {4.0 * (l[j] * g[i][0] + l[i] * g[j][0]), 4.0 * (l[j] * g[i][1] + l[i] * g[j][1])};
  }
  return b;
}

BasisEval reference_basis(int order, double xi, double eta) {
  static const std::array<Vec2, 3> kRefGrad{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  return barycentric_basis(order, {1.0 - xi - eta, xi, eta}, kRefGrad);
}

const std::array<QuadraturePoint, 7>& triangle_quadrature() {
  static const std::array<QuadraturePoint, 7> rule = [] {
    const double r15 = std::sqrt(15.0);
    const double a = (6.0 - r15) / 21.0;
    const double b = (9.0 + 2.0 * r15) / 21.0;
    const double c = (6.0 + r15) / 21.0;
    const double d = (9.0 - 2.0 * r15) / 21.0;
    const double wa = (155.0 - r15) / 1200.0;
    const double wc = (155.0 + r15) / 1200.0;
    return std::array<QuadraturePoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{a, a, b}, wa},
        {{a, b, a}, wa},
        {{b, a, a}, wa},
        {{c, c, d}, wc},
        {{c, d, c}, wc},
        {{d, c, c}, wc},
    }};
  }();
  return rule;
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t k) {
  ElementGeometry geo;
  const auto& tri = mesh.triangles()[k];
  for (int i = 0; i < 3; ++i) geo.vertices[i] = mesh.vertices()[tri[i]];
  const auto& v = geo.vertices;
  const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
  geo.area = 0.5 * det;
  // grad lambda_i is the inward normal of the opposite edge scaled by 1/(2|K|).
  for (int i = 0; i < 3; ++i) {
    const Point& p = v[(i + 1) % 3];
    const Point& q = v[(i + 2) % 3];
    geo.grad_lambda[i] = {(p.y - q.y) / det, (q.x - p.x) / det};
  }
  return geo;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int order, int components)
    : mesh_(std::move(mesh)), order_(order), components_(components) {
  if (!mesh_) throw std::invalid_argument("FeSpace requires a mesh");
  if (order_ != 1 && order_ != 2) throw std::invalid_argument("FeSpace order must be 1 or 2");
  if (components_ != 1 && components_ != 2) throw std::invalid_argument("FeSpace components must be 1 or 2");

  coords_ = mesh_->vertices();
  std::vector<bool> on_gamma = mesh_->boundary_vertex_flags();
  if (order_ == 2) {
    const auto mids = edge_midpoints(*mesh_);
    coords_.insert(coords_.end(), mids.begin(), mids.end());
    const auto& edge_flags = mesh_->boundary_edge_flags();
    on_gamma.insert(on_gamma.end(), edge_flags.begin(), edge_flags.end());
  }
  for (int i = 0; i < static_cast<int>(coords_.size()); ++i) {
    if (!on_gamma[i]) continue;
    for (int c = 0; c < components_; ++c) boundary_dofs_.push_back(components_ * i + c);
  }
}

std::array<int, 6> FeSpace::cell_nodes(std::size_t k) const {
  const auto& tri = mesh_->triangles()[k];
  std::array<int, 6> nodes{tri[0], tri[1], tri[2], -1, -1, -1};
  if (order_ == 2) {
    const int nv = static_cast<int>(mesh_->vertex_count());
    const auto& te = mesh_->triangle_edges()[k];
    for (int e = 0; e < 3; ++e) nodes[3 + e] = nv + te[e];
  }
  return nodes;
}

namespace {

BasisEval basis_at(const FeSpace& space, const PointLocation& loc) {
  const auto geo = element_geometry(space.mesh(), loc.triangle);
  return barycentric_basis(space.order(), loc.barycentric, geo.grad_lambda);
}

}  // namespace

double evaluate_scalar(const Field& field, Point p) {
  const FeSpace& space = *field.space;
  if (space.components() != 1) throw std::invalid_argument("evaluate_scalar needs a scalar field");
  const auto loc = space.mesh().locate(p);
  const auto b = basis_at(space, loc);
  const auto nodes = space.cell_nodes(loc.triangle);
  double v = 0.0;
  for (int i = 0; i < b.count; ++i) v += field.coeffs[nodes[i]] * b.values[i];
  return v;
}

Vec2 evaluate_vector(const Field& field, Point p) {
  const FeSpace& space = *field.space;
  if (space.components() != 2) throw std::invalid_argument("evaluate_vector needs a vector field");
  const auto loc = space.mesh().locate(p);
  const auto b = basis_at(space, loc);
  const auto nodes = space.cell_nodes(loc.triangle);
  Vec2 v{0.0, 0.0};
  for (int i = 0; i < b.count; ++i) {
    v[0] += field.coeffs[2 * nodes[i]] * b.values[i];
    v[1] += field.coeffs[2 * nodes[i] + 1] * b.values[i];
  }
  return v;
}

}  // namespace mns
