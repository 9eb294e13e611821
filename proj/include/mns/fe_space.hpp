#pragma once

#include "mns/mesh.hpp"
#include "mns/sparse_matrix.hpp"

#include <array>
#include <memory>
#include <vector>

namespace mns {

using Vec2 = std::array<double, 2>;

/// Values and gradients of the local Lagrange basis at one point.
/// Only the first `count` entries are meaningful (3 for P1, 6 for P2).
struct BasisEval {
  int count = 0;
  std::array<double, 6> values{};
  std::array<Vec2, 6> grads{};
};

/// Local basis on the reference triangle (0,0), (1,0), (0,1) at (xi, eta).
/// P2 ordering: the three vertices, then the midpoints of edges 0-1, 1-2, 2-0.
BasisEval reference_basis(int order, double xi, double eta);

/// Same basis expressed through barycentric coordinates and their (constant)
/// physical gradients on an affine element.
BasisEval barycentric_basis(int order, const std::array<double, 3>& lambda, const std::array<Vec2, 3>& grad_lambda);

/// 7-point rule exact for polynomials of degree <= 5; weights sum to 1.
struct QuadraturePoint {
  std::array<double, 3> lambda;
  double weight;
};
const std::array<QuadraturePoint, 7>& triangle_quadrature();

/// Affine element data for triangle k of a mesh.
struct ElementGeometry {
  std::array<Point, 3> vertices;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda{};

  Point map(const std::array<double, 3>& lambda) const {
    return {lambda[0] * vertices[0].x + lambda[1] * vertices[1].x + lambda[2] * vertices[2].x,
            lambda[0] * vertices[0].y + lambda[1] * vertices[1].y + lambda[2] * vertices[2].y};
  }
};
ElementGeometry element_geometry(const Mesh& mesh, std::size_t k);

/// Continuous nodal P1/P2 space, scalar or 2-vector.
///
/// Scalar dofs are the mesh vertices followed (for P2) by the edge midpoints.
/// Vector dofs are interleaved: component c of scalar node i is dof 2*i + c.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int order, int components);

  static std::shared_ptr<const FeSpace> scalar(std::shared_ptr<const Mesh> mesh, int order) {
    return std::make_shared<const FeSpace>(std::move(mesh), order, 1);
  }
  static std::shared_ptr<const FeSpace> vector(std::shared_ptr<const Mesh> mesh, int order) {
    return std::make_shared<const FeSpace>(std::move(mesh), order, 2);
  }

  int order() const { return order_; }
  int components() const { return components_; }
  int local_count() const { return order_ == 1 ? 3 : 6; }
  int scalar_dof_count() const { return static_cast<int>(coords_.size()); }
  int dof_count() const { return components_ * scalar_dof_count(); }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  /// Coordinates of each scalar node.
  const std::vector<Point>& dof_coords() const { return coords_; }
  /// Sorted dofs (all components) whose nodes lie on the boundary.
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  /// Scalar node indices of triangle k, in local basis order.
  std::array<int, 6> cell_nodes(std::size_t k) const;

  bool same_layout(const FeSpace& other) const {
    return mesh_ == other.mesh_ && order_ == other.order_ && components_ == other.components_;
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int order_;
  int components_;
  std::vector<Point> coords_;
  std::vector<int> boundary_dofs_;
};

/// Coefficient vector on a space.
struct Field {
  std::shared_ptr<const FeSpace> space;
  Vector coeffs;

  static Field zeros(std::shared_ptr<const FeSpace> space) {
    const int n = space->dof_count();
    return {std::move(space), Vector::Zero(n)};
  }
};

double evaluate_scalar(const Field& field, Point p);
Vec2 evaluate_vector(const Field& field, Point p);

}  // namespace mns
