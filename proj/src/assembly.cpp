#include "mns/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mns {

namespace {

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  if (a.mesh_ptr() != b.mesh_ptr()) throw std::invalid_argument("spaces are defined on different meshes");
}

/// Loops over elements and quadrature points, handing the callback the
/// element index, weight * area, the physical point and the basis of `space`.
template <typename Fn>
void for_each_quadrature_point(const FeSpace& space, Fn&& fn) {
  const Mesh& mesh = space.mesh();
  const auto& rule = triangle_quadrature();
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    for (const auto& qp : rule) {
      const auto basis = barycentric_basis(space.order(), qp.lambda, geo.grad_lambda);
      fn(k, qp.weight * geo.area, geo.map(qp.lambda), qp.lambda, geo, basis);
    }
  }
}

SparseMatrix assemble_scalar_bilinear(const FeSpace& space, bool gradients) {
  const FeSpace scalar(space.mesh_ptr(), space.order(), 1);
  const int nloc = scalar.local_count();
  std::vector<Triplet> triplets;
  triplets.reserve(space.mesh().triangle_count() * nloc * nloc);
  const auto& rule = triangle_quadrature();
  for (std::size_t k = 0; k < scalar.mesh().triangle_count(); ++k) {
    const auto geo = element_geometry(scalar.mesh(), k);
    const auto nodes = scalar.cell_nodes(k);
    double local[6][6] = {};
    for (const auto& qp : rule) {
      const auto b = barycentric_basis(scalar.order(), qp.lambda, geo.grad_lambda);
      const double w = qp.weight * geo.area;
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          local[i][j] += gradients ? w * (b.grads[i][0] * b.grads[j][0] + b.grads[i][1] * b.grads[j][1])
                                   : w * b.values[i] * b.values[j];
        }
      }
    }
    for (int i = 0; i < nloc; ++i) {
      for (int j = 0; j < nloc; ++j) triplets.push_back({nodes[i], nodes[j], local[i][j]});
    }
  }
  const int n = scalar.scalar_dof_count();
  auto m = SparseMatrix::from_triplets(n, n, std::move(triplets), true);
  return space.components() == 1 ? m : interleave_blocks(m, space.components());
}

}  // namespace

SparseMatrix assemble_mass(const FeSpace& space) { return assemble_scalar_bilinear(space, false); }

SparseMatrix assemble_stiffness(const FeSpace& space) { return assemble_scalar_bilinear(space, true); }

SparseMatrix assemble_div(const FeSpace& velocity, const FeSpace& pressure) {
  require_same_mesh(velocity, pressure);
  if (velocity.components() != 2 || pressure.components() != 1) {
    throw std::invalid_argument("assemble_div needs a vector velocity space and a scalar pressure space");
  }
  const Mesh& mesh = velocity.mesh();
  std::vector<Triplet> triplets;
  const auto& rule = triangle_quadrature();
  const int nu = velocity.local_count();
  const int np = pressure.local_count();
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    const auto vnodes = velocity.cell_nodes(k);
    const auto pnodes = pressure.cell_nodes(k);
    double local[6][6][2] = {};
    for (const auto& qp : rule) {
      const auto bu = barycentric_basis(velocity.order(), qp.lambda, geo.grad_lambda);
      const auto bp = barycentric_basis(pressure.order(), qp.lambda, geo.grad_lambda);
      const double w = qp.weight * geo.area;
      for (int q = 0; q < np; ++q) {
        for (int j = 0; j < nu; ++j) {
          local[q][j][0] += w * bp.values[q] * bu.grads[j][0];
          local[q][j][1] += w * bp.values[q] * bu.grads[j][1];
        }
      }
    }
    for (int q = 0; q < np; ++q) {
      for (int j = 0; j < nu; ++j) {
        triplets.push_back({pnodes[q], 2 * vnodes[j], local[q][j][0]});
        triplets.push_back({pnodes[q], 2 * vnodes[j] + 1, local[q][j][1]});
      }
    }
  }
  return SparseMatrix::from_triplets(pressure.dof_count(), velocity.dof_count(), std::move(triplets));
}

SparseMatrix assemble_curl(const FeSpace& velocity, const FeSpace& angular) {
  require_same_mesh(velocity, angular);
  if (velocity.components() != 2 || angular.components() != 1) {
    throw std::invalid_argument("assemble_curl needs a vector velocity space and a scalar angular space");
  }
  const Mesh& mesh = velocity.mesh();
  std::vector<Triplet> triplets;
  const auto& rule = triangle_quadrature();
  const int nu = velocity.local_count();
  const int nw = angular.local_count();
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    const auto vnodes = velocity.cell_nodes(k);
    const auto wnodes = angular.cell_nodes(k);
    double local[6][6][2] = {};
    for (const auto& qp : rule) {
      const auto bu = barycentric_basis(velocity.order(), qp.lambda, geo.grad_lambda);
      const auto bw = barycentric_basis(angular.order(), qp.lambda, geo.grad_lambda);
      const double w = qp.weight * geo.area;
      for (int a = 0; a < nw; ++a) {
        for (int j = 0; j < nu; ++j) {
          // curl (phi_j e_1) = -d_y phi_j, curl (phi_j e_2) = d_x phi_j
          local[a][j][0] -= w * bw.values[a] * bu.grads[j][1];
          local[a][j][1] += w * bw.values[a] * bu.grads[j][0];
        }
      }
    }
    for (int a = 0; a < nw; ++a) {
      for (int j = 0; j < nu; ++j) {
        triplets.push_back({wnodes[a], 2 * vnodes[j], local[a][j][0]});
        triplets.push_back({wnodes[a], 2 * vnodes[j] + 1, local[a][j][1]});
      }
    }
  }
  return SparseMatrix::from_triplets(angular.dof_count(), velocity.dof_count(), std::move(triplets));
}

Vector assemble_convection_load(const Field& transport, const Field& advected, const FeSpace& test_space) {
  const FeSpace& ts = *transport.space;
  const FeSpace& as = *advected.space;
  if (ts.components() != 2) throw std::invalid_argument("transport field must be a vector field");
  if (!as.same_layout(test_space)) throw std::invalid_argument("test space must match the advected field's space");
  require_same_mesh(ts, as);

  const int ncomp = as.components();
  Vector load = Vector::Zero(as.dof_count());
  const Mesh& mesh = ts.mesh();
  const auto& rule = triangle_quadrature();
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    const auto tnodes = ts.cell_nodes(k);
    const auto anodes = as.cell_nodes(k);
    for (const auto& qp : rule) {
      const auto bt = barycentric_basis(ts.order(), qp.lambda, geo.grad_lambda);
      const auto ba = barycentric_basis(as.order(), qp.lambda, geo.grad_lambda);
      const double w = qp.weight * geo.area;
      Vec2 u{0.0, 0.0};
      for (int j = 0; j < bt.count; ++j) {
        u[0] += transport.coeffs[2 * tnodes[j]] * bt.values[j];
        u[1] += transport.coeffs[2 * tnodes[j] + 1] * bt.values[j];
      }
      for (int c = 0; c < ncomp; ++c) {
        double conv = 0.0;  // (u . grad) a_c
        for (int j = 0; j < ba.count; ++j) {
          const double coef = advected.coeffs[ncomp * anodes[j] + c];
          conv += coef * (u[0] * ba.grads[j][0] + u[1] * ba.grads[j][1]);
        }
        for (int i = 0; i < ba.count; ++i) load[ncomp * anodes[i] + c] += w * conv * ba.values[i];
      }
    }
  }
  return load;
}

Vector assemble_load(const ScalarSource& f, const FeSpace& space, double t) {
  if (space.components() != 1) throw std::invalid_argument("scalar load needs a scalar space");
  Vector load = Vector::Zero(space.dof_count());
  for_each_quadrature_point(space, [&](std::size_t k, double w, Point x, const auto&, const auto&, const BasisEval& b) {
    const double fx = f(x, t);
    const auto nodes = space.cell_nodes(k);
    for (int i = 0; i < b.count; ++i) load[nodes[i]] += w * fx * b.values[i];
  });
  return load;
}

Vector assemble_load(const VectorSource& f, const FeSpace& space, double t) {
  if (space.components() != 2) throw std::invalid_argument("vector load needs a vector space");
  Vector load = Vector::Zero(space.dof_count());
  for_each_quadrature_point(space, [&](std::size_t k, double w, Point x, const auto&, const auto&, const BasisEval& b) {
    const Vec2 fx = f(x, t);
    const auto nodes = space.cell_nodes(k);
    for (int i = 0; i < b.count; ++i) {
      load[2 * nodes[i]] += w * fx[0] * b.values[i];
      load[2 * nodes[i] + 1] += w * fx[1] * b.values[i];
    }
  });
  return load;
}

Field interpolate(const ScalarFunction& f, std::shared_ptr<const FeSpace> space) {
  if (space->components() != 1) throw std::invalid_argument("scalar interpolation needs a scalar space");
  Field field = Field::zeros(space);
  const auto& coords = space->dof_coords();
  for (std::size_t i = 0; i < coords.size(); ++i) field.coeffs[i] = f(coords[i]);
  return field;
}

Field interpolate(const VectorFunction& f, std::shared_ptr<const FeSpace> space) {
  if (space->components() != 2) throw std::invalid_argument("vector interpolation needs a vector space");
  Field field = Field::zeros(space);
  const auto& coords = space->dof_coords();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const Vec2 v = f(coords[i]);
    field.coeffs[2 * i] = v[0];
    field.coeffs[2 * i + 1] = v[1];
  }
  return field;
}

FieldNorms field_norms(const Field& field) {
  const FeSpace& space = *field.space;
  const int ncomp = space.components();
  double l2 = 0.0, h1 = 0.0, div = 0.0, curl = 0.0;
  for_each_quadrature_point(space, [&](std::size_t k, double w, Point, const auto&, const auto&, const BasisEval& b) {
    const auto nodes = space.cell_nodes(k);
    double grad[2][2] = {};
    double val[2] = {};
    for (int c = 0; c < ncomp; ++c) {
      for (int j = 0; j < b.count; ++j) {
        const double coef = field.coeffs[ncomp * nodes[j] + c];
        val[c] += coef * b.values[j];
        grad[c][0] += coef * b.grads[j][0];
        grad[c][1] += coef * b.grads[j][1];
      }
      l2 += w * val[c] * val[c];
      h1 += w * (grad[c][0] * grad[c][0] + grad[c][1] * grad[c][1]);
    }
    if (ncomp == 2) {
      const double d = grad[0][0] + grad[1][1];
      const double r = grad[1][0] - grad[0][1];
      div += w * d * d;
      curl += w * r * r;
    }
  });
  FieldNorms norms;
  norms.l2 = std::sqrt(l2);
  norms.h1_semi = std::sqrt(h1);
  if (ncomp == 2) {
    norms.div_l2 = std::sqrt(div);
    norms.curl_l2 = std::sqrt(curl);
  }
  return norms;
}

namespace {

template <typename Fn>
double curl_pairing(const Field& angular, const Field& velocity, Fn&& integrand) {
  const FeSpace& as = *angular.space;
  const FeSpace& vs = *velocity.space;
  require_same_mesh(as, vs);
  if (as.components() != 1 || vs.components() != 2) throw std::invalid_argument("curl pairing needs (scalar, vector)");
  double total = 0.0;
  const Mesh& mesh = as.mesh();
  for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
    const auto geo = element_geometry(mesh, k);
    const auto an = as.cell_nodes(k);
    const auto vn = vs.cell_nodes(k);
    for (const auto& qp : triangle_quadrature()) {
      const auto ba = barycentric_basis(as.order(), qp.lambda, geo.grad_lambda);
      const auto bv = barycentric_basis(vs.order(), qp.lambda, geo.grad_lambda);
      double a = 0.0, ax = 0.0, ay = 0.0;
      for (int j = 0; j < ba.count; ++j) {
        a += angular.coeffs[an[j]] * ba.values[j];
        ax += angular.coeffs[an[j]] * ba.grads[j][0];
        ay += angular.coeffs[an[j]] * ba.grads[j][1];
      }
      double v[2] = {}, g[2][2] = {};
      for (int j = 0; j < bv.count; ++j) {
        for (int c = 0; c < 2; ++c) {
          const double coef = velocity.coeffs[2 * vn[j] + c];
          v[c] += coef * bv.values[j];
          g[c][0] += coef * bv.grads[j][0];
          g[c][1] += coef * bv.grads[j][1];
        }
      }
      total += qp.weight * geo.area * integrand(a, ax, ay, v, g);
    }
  }
  return total;
}

}  // namespace

double curl_pairing_scalar_side(const Field& angular, const Field& velocity) {
  return curl_pairing(angular, velocity, [](double a, double, double, const double*, const double (*g)[2]) {
    return a * (g[1][0] - g[0][1]);
  });
}

double curl_pairing_vector_side(const Field& angular, const Field& velocity) {
  return curl_pairing(angular, velocity, [](double, double ax, double ay, const double* v, const double (*)[2]) {
    return ay * v[0] - ax * v[1];
  });
}

void apply_dirichlet(SparseMatrix& matrix, Vector& rhs, std::span<const int> dofs, std::span<const double> values) {
  if (dofs.size() != values.size()) throw std::invalid_argument("dirichlet dofs and values differ in length");
  if (rhs.size() != matrix.rows()) throw std::invalid_argument("rhs length does not match the matrix");
  if (dofs.empty()) return;
  Vector lift = Vector::Zero(matrix.cols());
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const int d = dofs[i];
    if (d < 0 || d >= matrix.rows() || d >= matrix.cols()) throw std::out_of_range("dirichlet dof out of range");
    lift[d] = values[i];
  }
  rhs -= matrix * lift;
  matrix.eliminate_symmetric(dofs, 1.0);
  for (std::size_t i = 0; i < dofs.size(); ++i) rhs[dofs[i]] = values[i];
}

void zero_dofs(Vector& v, std::span<const int> dofs) {
  for (int d : dofs) v[d] = 0.0;
}

double integrate(const Field& field) {
  const FeSpace& space = *field.space;
  if (space.components() != 1) throw std::invalid_argument("integrate needs a scalar field");
  double total = 0.0;
  for_each_quadrature_point(space, [&](std::size_t k, double w, Point, const auto&, const auto&, const BasisEval& b) {
    const auto nodes = space.cell_nodes(k);
    for (int j = 0; j < b.count; ++j) total += w * field.coeffs[nodes[j]] * b.values[j];
  });
  return total;
}

}  // namespace mns
