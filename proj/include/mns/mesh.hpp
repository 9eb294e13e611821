#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mns {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

/// Location of a point inside the triangulation.
struct PointLocation {
  int triangle = -1;
  std::array<double, 3> barycentric{};
};

/// Structured triangulation of a rectangle.
///
/// Cell (i, j) with lower-left vertex v00 is split along the v00-v11
/// diagonal into the triangles (v00, v10, v11) and (v00, v11, v01), both
/// counter-clockwise. Vertex (i, j) has index j * (nx + 1) + i. Local edge
/// k of a triangle joins its local vertices k and (k + 1) % 3.
class Mesh {
 public:
  Mesh() = default;

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  /// Edge ids of each triangle, ordered as the local edges.
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
  const std::vector<bool>& boundary_vertex_flags() const { return boundary_vertex_; }
  const std::vector<bool>& boundary_edge_flags() const { return boundary_edge_; }
  const Rect& bounds() const { return bounds_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  /// Signed area of triangle k (positive for counter-clockwise ordering).
  double signed_area(std::size_t k) const;
  double edge_length(std::size_t e) const;
  double max_edge_length() const;

  /// True if p lies on the rectangle boundary to absolute 1e-12.
  bool on_boundary(Point p) const;

  /// Finds the triangle containing p (clamped into the rectangle) using the
  /// structured cell layout.
  PointLocation locate(Point p) const;

  friend Mesh build_rect_mesh(int nx, int ny, const Rect& bounds);

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<bool> boundary_vertex_;
  std::vector<bool> boundary_edge_;
  Rect bounds_;
  int nx_ = 0;
  int ny_ = 0;
};

/// Uniform nx x ny grid on `bounds`, two right triangles per cell.
/// Throws std::invalid_argument for nonpositive counts or degenerate bounds.
Mesh build_rect_mesh(int nx, int ny, const Rect& bounds);

/// Midpoint of every edge, indexed by edge id.
std::vector<Point> edge_midpoints(const Mesh& mesh);

}  // namespace mns
