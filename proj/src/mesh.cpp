#include "mns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace mns {

namespace {

constexpr double kBoundaryTol = 1e-12;

}  // namespace

double Mesh::signed_area(std::size_t k) const {
  const auto& t = triangles_[k];
  const Point a = vertices_[t[0]];
  const Point b = vertices_[t[1]];
  const Point c = vertices_[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::edge_length(std::size_t e) const {
  const Point a = vertices_[edges_[e][0]];
  const Point b = vertices_[edges_[e][1]];
  return std::hypot(b.x - a.x, b.y - a.y);
}

double Mesh::max_edge_length() const {
  double longest = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e) longest = std::max(longest, edge_length(e));
  return longest;
}

bool Mesh::on_boundary(Point p) const {
  return std::abs(p.x - bounds_.xmin) <= kBoundaryTol || std::abs(p.x - bounds_.xmax) <= kBoundaryTol ||
         std::abs(p.y - bounds_.ymin) <= kBoundaryTol || std::abs(p.y - bounds_.ymax) <= kBoundaryTol;
}

PointLocation Mesh::locate(Point p) const {
  const double hx = bounds_.width() / nx_;
  const double hy = bounds_.height() / ny_;
  const double px = std::clamp(p.x, bounds_.xmin, bounds_.xmax);
  const double py = std::clamp(p.y, bounds_.ymin, bounds_.ymax);
  const int i = std::clamp(static_cast<int>(std::floor((px - bounds_.xmin) / hx)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((py - bounds_.ymin) / hy)), 0, ny_ - 1);
  // Local cell coordinates in [0,1]^2.
  const double s = std::clamp((px - (bounds_.xmin + i * hx)) / hx, 0.0, 1.0);
  const double t = std::clamp((py - (bounds_.ymin + j * hy)) / hy, 0.0, 1.0);

  PointLocation loc;
  const int cell = j * nx_ + i;
  if (s >= t) {
    // (v00, v10, v11): x = v00 + s e_x + t e_y
    loc.triangle = 2 * cell;
    loc.barycentric = {1.0 - s, s - t, t};
  } else {
    // (v00, v11, v01)
    loc.triangle = 2 * cell + 1;
    loc.barycentric = {1.0 - t, s, t - s};
  }
  return loc;
}

Mesh build_rect_mesh(int nx, int ny, const Rect& bounds) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("mesh cell counts must be positive (got nx=" + std::to_string(nx) +
                                ", ny=" + std::to_string(ny) + ")");
  }
  if (!(bounds.xmin < bounds.xmax) || !(bounds.ymin < bounds.ymax)) {
    throw std::invalid_argument("mesh bounds must satisfy xmin < xmax and ymin < ymax");
  }

  Mesh mesh;
  mesh.nx_ = nx;
  mesh.ny_ = ny;
  mesh.bounds_ = bounds;

  const double hx = bounds.width() / nx;
  const double hy = bounds.height() / ny;
  mesh.vertices_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Pin the last row/column to the exact bounds.
    const double y = (j == ny) ? bounds.ymax : bounds.ymin + j * hy;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? bounds.xmax : bounds.xmin + i * hx;
      mesh.vertices_.push_back({x, y});
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      mesh.triangles_.push_back({v00, v10, v11});
      mesh.triangles_.push_back({v00, v11, v01});
    }
  }

  std::map<std::pair<int, int>, int> edge_ids;
  std::vector<int> edge_use;
  mesh.triangle_edges_.resize(mesh.triangles_.size());
  for (std::size_t k = 0; k < mesh.triangles_.size(); ++k) {
    const auto& t = mesh.triangles_[k];
    for (int le = 0; le < 3; ++le) {
      const int a = t[le];
      const int b = t[(le + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, static_cast<int>(mesh.edges_.size()));
      if (inserted) {
        mesh.edges_.push_back({key.first, key.second});
        edge_use.push_back(0);
      }
      ++edge_use[it->second];
      mesh.triangle_edges_[k][le] = it->second;
    }
  }

  mesh.boundary_vertex_.resize(mesh.vertices_.size());
  for (std::size_t v = 0; v < mesh.vertices_.size(); ++v) {
    mesh.boundary_vertex_[v] = mesh.on_boundary(mesh.vertices_[v]);
  }
  mesh.boundary_edge_.resize(mesh.edges_.size());
  for (std::size_t e = 0; e < mesh.edges_.size(); ++e) mesh.boundary_edge_[e] = (edge_use[e] == 1);
  return mesh;
}

std::vector<Point> edge_midpoints(const Mesh& mesh) {
  std::vector<Point> mids;
  mids.reserve(mesh.edge_count());
  const auto& v = mesh.vertices();
  for (const auto& e : mesh.edges()) {
    mids.push_back({0.5 * (v[e[0]].x + v[e[1]].x), 0.5 * (v[e[0]].y + v[e[1]].y)});
  }
  return mids;
}

}  // namespace mns
