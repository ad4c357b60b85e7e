#pragma once

#include <memory>
#include <vector>

#include "saddle/geometry.hpp"

namespace saddle {

/// Nodal values on the sector grid. The minimization keeps cone and arc
/// nodes at their Dirichlet data and every value in [0, M].
struct Field {
  std::shared_ptr<const TriangleGrid> grid;
  std::vector<double> values;  // one per grid node

  double at(int i, int j) const {
    const int id = grid->node_id(i, j);
    return id >= 0 ? values[id] : 0.0;
  }
};

Field zero_field(std::shared_ptr<const TriangleGrid> grid);

/// Odd extension of a sector field to the full quarter-plane square:
/// u(t, s) = -u(s, t), vanishing exactly on the diagonal.
class SaddleField {
 public:
  SaddleField(std::shared_ptr<const TriangleGrid> grid, std::vector<double> sector_values);

  const TriangleGrid& grid() const { return *grid_; }
  std::shared_ptr<const TriangleGrid> grid_ptr() const { return grid_; }

  bool has(int i, int j) const { return full_id(i, j) >= 0; }
  double at(int i, int j) const {
    const int id = full_id(i, j);
    return id >= 0 ? values_[id] : 0.0;
  }
  NodeClass cls(int i, int j) const;
  bool inside(int i, int j) const;

  int full_id(int i, int j) const {
    const int ni = grid_->ni;
    if (i < 0 || j < 0 || i > ni || j > ni) return -1;
    return index_[static_cast<std::size_t>(i) * (ni + 1) + j];
  }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::pair<int, int> ij_of(int full_node) const { return ij_[full_node]; }

  /// Bilinear interpolation at (s, t); zero outside the covered square.
  double interp(double s, double t) const;

  double sup_norm() const;

 private:
  std::shared_ptr<const TriangleGrid> grid_;
  std::vector<std::int32_t> index_;  // (ni+1)^2 lattice -> full node id
  std::vector<std::pair<int, int>> ij_;
  std::vector<double> values_;
};

}  // namespace saddle
