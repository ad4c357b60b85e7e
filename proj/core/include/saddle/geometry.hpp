#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace saddle {

struct StPoint {
  double s = 0.0, t = 0.0;
};

struct YzPoint {
  double y = 0.0, z = 0.0;
};

/// Block norms (|x^1|, |x^2|) of x in R^{2m}; throws DimensionMismatch on
/// odd-dimensional input.
StPoint st_coords(std::span<const double> x);
StPoint st_coords(std::span<const double> x, int m);

/// |s - t| / sqrt(2), the distance to the cone {s = t}.
double dist_to_cone(double s, double t);

/// Rotated coordinates y = (s+t)/sqrt2 (along the cone), z = (s-t)/sqrt2
/// (signed distance to the cone). Isometry of {s,t >= 0} onto {-y <= z <= y}.
YzPoint yz_coords(double s, double t);
/// Inverse map; throws DomainViolation if |z| > y.
StPoint st_from_yz(double y, double z);

enum class NodeClass : std::uint8_t { interior, cone, axis, arc };

/// Uniform lattice of spacing h over the closed sector {0 <= t <= s,
/// s^2 + t^2 <= R^2}, plus the first lattice layer outside the arc, which
/// carries the outer Dirichlet data. Corner priority: cone > arc > axis >
/// interior. Immutable after construction.
class TriangleGrid {
 public:
  struct Node {
    std::int32_t i, j;  // s = i h, t = j h
    NodeClass cls;
    bool inside;    // within the closed disc of radius R
    double weight;  // s^(m-1) t^(m-1) h^2
  };

  int m = 0;
  double R = 0.0, h = 0.0;
  int ni = 0;  // max lattice index along either axis
  std::vector<Node> nodes;

  int node_id(int i, int j) const {
    if (i < 0 || j < 0 || i > ni || j > ni) return -1;
    return index_[static_cast<std::size_t>(i) * (ni + 1) + j];
  }
  bool has_node(int i, int j) const { return node_id(i, j) >= 0; }
  double s_of(int i) const { return i * h; }
  double t_of(int j) const { return j * h; }
  /// Edge weight s^(m-1) t^(m-1) at an edge midpoint.
  double edge_weight(double s_mid, double t_mid) const;
  double node_density(int i, int j) const;  // s^(m-1) t^(m-1) at a node
  std::size_t interior_count() const { return interior_count_; }
  std::size_t inside_count() const { return inside_count_; }

  friend TriangleGrid build_grid(int m, double R, double h);

 private:
  std::vector<std::int32_t> index_;
  std::size_t interior_count_ = 0;
  std::size_t inside_count_ = 0;
};

/// Builds the sector lattice. Throws GridTooCoarse when fewer than 100
/// interior nodes result.
TriangleGrid build_grid(int m, double R, double h);

/// a_m = |S^{m-1}|^2, the factor relating sector (s,t) integrals to
/// integrals over R^{2m} for doubly block-radial integrands.
double sector_measure_constant(int m);

/// c_m = a_m 2^{-(m-1)}, the factor on wedge (y,z) integrals with weight
/// (y^2 - z^2)^{m-1}.
double wedge_measure_constant(int m);

}  // namespace saddle
