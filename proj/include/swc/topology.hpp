#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace swc {

using NodeIndex = std::uint32_t;

/// A lattice site. Coordinates are kept reduced modulo the side of the torus
/// that produced them.
struct NodeId {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(const NodeId&, const NodeId&) = default;
};

/// Row/column displacement, both components in [0, L).
struct Offset {
  int drow = 0;
  int dcol = 0;
};

/// The L x L wrap-around lattice with the Manhattan metric.
class TorusGrid {
 public:
  /// Throws std::invalid_argument when side < 2.
  explicit TorusGrid(int side);

  int side() const { return side_; }
  std::size_t size() const {
    return static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
  }

  /// Largest distance between two nodes: 2 * floor(L / 2).
  int max_distance() const { return 2 * (side_ / 2); }

  bool contains(NodeId u) const {
    return u.row >= 0 && u.row < side_ && u.col >= 0 && u.col < side_;
  }

  /// Wraps arbitrary integer coordinates onto the torus.
  NodeId wrap(int row, int col) const;

  NodeIndex index(NodeId u) const {
    return static_cast<NodeIndex>(u.row * side_ + u.col);
  }
  NodeId node(NodeIndex i) const {
    return {static_cast<int>(i) / side_, static_cast<int>(i) % side_};
  }

  int axis_distance(int a, int b) const {
    int d = a > b ? a - b : b - a;
    return d < side_ - d ? d : side_ - d;
  }

  int distance(NodeId u, NodeId v) const {
    return axis_distance(u.row, v.row) + axis_distance(u.col, v.col);
  }
  int distance(NodeIndex u, NodeIndex v) const {
    return distance(node(u), node(v));
  }

  NodeIndex shifted(NodeIndex u, Offset off) const;

  /// Number of nodes at distance d from any fixed node. Throws
  /// std::domain_error unless 1 <= d <= max_distance().
  std::size_t count_at_distance(int d) const;

  /// Nodes at distance d from u, ordered row-major on the offset (v - u) mod L.
  std::vector<NodeId> nodes_at_distance(NodeId u, int d) const;

  /// The farthest node from `from`; ties go to the lowest row-major index.
  NodeId farthest_from(NodeId from) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  void check_distance(int d) const;

  int side_;
};

/// Every non-zero offset of the torus grouped into distance shells, each shell
/// in canonical row-major order. Built once per side and shared read-only.
class DistanceShells {
 public:
  explicit DistanceShells(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  int max_distance() const { return grid_.max_distance(); }

  std::size_t count(int d) const { return start_[d + 1] - start_[d]; }
  std::span<const Offset> shell(int d) const {
    return {offsets_.data() + start_[d], count(d)};
  }
  /// All offsets with 1 <= distance <= radius, shell by shell.
  std::span<const Offset> ball(int radius) const;

 private:
  TorusGrid grid_;
  std::vector<Offset> offsets_;
  // start_[d] is the position of shell d in offsets_; shell 0 is empty.
  std::vector<std::size_t> start_;
};

}  // namespace swc
