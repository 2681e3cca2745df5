#include "swc/topology.hpp"

#include <stdexcept>
#include <string>

namespace swc {

TorusGrid::TorusGrid(int side) : side_(side) {
  if (side < 2) {
    throw std::invalid_argument("torus side must be at least 2, got " +
                                std::to_string(side));
  }
}

NodeId TorusGrid::wrap(int row, int col) const {
  row %= side_;
  col %= side_;
  if (row < 0) row += side_;
  if (col < 0) col += side_;
  return {row, col};
}

NodeIndex TorusGrid::shifted(NodeIndex u, Offset off) const {
  const NodeId base = node(u);
  int row = base.row + off.drow;
  int col = base.col + off.dcol;
  if (row >= side_) row -= side_;
  if (col >= side_) col -= side_;
  return static_cast<NodeIndex>(row * side_ + col);
}

void TorusGrid::check_distance(int d) const {
  if (d < 1 || d > max_distance()) {
    throw std::domain_error("distance " + std::to_string(d) +
                            " outside [1, " + std::to_string(max_distance()) +
                            "] for side " + std::to_string(side_));
  }
}

std::size_t TorusGrid::count_at_distance(int d) const {
  check_distance(d);
  // Number of offsets along one axis with wrapped length a.
  const int half = side_ / 2;
  auto axis_count = [&](int a) -> std::size_t {
    if (a == 0) return 1;
    if (side_ % 2 == 0 && a == half) return 1;
    return 2;
  };
  std::size_t total = 0;
  for (int a = 0; a <= half; ++a) {
    const int b = d - a;
    if (b < 0 || b > half) continue;
    total += axis_count(a) * axis_count(b);
  }
  return total;
}

std::vector<NodeId> TorusGrid::nodes_at_distance(NodeId u, int d) const {
  check_distance(d);
  std::vector<NodeId> out;
  out.reserve(count_at_distance(d));
  for (int dr = 0; dr < side_; ++dr) {
    const int row_part = axis_distance(0, dr);
    if (row_part > d) continue;
    for (int dc = 0; dc < side_; ++dc) {
      if (row_part + axis_distance(0, dc) == d) {
        out.push_back(wrap(u.row + dr, u.col + dc));
      }
    }
  }
  return out;
}

NodeId TorusGrid::farthest_from(NodeId from) const {
  const int target = max_distance();
  for (int row = 0; row < side_; ++row) {
    for (int col = 0; col < side_; ++col) {
      if (distance(from, NodeId{row, col}) == target) return {row, col};
    }
  }
  return from;  // unreachable for side >= 2
}

DistanceShells::DistanceShells(const TorusGrid& grid) : grid_(grid) {
  const int side = grid.side();
  const int dmax = grid.max_distance();
  start_.assign(static_cast<std::size_t>(dmax) + 2, 0);
  for (int d = 1; d <= dmax; ++d) {
    start_[d + 1] = start_[d] + grid.count_at_distance(d);
  }
  offsets_.resize(start_[dmax + 1]);
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (int dr = 0; dr < side; ++dr) {
    for (int dc = 0; dc < side; ++dc) {
      const int d = grid.axis_distance(0, dr) + grid.axis_distance(0, dc);
      if (d == 0) continue;
      offsets_[fill[d]++] = Offset{dr, dc};
    }
  }
}

std::span<const Offset> DistanceShells::ball(int radius) const {
  if (radius < 0) radius = 0;
  if (radius > max_distance()) radius = max_distance();
  return {offsets_.data(), start_[radius + 1]};
}

}  // namespace swc
