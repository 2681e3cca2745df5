#pragma once

#include <memory>
#include <vector>

#include "oracle.hpp"
#include "swc/contagion.hpp"
#include "swc/smallworld.hpp"

namespace swc::testing {

inline oracle::Network to_oracle(const Graph& g) {
  oracle::Network net{g.params().side, g.params().p, g.params().k,
                      g.params().directedness == Directedness::kDirected, {}};
  for (NodeIndex u = 0; u < g.grid().size(); ++u) {
    const auto ties = g.drawn_ties(u);
    net.out.emplace_back(ties.begin(), ties.end());
  }
  return net;
}

inline std::vector<int> to_ints(std::span<const NodeIndex> nodes) {
  return {nodes.begin(), nodes.end()};
}

inline std::shared_ptr<const DistanceShells> shells_for(const Graph& g) {
  return std::make_shared<const DistanceShells>(g.grid());
}

}  // namespace swc::testing
