#include "swc/schemes.hpp"

#include <algorithm>
#include <stdexcept>

namespace swc {

std::vector<NodeIndex> greedy_select(const DecentralizedView& view,
                                     std::size_t m) {
  const Frontier& frontier = view.exposed();
  if (frontier.empty()) throw NoCandidate("greedy: empty frontier");
  std::vector<NodeIndex> out;
  const std::size_t want = std::min(m, frontier.size());
  out.reserve(want);
  for (const auto& [distance, node] : frontier.by_distance()) {
    if (out.size() == want) break;
    out.push_back(node);
  }
  return out;
}

std::vector<NodeIndex> random_select(const DecentralizedView& view,
                                     std::size_t m, Rng& rng) {
  const Frontier& frontier = view.exposed();
  if (frontier.empty()) throw NoCandidate("random: empty frontier");
  const std::size_t size = frontier.size();
  if (m >= size) return frontier.sorted();
  // Floyd's sampling of m distinct ranks out of [0, size).
  std::vector<std::size_t> ranks;
  ranks.reserve(m);
  for (std::size_t j = size - m; j < size; ++j) {
    const std::size_t r = rng.below(j + 1);
    if (std::find(ranks.begin(), ranks.end(), r) == ranks.end()) {
      ranks.push_back(r);
    } else {
      ranks.push_back(j);
    }
  }
  std::sort(ranks.begin(), ranks.end());
  std::vector<NodeIndex> out;
  out.reserve(m);
  for (std::size_t r : ranks) out.push_back(frontier.nth(r));
  return out;
}

std::vector<NodeIndex> activate_all_select(const DecentralizedView& view) {
  return view.exposed().sorted();
}

std::vector<std::string> scheme_names() {
  return {"greedy", "random", "activate-all"};
}

SchemeDescriptor describe_scheme(std::string_view name) {
  if (name == "greedy") return {"greedy", SchemeKind::kDeterministic, {}};
  if (name == "random") {
    return {"random",
            SchemeKind::kRandomized,
            {{"rng_draws_per_step", "min(m, |frontier|), 0 if m >= |frontier|"}}};
  }
  if (name == "activate-all") {
    return {"activate-all", SchemeKind::kDeterministic, {}};
  }
  throw std::invalid_argument("scheme: unknown name '" + std::string(name) +
                              "'");
}

std::unique_ptr<RoutingScheme> make_scheme(const SchemeDescriptor& descriptor) {
  if (descriptor.name == "greedy") return std::make_unique<GreedyScheme>();
  if (descriptor.name == "random") return std::make_unique<RandomScheme>();
  if (descriptor.name == "activate-all") {
    return std::make_unique<ActivateAllScheme>();
  }
  throw std::invalid_argument("scheme: unknown name '" + descriptor.name + "'");
}

std::unique_ptr<RoutingScheme> make_scheme(std::string_view name) {
  return make_scheme(describe_scheme(name));
}

}  // namespace swc
