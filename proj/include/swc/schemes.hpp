#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "swc/contagion.hpp"

namespace swc {

enum class SchemeKind { kDeterministic, kRandomized };

/// Names a scheme plus its parameters. `name` resolves through make_scheme.
struct SchemeDescriptor {
  std::string name;
  SchemeKind kind = SchemeKind::kDeterministic;
  std::map<std::string, std::string> parameters;
};

/// The m exposed nodes closest to the target; ties go to the lower row-major
/// index. Throws NoCandidate on an empty frontier.
std::vector<NodeIndex> greedy_select(const DecentralizedView& view,
                                     std::size_t m);

/// Uniform sample of min(m, |frontier|) exposed nodes without replacement.
/// Consumes one bounded draw per selected node (Floyd's algorithm over ranks
/// in node-index order) and nothing when the whole frontier is taken.
std::vector<NodeIndex> random_select(const DecentralizedView& view,
                                     std::size_t m, Rng& rng);

/// The whole frontier in node-index order.
std::vector<NodeIndex> activate_all_select(const DecentralizedView& view);

class GreedyScheme final : public RoutingScheme {
 public:
  std::string_view name() const override { return "greedy"; }
  bool randomized() const override { return false; }
  std::vector<NodeIndex> select(const DecentralizedView& view, std::size_t m,
                                Rng&) const override {
    return greedy_select(view, m);
  }
};

class RandomScheme final : public RoutingScheme {
 public:
  std::string_view name() const override { return "random"; }
  bool randomized() const override { return true; }
  std::vector<NodeIndex> select(const DecentralizedView& view, std::size_t m,
                                Rng& rng) const override {
    return random_select(view, m, rng);
  }
};

/// Realizes diffusion inside the routing engine when paired with unbounded m.
class ActivateAllScheme final : public RoutingScheme {
 public:
  std::string_view name() const override { return "activate-all"; }
  bool randomized() const override { return false; }
  std::vector<NodeIndex> select(const DecentralizedView& view, std::size_t,
                                Rng&) const override {
    return activate_all_select(view);
  }
};

std::vector<std::string> scheme_names();
SchemeDescriptor describe_scheme(std::string_view name);
/// Throws std::invalid_argument for an unknown name.
std::unique_ptr<RoutingScheme> make_scheme(const SchemeDescriptor& descriptor);
std::unique_ptr<RoutingScheme> make_scheme(std::string_view name);

}  // namespace swc
