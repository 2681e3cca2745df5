#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swc/rng.hpp"
#include "swc/smallworld.hpp"
#include "swc/topology.hpp"

namespace swc {

/// A routing scheme (or caller) broke the engine's activation contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A scheme was asked to choose from an empty frontier.
class NoCandidate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeState : std::uint8_t { kInactive, kExposed, kInfected };

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// The exposed set. Supports O(log n) insertion and removal, rank queries in
/// node-index order, and (when a target is set) ordering by distance to it.
class Frontier {
 public:
  Frontier(const TorusGrid& grid, std::optional<NodeIndex> target);

  bool contains(NodeIndex v) const { return pos_[v] != kAbsent; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  void insert(NodeIndex v);
  void erase(NodeIndex v);

  /// The member with the given rank in ascending node-index order.
  NodeIndex nth(std::size_t rank) const;
  /// Members keyed by (distance to target, node index). Empty without target.
  const std::set<std::pair<int, NodeIndex>>& by_distance() const {
    return by_distance_;
  }
  /// Members in insertion-dependent order.
  std::span<const NodeIndex> members() const { return members_; }
  std::vector<NodeIndex> sorted() const;

 private:
  static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();

  TorusGrid grid_;
  std::optional<NodeIndex> target_;
  std::vector<NodeIndex> members_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint32_t> fenwick_;
  std::size_t fenwick_top_ = 1;
  std::set<std::pair<int, NodeIndex>> by_distance_;
};

/// Everything a decentralized scheme is allowed to observe at one step: the
/// activated nodes in activation order, their weak ties, the exposed set they
/// induce, the target and the geometry. Ties of non-activated nodes are not
/// reachable through this interface.
class DecentralizedView {
 public:
  struct Parts {
    const TorusGrid* grid = nullptr;
    int p = 1;
    int k = 1;
    Directedness directedness = Directedness::kDirected;
    NodeIndex target = 0;
    std::span<const NodeIndex> activated;
    std::span<const std::span<const NodeIndex>> ties_by_order;
    std::span<const std::uint32_t> order_of;
    const Frontier* exposed = nullptr;
    int step = 0;
  };

  explicit DecentralizedView(const Parts& parts) : parts_(parts) {}

  const TorusGrid& grid() const { return *parts_.grid; }
  int strong_radius() const { return parts_.p; }
  int threshold() const { return parts_.k; }
  Directedness directedness() const { return parts_.directedness; }
  NodeIndex target() const { return parts_.target; }
  /// Index of the step about to be taken (first routing step is 1).
  int step() const { return parts_.step; }

  std::span<const NodeIndex> activated() const { return parts_.activated; }
  bool is_activated(NodeIndex v) const;
  /// Weak-tie neighbors of an activated node; throws ContractViolation for a
  /// node that has not been activated.
  std::span<const NodeIndex> weak_ties(NodeIndex activated_node) const;
  const Frontier& exposed() const { return *parts_.exposed; }

 private:
  Parts parts_;
};

/// Decentralized node-selection rule. Implementations must be pure functions
/// of the view and the supplied RNG.
class RoutingScheme {
 public:
  virtual ~RoutingScheme() = default;
  virtual std::string_view name() const = 0;
  virtual bool randomized() const = 0;
  /// Returns min(m, |exposed|) distinct exposed nodes.
  virtual std::vector<NodeIndex> select(const DecentralizedView& view,
                                        std::size_t m, Rng& rng) const = 0;
};

/// Seeds: k consecutive nodes along row 0 starting at (0,0).
std::vector<NodeIndex> consecutive_seeds(const TorusGrid& grid, int k);
/// Target: the farthest node from (0,0), lowest row-major index on ties.
NodeIndex default_target(const TorusGrid& grid);

/// The propagation state machine over one network. Tracks labels, the
/// activated sequence, distinct infected in-neighbor counts and the exposed
/// frontier. Activations happen in simultaneous batches.
class Contagion {
 public:
  Contagion(const ModelParams& params,
            std::shared_ptr<const DistanceShells> shells, TieSource& ties,
            std::span<const NodeIndex> seeds,
            std::optional<NodeIndex> target = std::nullopt);

  const TorusGrid& grid() const { return shells_->grid(); }
  const ModelParams& params() const { return params_; }

  NodeState state(NodeIndex v) const {
    return static_cast<NodeState>(state_[v]);
  }
  std::span<const NodeIndex> activated() const { return activated_; }
  std::size_t infected_count() const { return activated_.size(); }
  bool all_infected() const { return activated_.size() == grid().size(); }
  const Frontier& exposed() const { return frontier_; }

  std::optional<NodeIndex> target() const { return target_; }
  bool target_infected() const {
    return target_ && state(*target_) == NodeState::kInfected;
  }
  /// min over activated and exposed nodes of the distance to the target;
  /// -1 when no target was given.
  int distance_to_target() const { return distance_; }
  int step() const { return step_; }

  /// Infects every node of `batch` at once, then reveals their ties and
  /// updates exposure. Each member must be currently exposed and appear once.
  void infect(std::span<const NodeIndex> batch);

  /// Requires a target.
  DecentralizedView view() const;

 private:
  void mark_infected(NodeIndex v);
  void spread_from(NodeIndex s, std::span<const NodeIndex> weak);
  void note_distance(NodeIndex v);

  ModelParams params_;
  std::shared_ptr<const DistanceShells> shells_;
  TieSource* ties_;
  std::optional<NodeIndex> target_;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint8_t> count_;
  std::vector<NodeIndex> activated_;
  std::vector<std::span<const NodeIndex>> revealed_;
  std::vector<std::uint32_t> order_of_;
  Frontier frontier_;
  int distance_ = -1;
  int step_ = 0;
  std::vector<NodeIndex> scratch_;
};

/// Exposed set for an activated set, computed directly from the definition:
/// non-activated nodes with at least k distinct activated neighbors, counting
/// strong ties both ways plus the given weak-tie lists of activated nodes.
std::vector<NodeIndex> exposed_set(
    const TorusGrid& grid, int p, int k, std::span<const NodeIndex> activated,
    const std::function<std::span<const NodeIndex>(NodeIndex)>& weak_ties_of);

enum class Outcome { kTargetReached, kAllInfected, kBudgetExhausted, kFrontierEmpty };

std::string_view to_string(Outcome outcome);
Outcome parse_outcome(std::string_view text);

struct TraceRecord {
  int step = 0;
  NodeId node;
  int distance = -1;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Step-by-step record of one run. Step 0 lists the seeds; every later step
/// lists the nodes activated in it (row-major within the step) together with
/// d_i, the distance from activated-or-exposed nodes to the target afterwards.
struct Trace {
  std::vector<TraceRecord> records;
  Outcome outcome = Outcome::kFrontierEmpty;
  /// Steps taken: the routing or diffusion time when the run completed.
  int steps = 0;

  bool completed() const {
    return outcome == Outcome::kTargetReached ||
           outcome == Outcome::kAllInfected;
  }
  friend bool operator==(const Trace&, const Trace&) = default;
};

/// "i row col d" per record followed by "outcome <name> <steps>".
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

/// Default step budget: 4n.
std::uint64_t default_budget(const ModelParams& params);

/// Complex diffusion: every exposed node is infected each step. Stops when the
/// target (if given) or every node is infected.
Trace run_diffusion(const Graph& graph, std::span<const NodeIndex> seeds,
                    std::optional<NodeIndex> target, std::uint64_t budget);

/// Called before each routing step with the view, the scheme RNG state the
/// scheme will start from, and the scheme's selection.
using RoutingObserver = std::function<void(
    const DecentralizedView&, const Rng&, std::span<const NodeIndex>)>;

struct RoutingSetup {
  std::vector<NodeIndex> seeds;
  NodeIndex target = 0;
  std::size_t m = 1;
  std::uint64_t budget = 0;
};

/// Complex routing on an arbitrary tie source: each step the scheme picks up
/// to m exposed nodes, which are infected simultaneously.
Trace run_routing(const ModelParams& params,
                  std::shared_ptr<const DistanceShells> shells,
                  TieSource& ties, const RoutingSetup& setup,
                  const RoutingScheme& scheme, Rng& scheme_rng,
                  const RoutingObserver& observer = {});

/// Standard routing run: consecutive seeds, farthest target, weak ties drawn
/// with graph seed derive_seed(seed, 0) (lazily for the directed model),
/// scheme randomness from derive_seed(seed, 1). budget 0 means 4n.
Trace run_routing(const ModelParams& params, const WeakTieSampler& sampler,
                  const RoutingScheme& scheme, std::size_t m,
                  std::uint64_t seed, std::uint64_t budget = 0);

/// Materialized copy of a DecentralizedView plus the scheme RNG state, with a
/// text form. rebuild() recomputes the exposed set from the captured data
/// alone, so replaying a scheme on it proves the scheme used nothing else.
class ViewSnapshot {
 public:
  static ViewSnapshot capture(const DecentralizedView& view, const Rng& rng);

  void write(std::ostream& out) const;
  static ViewSnapshot read(std::istream& in);

  /// Reconstructs a view; the snapshot must outlive it.
  DecentralizedView rebuild();
  Rng rng() const { return Rng(rng_state_); }

 private:
  int side_ = 2;
  int p_ = 1;
  int k_ = 1;
  Directedness directedness_ = Directedness::kDirected;
  NodeIndex target_ = 0;
  int step_ = 0;
  std::uint64_t rng_state_ = 0;
  std::vector<NodeIndex> activated_;
  std::vector<std::vector<NodeIndex>> ties_;

  std::optional<TorusGrid> grid_;
  std::vector<std::span<const NodeIndex>> tie_spans_;
  std::vector<std::uint32_t> order_of_;
  std::unique_ptr<Frontier> frontier_;
};

}  // namespace swc
