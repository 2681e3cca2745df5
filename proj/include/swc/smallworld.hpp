#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swc/rng.hpp"
#include "swc/topology.hpp"

namespace swc {

enum class Directedness { kDirected, kUndirected };

std::string_view to_string(Directedness d);
/// Accepts "directed" or "undirected"; throws std::invalid_argument otherwise.
Directedness parse_directedness(std::string_view text);

/// One random-network ensemble: side L (n = L^2), exponent alpha, strong-tie
/// radius p, weak ties per node q, contagion threshold k.
struct ModelParams {
  int side = 8;
  double alpha = 2.0;
  int p = 2;
  int q = 2;
  int k = 2;
  Directedness directedness = Directedness::kDirected;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// p = q = k, the configuration under which routing always terminates.
  bool canonical() const { return p == q && q == k; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Z = 1 / sum_{v != u} |uv|^-alpha, accumulated shell by shell in increasing
/// distance order.
double normalizing_constant(const TorusGrid& grid, double alpha);

/// Exact weak-tie endpoint sampler: inverse CDF over distance shells followed
/// by a uniform pick inside the chosen shell. P(v) = Z * |uv|^-alpha.
class WeakTieSampler {
 public:
  WeakTieSampler(std::shared_ptr<const DistanceShells> shells, double alpha);
  WeakTieSampler(const TorusGrid& grid, double alpha);

  const TorusGrid& grid() const { return shells_->grid(); }
  const DistanceShells& shells() const { return *shells_; }
  double alpha() const { return alpha_; }
  double z() const { return z_; }

  /// Probability that a single draw lands on one particular node at distance d.
  double node_probability(int d) const;
  /// Probability mass of the whole shell at distance d, as the sampler's CDF
  /// sees it (difference of consecutive cumulative values).
  double cdf_increment(int d) const;
  /// cumulative()[d] = sum over shells 1..d of count(d') * d'^-alpha.
  std::span<const double> cumulative() const { return cumulative_; }

  NodeIndex sample(NodeIndex u, Rng& rng) const;

 private:
  std::shared_ptr<const DistanceShells> shells_;
  double alpha_;
  double z_;
  std::vector<double> cumulative_;
};

/// Draws the q weak ties of node u from its private stream (seed, u). Eager
/// and lazy generation both go through here, so a given seed yields the same
/// ties regardless of the order in which nodes are materialized.
void draw_weak_ties(const WeakTieSampler& sampler, std::uint64_t seed,
                    NodeIndex u, int q, std::span<NodeIndex> out);

/// Anything a propagation run can ask for the weak-tie neighbors of a node
/// at the moment it becomes infected.
class TieSource {
 public:
  virtual ~TieSource() = default;
  virtual Directedness directedness() const = 0;
  /// Weak-tie neighbors that u's infection counts toward: out-endpoints in the
  /// directed model, all incident weak edges in the undirected one. May repeat.
  virtual std::span<const NodeIndex> reveal(NodeIndex u) = 0;
};

/// A fully materialized network. Strong ties are implicit in params.p.
class Graph {
 public:
  Graph(ModelParams params, std::uint64_t seed, std::vector<NodeIndex> ties);

  const ModelParams& params() const { return params_; }
  const TorusGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t weak_tie_count() const { return ties_.size(); }
  /// The q draws initiated by u, in draw order.
  std::span<const NodeIndex> drawn_ties(NodeIndex u) const;
  /// Weak neighbors used for exposure (out-endpoints or incident edges).
  std::span<const NodeIndex> weak_neighbors(NodeIndex u) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.params_ == b.params_ && a.seed_ == b.seed_ && a.ties_ == b.ties_;
  }

 private:
  ModelParams params_;
  TorusGrid grid_;
  std::uint64_t seed_;
  std::vector<NodeIndex> ties_;
  // Undirected mode only: CSR adjacency over all weak edges.
  std::vector<std::size_t> incident_start_;
  std::vector<NodeIndex> incident_;
};

Graph generate_graph(const ModelParams& params, std::uint64_t seed);
Graph generate_graph(const ModelParams& params, std::uint64_t seed,
                     const WeakTieSampler& sampler);

/// TieSource view over an eagerly generated graph.
class EagerTies final : public TieSource {
 public:
  explicit EagerTies(const Graph& graph) : graph_(&graph) {}
  Directedness directedness() const override {
    return graph_->params().directedness;
  }
  std::span<const NodeIndex> reveal(NodeIndex u) override {
    return graph_->weak_neighbors(u);
  }

 private:
  const Graph* graph_;
};

/// Deferred-decision network: a node's weak ties are drawn the first time it
/// is revealed and cached afterwards. Directed model only, since undirected
/// exposure depends on ties initiated by nodes that were never revealed.
class LazyGraph final : public TieSource {
 public:
  LazyGraph(const ModelParams& params, std::uint64_t seed,
            std::shared_ptr<const WeakTieSampler> sampler);

  Directedness directedness() const override {
    return Directedness::kDirected;
  }
  std::span<const NodeIndex> reveal(NodeIndex u) override;

  bool revealed(NodeIndex u) const { return revealed_[u] != 0; }
  std::size_t revealed_count() const { return revealed_count_; }
  const ModelParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ModelParams params_;
  std::uint64_t seed_;
  std::shared_ptr<const WeakTieSampler> sampler_;
  std::vector<NodeIndex> ties_;
  std::vector<std::uint8_t> revealed_;
  std::size_t revealed_count_ = 0;
};

/// Text edge list. Header "L alpha p q k directedness seed", then one
/// "src_row src_col dst_row dst_col" line per weak tie in draw order.
void write_graph(std::ostream& out, const Graph& graph);
/// Throws std::runtime_error on malformed input.
Graph read_graph(std::istream& in);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace swc
