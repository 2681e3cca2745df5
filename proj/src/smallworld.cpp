#include "swc/smallworld.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace swc {

std::string_view to_string(Directedness d) {
  return d == Directedness::kDirected ? "directed" : "undirected";
}

Directedness parse_directedness(std::string_view text) {
  if (text == "directed") return Directedness::kDirected;
  if (text == "undirected") return Directedness::kUndirected;
  throw std::invalid_argument("directedness must be 'directed' or "
                              "'undirected', got '" + std::string(text) + "'");
}

void ModelParams::validate() const {
  if (side < 2) throw std::invalid_argument("side: must be >= 2");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha: must be a finite value >= 0");
  }
  if (p < 1) throw std::invalid_argument("p: strong-tie radius must be >= 1");
  if (q < 0) throw std::invalid_argument("q: weak ties per node must be >= 0");
  if (k < 1) throw std::invalid_argument("k: threshold must be >= 1");
}

double normalizing_constant(const TorusGrid& grid, double alpha) {
  double sum = 0.0;
  for (int d = 1; d <= grid.max_distance(); ++d) {
    sum += static_cast<double>(grid.count_at_distance(d)) *
           std::pow(static_cast<double>(d), -alpha);
  }
  return 1.0 / sum;
}

WeakTieSampler::WeakTieSampler(std::shared_ptr<const DistanceShells> shells,
                               double alpha)
    : shells_(std::move(shells)), alpha_(alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha: must be a finite value >= 0");
  }
  const int dmax = shells_->max_distance();
  cumulative_.assign(static_cast<std::size_t>(dmax) + 1, 0.0);
  double sum = 0.0;
  for (int d = 1; d <= dmax; ++d) {
    sum += static_cast<double>(shells_->count(d)) *
           std::pow(static_cast<double>(d), -alpha);
    cumulative_[d] = sum;
  }
  z_ = 1.0 / sum;
}

WeakTieSampler::WeakTieSampler(const TorusGrid& grid, double alpha)
    : WeakTieSampler(std::make_shared<const DistanceShells>(grid), alpha) {}

double WeakTieSampler::node_probability(int d) const {
  return z_ * std::pow(static_cast<double>(d), -alpha_);
}

double WeakTieSampler::cdf_increment(int d) const {
  return (cumulative_[d] - cumulative_[d - 1]) * z_;
}

NodeIndex WeakTieSampler::sample(NodeIndex u, Rng& rng) const {
  const double total = cumulative_.back();
  const double r = rng.uniform01() * total;
  auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  const int d = static_cast<int>(it - cumulative_.begin());
  const auto shell = shells_->shell(d);
  const Offset off = shell[rng.below(shell.size())];
  return shells_->grid().shifted(u, off);
}

void draw_weak_ties(const WeakTieSampler& sampler, std::uint64_t seed,
                    NodeIndex u, int q, std::span<NodeIndex> out) {
  Rng rng(seed, u);
  for (int j = 0; j < q; ++j) out[j] = sampler.sample(u, rng);
}

Graph::Graph(ModelParams params, std::uint64_t seed,
             std::vector<NodeIndex> ties)
    : params_(params), grid_(params.side), seed_(seed), ties_(std::move(ties)) {
  params_.validate();
  const std::size_t n = grid_.size();
  if (ties_.size() != n * static_cast<std::size_t>(params_.q)) {
    throw std::invalid_argument("graph: expected q ties per node");
  }
  for (std::size_t i = 0; i < ties_.size(); ++i) {
    if (ties_[i] >= n) throw std::invalid_argument("graph: tie out of range");
    if (ties_[i] == i / static_cast<std::size_t>(params_.q)) {
      throw std::invalid_argument("graph: self-loop weak tie");
    }
  }
  if (params_.directedness == Directedness::kUndirected) {
    incident_start_.assign(n + 1, 0);
    const auto q = static_cast<std::size_t>(params_.q);
    for (std::size_t i = 0; i < ties_.size(); ++i) {
      ++incident_start_[i / q + 1];
      ++incident_start_[ties_[i] + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
      incident_start_[v + 1] += incident_start_[v];
    }
    incident_.resize(incident_start_[n]);
    std::vector<std::size_t> fill(incident_start_.begin(),
                                  incident_start_.end() - 1);
    for (std::size_t i = 0; i < ties_.size(); ++i) {
      const auto src = static_cast<NodeIndex>(i / q);
      incident_[fill[src]++] = ties_[i];
      incident_[fill[ties_[i]]++] = src;
    }
  }
}

std::span<const NodeIndex> Graph::drawn_ties(NodeIndex u) const {
  const auto q = static_cast<std::size_t>(params_.q);
  return {ties_.data() + u * q, q};
}

std::span<const NodeIndex> Graph::weak_neighbors(NodeIndex u) const {
  if (params_.directedness == Directedness::kDirected) return drawn_ties(u);
  return {incident_.data() + incident_start_[u],
          incident_start_[u + 1] - incident_start_[u]};
}

Graph generate_graph(const ModelParams& params, std::uint64_t seed,
                     const WeakTieSampler& sampler) {
  params.validate();
  if (sampler.grid().side() != params.side || sampler.alpha() != params.alpha) {
    throw std::invalid_argument("sampler does not match model parameters");
  }
  const std::size_t n = params.node_count();
  const auto q = static_cast<std::size_t>(params.q);
  std::vector<NodeIndex> ties(n * q);
  for (std::size_t u = 0; u < n; ++u) {
    draw_weak_ties(sampler, seed, static_cast<NodeIndex>(u), params.q,
                   std::span<NodeIndex>(ties.data() + u * q, q));
  }
  return Graph(params, seed, std::move(ties));
}

Graph generate_graph(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  return generate_graph(params, seed,
                        WeakTieSampler(TorusGrid(params.side), params.alpha));
}

LazyGraph::LazyGraph(const ModelParams& params, std::uint64_t seed,
                     std::shared_ptr<const WeakTieSampler> sampler)
    : params_(params), seed_(seed), sampler_(std::move(sampler)) {
  params_.validate();
  if (params_.directedness != Directedness::kDirected) {
    throw std::invalid_argument(
        "lazy revelation requires the directed model");
  }
  if (!sampler_ || sampler_->grid().side() != params_.side ||
      sampler_->alpha() != params_.alpha) {
    throw std::invalid_argument("sampler does not match model parameters");
  }
  const std::size_t n = params_.node_count();
  ties_.resize(n * static_cast<std::size_t>(params_.q));
  revealed_.assign(n, 0);
}

std::span<const NodeIndex> LazyGraph::reveal(NodeIndex u) {
  const auto q = static_cast<std::size_t>(params_.q);
  std::span<NodeIndex> slot(ties_.data() + u * q, q);
  if (!revealed_[u]) {
    draw_weak_ties(*sampler_, seed_, u, params_.q, slot);
    revealed_[u] = 1;
    ++revealed_count_;
  }
  return slot;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void write_graph(std::ostream& out, const Graph& graph) {
  const ModelParams& p = graph.params();
  out << p.side << ' ' << format_double(p.alpha) << ' ' << p.p << ' ' << p.q
      << ' ' << p.k << ' ' << to_string(p.directedness) << ' ' << graph.seed()
      << '\n';
  const TorusGrid& grid = graph.grid();
  for (std::size_t u = 0; u < grid.size(); ++u) {
    const NodeId src = grid.node(static_cast<NodeIndex>(u));
    for (NodeIndex v : graph.drawn_ties(static_cast<NodeIndex>(u))) {
      const NodeId dst = grid.node(v);
      out << src.row << ' ' << src.col << ' ' << dst.row << ' ' << dst.col
          << '\n';
    }
  }
}

namespace {

template <typename T>
T parse_number(std::string_view token, const char* what) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::runtime_error(std::string("graph file: bad ") + what + " '" +
                             std::string(token) + "'");
  }
  return value;
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("graph file: empty");
  std::istringstream header(line);
  std::string side, alpha, p, q, k, dir, seed;
  if (!(header >> side >> alpha >> p >> q >> k >> dir >> seed)) {
    throw std::runtime_error("graph file: malformed header");
  }
  ModelParams params;
  params.side = parse_number<int>(side, "L");
  params.alpha = parse_number<double>(alpha, "alpha");
  params.p = parse_number<int>(p, "p");
  params.q = parse_number<int>(q, "q");
  params.k = parse_number<int>(k, "k");
  try {
    params.directedness = parse_directedness(dir);
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("graph file: ") + e.what());
  }
  const auto seed_value = parse_number<std::uint64_t>(seed, "seed");

  const TorusGrid grid(params.side);
  const auto q_count = static_cast<std::size_t>(params.q);
  std::vector<NodeIndex> ties;
  ties.reserve(grid.size() * q_count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    int sr, sc, dr, dc;
    if (!(fields >> sr >> sc >> dr >> dc)) {
      throw std::runtime_error("graph file: malformed tie line '" + line + "'");
    }
    const NodeId src{sr, sc};
    const NodeId dst{dr, dc};
    if (!grid.contains(src) || !grid.contains(dst)) {
      throw std::runtime_error("graph file: coordinate out of range");
    }
    // Ties must appear grouped by source in row-major order, q per source.
    if (grid.index(src) != ties.size() / std::max<std::size_t>(q_count, 1)) {
      throw std::runtime_error("graph file: ties out of order at '" + line +
                               "'");
    }
    ties.push_back(grid.index(dst));
  }
  if (ties.size() != grid.size() * q_count) {
    throw std::runtime_error("graph file: expected " +
                             std::to_string(grid.size() * q_count) +
                             " ties, found " + std::to_string(ties.size()));
  }
  try {
    return Graph(params, seed_value, std::move(ties));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("graph file: ") + e.what());
  }
}

}  // namespace swc
