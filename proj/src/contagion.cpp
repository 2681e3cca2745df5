#include "swc/contagion.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace swc {

Frontier::Frontier(const TorusGrid& grid, std::optional<NodeIndex> target)
    : grid_(grid), target_(target), pos_(grid.size(), kAbsent),
      fenwick_(grid.size() + 1, 0) {
  while (fenwick_top_ * 2 <= grid.size()) fenwick_top_ *= 2;
}

void Frontier::insert(NodeIndex v) {
  if (contains(v)) return;
  pos_[v] = static_cast<std::uint32_t>(members_.size());
  members_.push_back(v);
  for (std::size_t i = v + 1; i < fenwick_.size(); i += i & (~i + 1)) {
    ++fenwick_[i];
  }
  if (target_) by_distance_.emplace(grid_.distance(v, *target_), v);
}

void Frontier::erase(NodeIndex v) {
  if (!contains(v)) return;
  const std::uint32_t slot = pos_[v];
  const NodeIndex last = members_.back();
  members_[slot] = last;
  pos_[last] = slot;
  members_.pop_back();
  pos_[v] = kAbsent;
  for (std::size_t i = v + 1; i < fenwick_.size(); i += i & (~i + 1)) {
    --fenwick_[i];
  }
  if (target_) by_distance_.erase({grid_.distance(v, *target_), v});
}

NodeIndex Frontier::nth(std::size_t rank) const {
  if (rank >= size()) throw std::out_of_range("frontier rank out of range");
  // Largest position whose prefix count is <= rank; the answer follows it.
  std::size_t pos = 0;
  std::size_t remaining = rank;
  for (std::size_t step = fenwick_top_; step > 0; step /= 2) {
    const std::size_t next = pos + step;
    if (next < fenwick_.size() && fenwick_[next] <= remaining) {
      pos = next;
      remaining -= fenwick_[next];
    }
  }
  return static_cast<NodeIndex>(pos);
}

std::vector<NodeIndex> Frontier::sorted() const {
  std::vector<NodeIndex> out(members_.begin(), members_.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool DecentralizedView::is_activated(NodeIndex v) const {
  return v < parts_.order_of.size() &&
         parts_.order_of[v] != std::numeric_limits<std::uint32_t>::max();
}

std::span<const NodeIndex> DecentralizedView::weak_ties(
    NodeIndex activated_node) const {
  if (!is_activated(activated_node)) {
    throw ContractViolation("weak ties of a non-activated node are not "
                            "visible to a decentralized scheme");
  }
  return parts_.ties_by_order[parts_.order_of[activated_node]];
}

std::vector<NodeIndex> consecutive_seeds(const TorusGrid& grid, int k) {
  if (k < 1 || k > grid.side()) {
    throw std::invalid_argument("k: consecutive seeds need 1 <= k <= L");
  }
  std::vector<NodeIndex> seeds;
  for (int c = 0; c < k; ++c) seeds.push_back(grid.index({0, c}));
  return seeds;
}

NodeIndex default_target(const TorusGrid& grid) {
  return grid.index(grid.farthest_from({0, 0}));
}

Contagion::Contagion(const ModelParams& params,
                     std::shared_ptr<const DistanceShells> shells,
                     TieSource& ties, std::span<const NodeIndex> seeds,
                     std::optional<NodeIndex> target)
    : params_(params),
      shells_(std::move(shells)),
      ties_(&ties),
      target_(target),
      frontier_(shells_->grid(), target) {
  params_.validate();
  if (params_.k > 255) throw std::invalid_argument("k: must be <= 255");
  if (shells_->grid().side() != params_.side) {
    throw std::invalid_argument("distance shells do not match side");
  }
  if (ties.directedness() != params_.directedness) {
    throw std::invalid_argument("tie source directedness mismatch");
  }
  const std::size_t n = grid().size();
  if (target_ && *target_ >= n) throw std::invalid_argument("target out of range");
  if (seeds.empty()) throw std::invalid_argument("seeds: need at least one");
  state_.assign(n, static_cast<std::uint8_t>(NodeState::kInactive));
  count_.assign(n, 0);
  order_of_.assign(n, std::numeric_limits<std::uint32_t>::max());
  for (NodeIndex s : seeds) {
    if (s >= n) throw std::invalid_argument("seeds: node out of range");
    if (state(s) == NodeState::kInfected) {
      throw std::invalid_argument("seeds: duplicate node");
    }
    mark_infected(s);
  }
  for (std::size_t i = 0; i < activated_.size(); ++i) {
    revealed_[i] = ties_->reveal(activated_[i]);
    spread_from(activated_[i], revealed_[i]);
  }
}

void Contagion::note_distance(NodeIndex v) {
  if (!target_) return;
  const int d = grid().distance(v, *target_);
  if (distance_ < 0 || d < distance_) distance_ = d;
}

void Contagion::mark_infected(NodeIndex v) {
  if (state(v) == NodeState::kExposed) frontier_.erase(v);
  state_[v] = static_cast<std::uint8_t>(NodeState::kInfected);
  order_of_[v] = static_cast<std::uint32_t>(activated_.size());
  activated_.push_back(v);
  revealed_.emplace_back();
  note_distance(v);
}

void Contagion::spread_from(NodeIndex s, std::span<const NodeIndex> weak) {
  const TorusGrid& g = grid();
  const auto k = static_cast<std::uint8_t>(params_.k);
  auto bump = [&](NodeIndex v) {
    if (state(v) == NodeState::kInfected) return;
    if (count_[v] < k) ++count_[v];
    if (count_[v] == k && state(v) == NodeState::kInactive) {
      state_[v] = static_cast<std::uint8_t>(NodeState::kExposed);
      frontier_.insert(v);
      note_distance(v);
    }
  };
  for (const Offset off : shells_->ball(params_.p)) bump(g.shifted(s, off));
  // Each distinct neighbor counts once: skip weak endpoints already covered by
  // a strong tie and repeated endpoints.
  scratch_.clear();
  for (NodeIndex w : weak) {
    if (w == s || g.distance(s, w) <= params_.p) continue;
    if (std::find(scratch_.begin(), scratch_.end(), w) != scratch_.end()) continue;
    scratch_.push_back(w);
    bump(w);
  }
}

void Contagion::infect(std::span<const NodeIndex> batch) {
  std::vector<NodeIndex> check(batch.begin(), batch.end());
  std::sort(check.begin(), check.end());
  if (std::adjacent_find(check.begin(), check.end()) != check.end()) {
    throw ContractViolation("activation batch repeats a node");
  }
  for (NodeIndex v : check) {
    if (v >= grid().size() || state(v) != NodeState::kExposed) {
      throw ContractViolation("node " + std::to_string(v) +
                              " activated while not exposed");
    }
  }
  const std::size_t first = activated_.size();
  for (NodeIndex v : batch) mark_infected(v);
  for (std::size_t i = first; i < activated_.size(); ++i) {
    revealed_[i] = ties_->reveal(activated_[i]);
    spread_from(activated_[i], revealed_[i]);
  }
  ++step_;
}

DecentralizedView Contagion::view() const {
  if (!target_) throw std::logic_error("decentralized view needs a target");
  DecentralizedView::Parts parts;
  parts.grid = &shells_->grid();
  parts.p = params_.p;
  parts.k = params_.k;
  parts.directedness = params_.directedness;
  parts.target = *target_;
  parts.activated = activated_;
  parts.ties_by_order = revealed_;
  parts.order_of = order_of_;
  parts.exposed = &frontier_;
  parts.step = step_ + 1;
  return DecentralizedView(parts);
}

std::vector<NodeIndex> exposed_set(
    const TorusGrid& grid, int p, int k, std::span<const NodeIndex> activated,
    const std::function<std::span<const NodeIndex>(NodeIndex)>& weak_ties_of) {
  const std::size_t n = grid.size();
  std::vector<std::uint8_t> active(n, 0);
  for (NodeIndex a : activated) active[a] = 1;
  const DistanceShells shells(grid);
  std::vector<int> count(n, 0);
  std::vector<NodeIndex> seen;
  for (NodeIndex a : activated) {
    seen.clear();
    for (const Offset off : shells.ball(p)) seen.push_back(grid.shifted(a, off));
    for (NodeIndex w : weak_ties_of(a)) {
      if (w != a) seen.push_back(w);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (NodeIndex v : seen) ++count[v];
  }
  std::vector<NodeIndex> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (!active[v] && count[v] >= k) out.push_back(static_cast<NodeIndex>(v));
  }
  return out;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kTargetReached: return "target-reached";
    case Outcome::kAllInfected: return "all-infected";
    case Outcome::kBudgetExhausted: return "budget-exhausted";
    case Outcome::kFrontierEmpty: return "frontier-empty";
  }
  return "unknown";
}

Outcome parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::kTargetReached, Outcome::kAllInfected,
                    Outcome::kBudgetExhausted, Outcome::kFrontierEmpty}) {
    if (to_string(o) == text) return o;
  }
  throw std::runtime_error("unknown outcome '" + std::string(text) + "'");
}

void write_trace(std::ostream& out, const Trace& trace) {
  for (const TraceRecord& r : trace.records) {
    out << r.step << ' ' << r.node.row << ' ' << r.node.col << ' '
        << r.distance << '\n';
  }
  out << "outcome " << to_string(trace.outcome) << ' ' << trace.steps << '\n';
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  bool finished = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (finished) throw std::runtime_error("trace: data after outcome line");
    std::istringstream fields(line);
    if (line.rfind("outcome", 0) == 0) {
      std::string tag, name;
      if (!(fields >> tag >> name >> trace.steps)) {
        throw std::runtime_error("trace: malformed outcome line");
      }
      trace.outcome = parse_outcome(name);
      finished = true;
      continue;
    }
    TraceRecord r;
    if (!(fields >> r.step >> r.node.row >> r.node.col >> r.distance)) {
      throw std::runtime_error("trace: malformed record '" + line + "'");
    }
    trace.records.push_back(r);
  }
  if (!finished) throw std::runtime_error("trace: missing outcome line");
  return trace;
}

std::uint64_t default_budget(const ModelParams& params) {
  return 4 * static_cast<std::uint64_t>(params.node_count());
}

namespace {

void record_step(Trace& trace, const Contagion& run, int step,
                 std::span<const NodeIndex> batch) {
  std::vector<NodeIndex> ordered(batch.begin(), batch.end());
  std::sort(ordered.begin(), ordered.end());
  for (NodeIndex v : ordered) {
    trace.records.push_back({step, run.grid().node(v), run.distance_to_target()});
  }
}

bool finished(const Contagion& run) {
  return run.target() ? run.target_infected() : run.all_infected();
}

Outcome success(const Contagion& run) {
  return run.target() ? Outcome::kTargetReached : Outcome::kAllInfected;
}

}  // namespace

Trace run_diffusion(const Graph& graph, std::span<const NodeIndex> seeds,
                    std::optional<NodeIndex> target, std::uint64_t budget) {
  auto shells = std::make_shared<const DistanceShells>(graph.grid());
  EagerTies ties(graph);
  Contagion run(graph.params(), shells, ties, seeds, target);
  Trace trace;
  record_step(trace, run, 0, run.activated());
  while (true) {
    if (finished(run)) {
      trace.outcome = success(run);
      break;
    }
    if (static_cast<std::uint64_t>(run.step()) >= budget) {
      trace.outcome = Outcome::kBudgetExhausted;
      break;
    }
    if (run.exposed().empty()) {
      trace.outcome = Outcome::kFrontierEmpty;
      break;
    }
    const std::vector<NodeIndex> batch = run.exposed().sorted();
    run.infect(batch);
    record_step(trace, run, run.step(), batch);
  }
  trace.steps = run.step();
  return trace;
}

Trace run_routing(const ModelParams& params,
                  std::shared_ptr<const DistanceShells> shells,
                  TieSource& ties, const RoutingSetup& setup,
                  const RoutingScheme& scheme, Rng& scheme_rng,
                  const RoutingObserver& observer) {
  if (setup.m < 1) throw std::invalid_argument("m: must be >= 1");
  Contagion run(params, std::move(shells), ties, setup.seeds, setup.target);
  const std::uint64_t budget =
      setup.budget == 0 ? default_budget(params) : setup.budget;
  Trace trace;
  record_step(trace, run, 0, run.activated());
  while (true) {
    if (run.target_infected()) {
      trace.outcome = Outcome::kTargetReached;
      break;
    }
    if (static_cast<std::uint64_t>(run.step()) >= budget) {
      trace.outcome = Outcome::kBudgetExhausted;
      break;
    }
    if (run.exposed().empty()) {
      trace.outcome = Outcome::kFrontierEmpty;
      break;
    }
    const DecentralizedView view = run.view();
    const Rng before = scheme_rng;
    const std::vector<NodeIndex> batch = scheme.select(view, setup.m, scheme_rng);
    if (observer) observer(view, before, batch);
    const std::size_t expected = std::min(setup.m, run.exposed().size());
    if (batch.size() != expected) {
      throw ContractViolation("scheme '" + std::string(scheme.name()) +
                              "' returned " + std::to_string(batch.size()) +
                              " nodes, expected " + std::to_string(expected));
    }
    run.infect(batch);
    record_step(trace, run, run.step(), batch);
  }
  trace.steps = run.step();
  return trace;
}

Trace run_routing(const ModelParams& params, const WeakTieSampler& sampler,
                  const RoutingScheme& scheme, std::size_t m,
                  std::uint64_t seed, std::uint64_t budget) {
  params.validate();
  const TorusGrid& grid = sampler.grid();
  if (grid.side() != params.side || sampler.alpha() != params.alpha) {
    throw std::invalid_argument("sampler does not match model parameters");
  }
  RoutingSetup setup{consecutive_seeds(grid, params.k), default_target(grid), m,
                     budget};
  const std::uint64_t graph_seed = derive_seed(seed, 0);
  Rng scheme_rng(seed, 1);
  // Non-owning alias: the sampler outlives this call.
  std::shared_ptr<const DistanceShells> shells(
      std::shared_ptr<const DistanceShells>{}, &sampler.shells());
  if (params.directedness == Directedness::kDirected) {
    LazyGraph lazy(params, graph_seed,
                   std::shared_ptr<const WeakTieSampler>(
                       std::shared_ptr<const WeakTieSampler>{}, &sampler));
    return run_routing(params, shells, lazy, setup, scheme, scheme_rng);
  }
  const Graph graph = generate_graph(params, graph_seed, sampler);
  EagerTies ties(graph);
  return run_routing(params, shells, ties, setup, scheme, scheme_rng);
}

ViewSnapshot ViewSnapshot::capture(const DecentralizedView& view,
                                   const Rng& rng) {
  ViewSnapshot snap;
  snap.side_ = view.grid().side();
  snap.p_ = view.strong_radius();
  snap.k_ = view.threshold();
  snap.directedness_ = view.directedness();
  snap.target_ = view.target();
  snap.step_ = view.step();
  snap.rng_state_ = rng.state();
  snap.activated_.assign(view.activated().begin(), view.activated().end());
  for (NodeIndex a : snap.activated_) {
    const auto ties = view.weak_ties(a);
    snap.ties_.emplace_back(ties.begin(), ties.end());
  }
  return snap;
}

void ViewSnapshot::write(std::ostream& out) const {
  const TorusGrid grid(side_);
  const NodeId t = grid.node(target_);
  out << "view " << side_ << ' ' << p_ << ' ' << k_ << ' '
      << to_string(directedness_) << ' ' << t.row << ' ' << t.col << ' '
      << step_ << ' ' << rng_state_ << ' ' << activated_.size() << '\n';
  for (std::size_t i = 0; i < activated_.size(); ++i) {
    const NodeId a = grid.node(activated_[i]);
    out << a.row << ' ' << a.col << ' ' << ties_[i].size();
    for (NodeIndex w : ties_[i]) {
      const NodeId b = grid.node(w);
      out << ' ' << b.row << ' ' << b.col;
    }
    out << '\n';
  }
}

ViewSnapshot ViewSnapshot::read(std::istream& in) {
  ViewSnapshot snap;
  std::string tag, dir;
  int trow, tcol;
  std::size_t count;
  if (!(in >> tag >> snap.side_ >> snap.p_ >> snap.k_ >> dir >> trow >> tcol >>
        snap.step_ >> snap.rng_state_ >> count) ||
      tag != "view") {
    throw std::runtime_error("view snapshot: malformed header");
  }
  snap.directedness_ = parse_directedness(dir);
  const TorusGrid grid(snap.side_);
  if (!grid.contains({trow, tcol})) {
    throw std::runtime_error("view snapshot: target out of range");
  }
  snap.target_ = grid.index({trow, tcol});
  for (std::size_t i = 0; i < count; ++i) {
    int row, col;
    std::size_t nties;
    if (!(in >> row >> col >> nties) || !grid.contains({row, col})) {
      throw std::runtime_error("view snapshot: malformed activated node");
    }
    snap.activated_.push_back(grid.index({row, col}));
    std::vector<NodeIndex> ties;
    for (std::size_t j = 0; j < nties; ++j) {
      int r, c;
      if (!(in >> r >> c) || !grid.contains({r, c})) {
        throw std::runtime_error("view snapshot: malformed tie");
      }
      ties.push_back(grid.index({r, c}));
    }
    snap.ties_.push_back(std::move(ties));
  }
  return snap;
}

DecentralizedView ViewSnapshot::rebuild() {
  grid_.emplace(side_);
  const std::size_t n = grid_->size();
  order_of_.assign(n, std::numeric_limits<std::uint32_t>::max());
  tie_spans_.clear();
  for (std::size_t i = 0; i < activated_.size(); ++i) {
    order_of_[activated_[i]] = static_cast<std::uint32_t>(i);
    tie_spans_.emplace_back(ties_[i]);
  }
  const auto exposed = exposed_set(
      *grid_, p_, k_, activated_,
      [this](NodeIndex a) { return tie_spans_[order_of_[a]]; });
  frontier_ = std::make_unique<Frontier>(*grid_, target_);
  for (NodeIndex v : exposed) frontier_->insert(v);

  DecentralizedView::Parts parts;
  parts.grid = &*grid_;
  parts.p = p_;
  parts.k = k_;
  parts.directedness = directedness_;
  parts.target = target_;
  parts.activated = activated_;
  parts.ties_by_order = tie_spans_;
  parts.order_of = order_of_;
  parts.exposed = frontier_.get();
  parts.step = step_;
  return DecentralizedView(parts);
}

}  // namespace swc
