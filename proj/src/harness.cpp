#include "swc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "swc/contagion.hpp"
#include "swc/schemes.hpp"

namespace swc {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument("config field '" + field + "': " + message),
      field_(std::move(field)) {}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kSimpleRouting: return "simple-routing";
    case Mode::kComplexRouting: return "complex-routing";
    case Mode::kComplexDiffusion: return "complex-diffusion";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::kSimpleRouting, Mode::kComplexRouting,
                 Mode::kComplexDiffusion}) {
    if (to_string(m) == text) return m;
  }
  throw ConfigError("mode", "unknown mode '" + std::string(text) + "'");
}

std::string format_m(std::size_t m) {
  return m == kUnbounded ? "inf" : std::to_string(m);
}

std::size_t parse_m(std::string_view text) {
  if (text == "inf") return kUnbounded;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
    throw ConfigError("m", "expected a positive integer or 'inf', got '" +
                               std::string(text) + "'");
  }
  return value;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T>
T parse_value(const std::string& field, const std::string& text) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(field, "cannot parse '" + text + "'");
  }
  return value;
}

std::string single(const std::string& field,
                   const std::vector<std::string>& items) {
  if (items.size() != 1) throw ConfigError(field, "expected a single value");
  return items.front();
}

}  // namespace

void SweepConfig::validate() const {
  if (sides.empty()) throw ConfigError("L", "at least one side is required");
  for (int side : sides) {
    if (side < 2) throw ConfigError("L", "sides must be >= 2");
  }
  if (alphas.empty()) throw ConfigError("alpha", "at least one alpha is required");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("alpha", "must be finite and >= 0");
    }
  }
  if (k < 1 || k > 255) throw ConfigError("k", "must be in [1, 255]");
  if (p < 1) throw ConfigError("p", "must be >= 1");
  if (q < 0) throw ConfigError("q", "must be >= 0");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  for (int side : sides) {
    if (k > side) throw ConfigError("k", "k consecutive seeds must fit in a row");
  }
  if (mode == Mode::kSimpleRouting && k != 1) {
    throw ConfigError("k", "simple-routing requires k = 1");
  }
  if (mode == Mode::kComplexRouting && k < 2) {
    throw ConfigError("k", "complex-routing requires k >= 2");
  }
  if (mode == Mode::kComplexDiffusion) {
    if (ms.size() != 1 || ms.front() != kUnbounded) {
      throw ConfigError("m", "complex-diffusion activates every exposed node; "
                             "m must not be set");
    }
    if (schemes.size() != 1 || schemes.front() != "activate-all") {
      throw ConfigError("scheme", "complex-diffusion does not take a scheme");
    }
  } else {
    if (ms.empty()) throw ConfigError("m", "at least one m is required");
    if (schemes.empty()) throw ConfigError("scheme", "at least one scheme is required");
    for (const auto& s : schemes) {
      try {
        describe_scheme(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("scheme", e.what());
      }
    }
  }
}

SweepConfig parse_sweep_config(std::istream& in) {
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (entries.count(key)) throw ConfigError(key, "given more than once");
    entries[key] = split_list(value);
  }

  static const std::vector<std::string> known = {
      "mode", "L", "n", "alpha", "k", "p", "q", "m", "scheme",
      "directedness", "trials", "seed", "budget", "out"};
  for (const auto& [key, _] : entries) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key, "unknown key");
    }
  }

  SweepConfig config;
  if (!entries.count("mode")) throw ConfigError("mode", "required");
  config.mode = parse_mode(single("mode", entries["mode"]));

  if (entries.count("L") && entries.count("n")) {
    throw ConfigError("n", "give either L or n, not both");
  }
  if (entries.count("L")) {
    for (const auto& s : entries["L"]) config.sides.push_back(parse_value<int>("L", s));
  } else if (entries.count("n")) {
    for (const auto& s : entries["n"]) {
      const auto n = parse_value<long long>("n", s);
      const auto side = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(n))));
      if (n < 4 || side * side != n) {
        throw ConfigError("n", "n = " + s + " is not the square of a side >= 2");
      }
      config.sides.push_back(static_cast<int>(side));
    }
  }
  if (entries.count("alpha")) {
    for (const auto& s : entries["alpha"]) {
      config.alphas.push_back(parse_value<double>("alpha", s));
    }
  }
  const bool diffusion = config.mode == Mode::kComplexDiffusion;
  config.k = entries.count("k") ? parse_value<int>("k", single("k", entries["k"]))
                                : (config.mode == Mode::kSimpleRouting ? 1 : 2);
  config.p = entries.count("p") ? parse_value<int>("p", single("p", entries["p"])) : config.k;
  config.q = entries.count("q") ? parse_value<int>("q", single("q", entries["q"])) : config.k;
  if (diffusion) {
    if (entries.count("m")) {
      throw ConfigError("m", "complex-diffusion activates every exposed node; "
                             "m must not be set");
    }
    if (entries.count("scheme")) {
      throw ConfigError("scheme", "complex-diffusion does not take a scheme");
    }
    config.ms = {kUnbounded};
    config.schemes = {"activate-all"};
  } else {
    if (entries.count("m")) {
      config.ms.clear();
      for (const auto& s : entries["m"]) config.ms.push_back(parse_m(s));
    }
    if (entries.count("scheme")) config.schemes = entries["scheme"];
  }
  config.directedness = diffusion ? Directedness::kUndirected : Directedness::kDirected;
  if (entries.count("directedness")) {
    try {
      config.directedness =
          parse_directedness(single("directedness", entries["directedness"]));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("directedness", e.what());
    }
  }
  if (entries.count("trials")) {
    config.trials = parse_value<int>("trials", single("trials", entries["trials"]));
  }
  if (entries.count("seed")) {
    config.seed = parse_value<std::uint64_t>("seed", single("seed", entries["seed"]));
  }
  if (entries.count("budget")) {
    config.budget = parse_value<std::uint64_t>("budget", single("budget", entries["budget"]));
  }
  if (entries.count("out")) config.output = single("out", entries["out"]);
  config.validate();
  return config;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_sweep_config(in);
}

void summarize(CellResult& cell) {
  const auto& s = cell.samples;
  if (s.empty()) return;
  const auto count = static_cast<double>(s.size());
  double sum = 0.0;
  for (double x : s) sum += x;
  cell.mean = sum / count;
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  cell.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (s.size() > 1) {
    double ss = 0.0;
    for (double x : s) ss += (x - cell.mean) * (x - cell.mean);
    cell.standard_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  } else {
    cell.standard_error = 0.0;
  }
}

std::uint64_t trial_seed(std::uint64_t master, int side, double alpha, int p,
                         int q, Directedness directedness, int trial) {
  std::uint64_t key = mix64(static_cast<std::uint64_t>(side));
  key = mix64(key ^ std::bit_cast<std::uint64_t>(alpha));
  key = mix64(key ^ static_cast<std::uint64_t>(p));
  key = mix64(key ^ (static_cast<std::uint64_t>(q) << 1));
  key = mix64(key ^ (directedness == Directedness::kDirected ? 0x5bdULL : 0x7e1ULL));
  return derive_seed(derive_seed(master, key), static_cast<std::uint64_t>(trial));
}

namespace {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SWC_WORKERS")) {
    int value = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct CellPlan {
  CellResult result;
  ModelParams params;
  std::shared_ptr<const WeakTieSampler> sampler;
  std::unique_ptr<RoutingScheme> scheme;
  std::uint64_t budget = 0;
};

}  // namespace

std::vector<CellResult> run_sweep(const SweepConfig& config, int workers) {
  config.validate();
  std::map<std::pair<int, double>, std::shared_ptr<const WeakTieSampler>> samplers;
  std::vector<CellPlan> plans;
  for (double alpha : config.alphas) {
    for (int side : config.sides) {
      auto& sampler = samplers[{side, alpha}];
      if (!sampler) sampler = std::make_shared<const WeakTieSampler>(TorusGrid(side), alpha);
      for (std::size_t m : config.ms) {
        for (const auto& scheme : config.schemes) {
          CellPlan plan;
          plan.params = ModelParams{side, alpha, config.p, config.q, config.k,
                                    config.directedness};
          plan.sampler = sampler;
          plan.scheme = make_scheme(scheme);
          plan.budget = config.budget ? config.budget : default_budget(plan.params);
          CellResult& r = plan.result;
          r.mode = config.mode;
          r.alpha = alpha;
          r.side = side;
          r.n = plan.params.node_count();
          r.k = config.k;
          r.m = m;
          r.scheme = scheme;
          r.trials = config.trials;
          r.samples.assign(static_cast<std::size_t>(config.trials), 0.0);
          plans.push_back(std::move(plan));
        }
      }
    }
  }

  std::vector<std::vector<std::uint8_t>> truncated(plans.size());
  for (std::size_t c = 0; c < plans.size(); ++c) {
    truncated[c].assign(static_cast<std::size_t>(config.trials), 0);
  }
  const std::size_t total = plans.size() * static_cast<std::size_t>(config.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / static_cast<std::size_t>(config.trials);
      const int t = static_cast<int>(task % static_cast<std::size_t>(config.trials));
      CellPlan& plan = plans[c];
      const ModelParams& mp = plan.params;
      const std::uint64_t seed =
          trial_seed(config.seed, mp.side, mp.alpha, mp.p, mp.q, mp.directedness, t);
      Trace trace;
      if (config.mode == Mode::kComplexDiffusion) {
        const Graph graph = generate_graph(mp, derive_seed(seed, 0), *plan.sampler);
        const auto seeds = consecutive_seeds(graph.grid(), mp.k);
        trace = run_diffusion(graph, seeds, std::nullopt, plan.budget);
      } else {
        trace = run_routing(mp, *plan.sampler, *plan.scheme, plan.result.m, seed,
                            plan.budget);
      }
      const bool ok = trace.completed();
      truncated[c][t] = ok ? 0 : 1;
      plan.result.samples[t] =
          ok ? static_cast<double>(trace.steps) : static_cast<double>(plan.budget);
    }
  };
  const int width = std::min<int>(worker_count(workers), static_cast<int>(std::max<std::size_t>(total, 1)));
  if (width <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(work);
  }

  std::vector<CellResult> results;
  for (std::size_t c = 0; c < plans.size(); ++c) {
    CellResult r = std::move(plans[c].result);
    r.truncated = static_cast<int>(
        std::count(truncated[c].begin(), truncated[c].end(), std::uint8_t{1}));
    summarize(r);
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const CellResult& a, const CellResult& b) {
    return std::forward_as_tuple(to_string(a.mode), a.alpha, a.side, a.m, a.scheme) <
           std::forward_as_tuple(to_string(b.mode), b.alpha, b.side, b.m, b.scheme);
  });
  return results;
}

void write_csv(std::ostream& out, std::span<const CellResult> cells) {
  out << kCsvHeader << '\n';
  for (const CellResult& c : cells) {
    out << to_string(c.mode) << ',' << format_double(c.alpha) << ',' << c.side
        << ',' << c.n << ',' << c.k << ',' << format_m(c.m) << ',' << c.scheme
        << ',' << c.trials << ',' << format_double(c.mean) << ','
        << format_double(c.median) << ',' << format_double(c.standard_error)
        << ',' << c.truncated << '\n';
  }
}

std::vector<CellResult> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<CellResult> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 12) {
      throw std::runtime_error("csv line " + std::to_string(line_no) +
                               ": expected 12 fields");
    }
    try {
      CellResult c;
      c.mode = parse_mode(f[0]);
      c.alpha = parse_value<double>("alpha", f[1]);
      c.side = parse_value<int>("L", f[2]);
      c.n = parse_value<std::size_t>("n", f[3]);
      c.k = parse_value<int>("k", f[4]);
      c.m = parse_m(f[5]);
      c.scheme = f[6];
      c.trials = parse_value<int>("trials", f[7]);
      c.mean = parse_value<double>("mean", f[8]);
      c.median = parse_value<double>("median", f[9]);
      c.standard_error = parse_value<double>("stderr", f[10]);
      c.truncated = parse_value<int>("truncated", f[11]);
      cells.push_back(std::move(c));
    } catch (const ConfigError& e) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cells;
}

ExponentFit fit_exponent(std::span<const std::pair<double, double>> points) {
  std::vector<double> distinct;
  for (const auto& [n, time] : points) {
    if (!(n > 0.0) || !(time > 0.0)) {
      throw std::domain_error("fit: n and time must be positive");
    }
    distinct.push_back(n);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw std::domain_error("fit: need at least three distinct n values");
  }
  const auto count = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, time] : points) {
    mx += std::log(n);
    my += std::log(time);
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, time] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(time) - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [n, time] : points) {
    const double r = std::log(time) - (fit.intercept + fit.slope * std::log(n));
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  fit.n_min = distinct.front();
  fit.n_max = distinct.back();
  fit.points = points.size();
  return fit;
}

std::vector<GroupFit> fit_groups(std::span<const CellResult> cells) {
  using Key = std::tuple<std::string, double, int, std::size_t, std::string>;
  std::map<Key, std::vector<std::pair<double, double>>> groups;
  std::map<Key, Mode> modes;
  for (const CellResult& c : cells) {
    const Key key{std::string(to_string(c.mode)), c.alpha, c.k, c.m, c.scheme};
    groups[key].emplace_back(static_cast<double>(c.n), c.mean);
    modes[key] = c.mode;
  }
  std::vector<GroupFit> fits;
  for (const auto& [key, points] : groups) {
    std::vector<double> ns;
    for (const auto& pt : points) ns.push_back(pt.first);
    std::sort(ns.begin(), ns.end());
    if (std::unique(ns.begin(), ns.end()) - ns.begin() < 3) continue;
    fits.push_back({modes[key], std::get<1>(key), std::get<2>(key),
                    std::get<3>(key), std::get<4>(key), fit_exponent(points)});
  }
  return fits;
}

void write_fits(std::ostream& out, std::span<const GroupFit> fits) {
  out << kFitHeader << '\n';
  for (const GroupFit& g : fits) {
    out << to_string(g.mode) << ',' << format_double(g.alpha) << ',' << g.k
        << ',' << format_m(g.m) << ',' << g.scheme << ','
        << format_double(g.fit.slope) << ',' << format_double(g.fit.intercept)
        << ',' << format_double(g.fit.residual_norm) << ','
        << format_double(g.fit.n_min) << ',' << format_double(g.fit.n_max)
        << ',' << g.fit.points << '\n';
  }
}

}  // namespace swc
