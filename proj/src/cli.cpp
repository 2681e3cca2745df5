#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "swc/contagion.hpp"
#include "swc/harness.hpp"
#include "swc/schemes.hpp"

namespace swc {

namespace {

struct ModelOptions {
  int side = 16;
  double alpha = 2.0;
  int k = 2;
  std::optional<int> p;
  std::optional<int> q;
  std::string directedness;
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  std::uint64_t budget = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--L", o.side, "torus side (n = L^2)");
  cmd->add_option("--alpha", o.alpha, "weak-tie distance exponent");
  cmd->add_option("--k", o.k, "contagion threshold");
  cmd->add_option("--p", o.p, "strong-tie radius (default k)");
  cmd->add_option("--q", o.q, "weak ties per node (default k)");
  cmd->add_option("--directedness", o.directedness, "directed or undirected");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--config", o.config, "sweep config supplying defaults");
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

// Merges a config file (first L and alpha) with explicitly given flags.
ModelParams resolve(const CLI::App* cmd, const ModelOptions& o,
                    Directedness fallback, const SweepConfig* config) {
  ModelParams params;
  params.directedness = fallback;
  if (config) {
    params.side = config->sides.front();
    params.alpha = config->alphas.front();
    params.k = config->k;
    params.p = config->p;
    params.q = config->q;
    params.directedness = config->directedness;
  }
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (!config || given("--L")) params.side = o.side;
  if (!config || given("--alpha")) params.alpha = o.alpha;
  if (!config || given("--k")) {
    params.k = o.k;
    if (!config || !given("--p")) params.p = o.k;
    if (!config || !given("--q")) params.q = o.k;
  }
  if (o.p) params.p = *o.p;
  if (o.q) params.q = *o.q;
  if (!o.directedness.empty()) params.directedness = parse_directedness(o.directedness);
  params.validate();
  return params;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::optional<Graph> load_graph(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph '" + path + "'");
  return read_graph(in);
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Complex contagion on Kleinberg small-world tori", "swc"};
  app.require_subcommand(1);

  ModelOptions gen;
  auto* generate = app.add_subcommand("generate", "emit a serialized network");
  add_model_options(generate, gen);

  ModelOptions route_opts;
  std::string route_m = "1";
  std::string route_scheme = "greedy";
  std::string route_graph;
  auto* route = app.add_subcommand("route", "single routing run, emit trace");
  add_model_options(route, route_opts);
  route->add_option("--m", route_m, "nodes activated per step (or 'inf')");
  route->add_option("--scheme", route_scheme, "greedy, random, activate-all");
  route->add_option("--budget", route_opts.budget, "step budget (0: 4n)");
  route->add_option("--graph", route_graph, "route on a saved network");

  ModelOptions diff_opts;
  std::string diff_graph;
  bool to_target = false;
  auto* diffuse = app.add_subcommand("diffuse", "single diffusion run, emit trace");
  add_model_options(diffuse, diff_opts);
  diffuse->add_option("--budget", diff_opts.budget, "step budget (0: 4n)");
  diffuse->add_option("--graph", diff_graph, "diffuse on a saved network");
  diffuse->add_flag("--to-target", to_target, "stop once the farthest node is infected");

  std::string sweep_config;
  std::string sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  int sweep_workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a sweep config, emit CSV");
  sweep->add_option("--config", sweep_config, "sweep config file")->required();
  sweep->add_option("--out", sweep_out, "CSV path (default: config 'out' or stdout)");
  sweep->add_option("--seed", sweep_seed, "override the master seed");
  sweep->add_option("--workers", sweep_workers, "worker threads (default SWC_WORKERS)");

  std::string fit_in;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "fit log-log exponents to a sweep CSV");
  fit->add_option("csv", fit_in, "sweep CSV")->required();
  fit->add_option("--out", fit_out, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*generate) {
      std::optional<SweepConfig> cfg;
      if (!gen.config.empty()) cfg = load_sweep_config(gen.config);
      const ModelParams params =
          resolve(generate, gen, Directedness::kDirected, cfg ? &*cfg : nullptr);
      const std::uint64_t seed =
          (cfg && !generate->count("--seed")) ? cfg->seed : gen.seed;
      Output o(gen.out, out);
      write_graph(o.get(), generate_graph(params, seed));
    } else if (*route) {
      std::optional<SweepConfig> cfg;
      if (!route_opts.config.empty()) cfg = load_sweep_config(route_opts.config);
      const auto scheme = make_scheme(
          cfg && !route->count("--scheme") ? cfg->schemes.front() : route_scheme);
      const std::size_t m = cfg && !route->count("--m") ? cfg->ms.front() : parse_m(route_m);
      const std::uint64_t seed =
          (cfg && !route->count("--seed")) ? cfg->seed : route_opts.seed;
      Output o(route_opts.out, out);
      if (auto graph = load_graph(route_graph)) {
        const auto shells = std::make_shared<const DistanceShells>(graph->grid());
        EagerTies ties(*graph);
        RoutingSetup setup{consecutive_seeds(graph->grid(), graph->params().k),
                           default_target(graph->grid()), m, route_opts.budget};
        Rng rng(seed, 1);
        write_trace(o.get(), run_routing(graph->params(), shells, ties, setup,
                                         *scheme, rng));
      } else {
        const ModelParams params = resolve(route, route_opts, Directedness::kDirected,
                                           cfg ? &*cfg : nullptr);
        const WeakTieSampler sampler(TorusGrid(params.side), params.alpha);
        write_trace(o.get(), run_routing(params, sampler, *scheme, m, seed,
                                         route_opts.budget));
      }
    } else if (*diffuse) {
      std::optional<SweepConfig> cfg;
      if (!diff_opts.config.empty()) cfg = load_sweep_config(diff_opts.config);
      const std::uint64_t seed =
          (cfg && !diffuse->count("--seed")) ? cfg->seed : diff_opts.seed;
      auto graph = load_graph(diff_graph);
      if (!graph) {
        const ModelParams params = resolve(diffuse, diff_opts, Directedness::kUndirected,
                                           cfg ? &*cfg : nullptr);
        graph = generate_graph(params, derive_seed(seed, 0));
      }
      const auto seeds = consecutive_seeds(graph->grid(), graph->params().k);
      std::optional<NodeIndex> target;
      if (to_target) target = default_target(graph->grid());
      const std::uint64_t budget =
          diff_opts.budget ? diff_opts.budget : default_budget(graph->params());
      Output o(diff_opts.out, out);
      write_trace(o.get(), run_diffusion(*graph, seeds, target, budget));
    } else if (*sweep) {
      SweepConfig config = load_sweep_config(sweep_config);
      if (sweep_seed) config.seed = *sweep_seed;
      const auto cells = run_sweep(config, sweep_workers);
      Output o(sweep_out.empty() ? config.output : sweep_out, out);
      write_csv(o.get(), cells);
      for (const auto& c : cells) {
        if (c.truncated > 0) {
          err << "warning: " << c.truncated << " truncated trial(s) in cell "
              << to_string(c.mode) << " alpha=" << format_double(c.alpha)
              << " L=" << c.side << " m=" << format_m(c.m) << " scheme="
              << c.scheme << "\n";
        }
      }
    } else if (*fit) {
      std::ifstream in(fit_in);
      if (!in) throw std::runtime_error("cannot open csv '" + fit_in + "'");
      const auto cells = read_csv(in);
      const auto fits = fit_groups(cells);
      if (fits.empty()) {
        throw std::runtime_error("no group has three distinct n values");
      }
      Output o(fit_out, out);
      write_fits(o.get(), fits);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace swc
