#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "swc/contagion.hpp"
#include "swc/harness.hpp"
#include "swc/schemes.hpp"
#include "swc/smallworld.hpp"
#include "swc/topology.hpp"

namespace py = pybind11;

namespace {

using Coord = std::pair<int, int>;

swc::NodeId to_node(const swc::TorusGrid& g, Coord c) {
  if (!g.contains({c.first, c.second})) {
    throw py::value_error("coordinate outside the torus");
  }
  return {c.first, c.second};
}

py::dict trace_dict(const swc::Trace& trace) {
  py::list records;
  for (const auto& r : trace.records) {
    records.append(py::make_tuple(r.step, r.node.row, r.node.col, r.distance));
  }
  py::dict d;
  d["steps"] = trace.steps;
  d["outcome"] = std::string(swc::to_string(trace.outcome));
  d["records"] = records;
  std::ostringstream text;
  swc::write_trace(text, trace);
  d["text"] = text.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Complex contagion routing and diffusion on Kleinberg small-world tori.";

  py::enum_<swc::Directedness>(m, "Directedness")
      .value("directed", swc::Directedness::kDirected)
      .value("undirected", swc::Directedness::kUndirected);

  py::class_<swc::ModelParams>(m, "ModelParams")
      .def(py::init([](int side, double alpha, int p, int q, int k,
                       swc::Directedness dir) {
             swc::ModelParams params{side, alpha, p, q, k, dir};
             params.validate();
             return params;
           }),
           py::arg("side"), py::arg("alpha"), py::arg("p") = 2, py::arg("q") = 2,
           py::arg("k") = 2, py::arg("directedness") = swc::Directedness::kDirected)
      .def_readwrite("side", &swc::ModelParams::side)
      .def_readwrite("alpha", &swc::ModelParams::alpha)
      .def_readwrite("p", &swc::ModelParams::p)
      .def_readwrite("q", &swc::ModelParams::q)
      .def_readwrite("k", &swc::ModelParams::k)
      .def_readwrite("directedness", &swc::ModelParams::directedness)
      .def_property_readonly("n", &swc::ModelParams::node_count)
      .def("canonical", &swc::ModelParams::canonical);

  m.def("torus_distance", [](int side, Coord u, Coord v) {
    const swc::TorusGrid g(side);
    return g.distance(to_node(g, u), to_node(g, v));
  }, py::arg("side"), py::arg("u"), py::arg("v"));

  m.def("count_at_distance", [](int side, int d) {
    return swc::TorusGrid(side).count_at_distance(d);
  }, py::arg("side"), py::arg("d"));

  m.def("nodes_at_distance", [](int side, Coord u, int d) {
    const swc::TorusGrid g(side);
    std::vector<Coord> out;
    for (auto v : g.nodes_at_distance(to_node(g, u), d)) out.emplace_back(v.row, v.col);
    return out;
  }, py::arg("side"), py::arg("u"), py::arg("d"));

  m.def("normalizing_constant", [](int side, double alpha) {
    return swc::normalizing_constant(swc::TorusGrid(side), alpha);
  }, py::arg("side"), py::arg("alpha"));

  py::class_<swc::Graph>(m, "Graph")
      .def_property_readonly("params", &swc::Graph::params)
      .def_property_readonly("seed", &swc::Graph::seed)
      .def_property_readonly("weak_tie_count", &swc::Graph::weak_tie_count)
      .def("drawn_ties", [](const swc::Graph& g, Coord u) {
        const auto& grid = g.grid();
        std::vector<Coord> out;
        for (auto v : g.drawn_ties(grid.index(to_node(grid, u)))) {
          const auto c = grid.node(v);
          out.emplace_back(c.row, c.col);
        }
        return out;
      })
      .def("to_text", [](const swc::Graph& g) {
        std::ostringstream out;
        swc::write_graph(out, g);
        return out.str();
      })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return swc::read_graph(in);
      });

  m.def("generate_graph", [](const swc::ModelParams& params, std::uint64_t seed) {
    return swc::generate_graph(params, seed);
  }, py::arg("params"), py::arg("seed"));

  m.def("run_routing", [](const swc::ModelParams& params, const std::string& scheme,
                          std::size_t activations, std::uint64_t seed,
                          std::uint64_t budget) {
    const swc::WeakTieSampler sampler(swc::TorusGrid(params.side), params.alpha);
    const auto s = swc::make_scheme(scheme);
    py::gil_scoped_release release;
    auto trace = swc::run_routing(params, sampler, *s, activations, seed, budget);
    py::gil_scoped_acquire acquire;
    return trace_dict(trace);
  }, py::arg("params"), py::arg("scheme") = "greedy", py::arg("m") = 1,
     py::arg("seed") = 1, py::arg("budget") = 0);

  m.def("run_diffusion", [](const swc::Graph& graph, bool to_target, std::uint64_t budget) {
    const auto seeds = swc::consecutive_seeds(graph.grid(), graph.params().k);
    std::optional<swc::NodeIndex> target;
    if (to_target) target = swc::default_target(graph.grid());
    return trace_dict(swc::run_diffusion(
        graph, seeds, target, budget ? budget : swc::default_budget(graph.params())));
  }, py::arg("graph"), py::arg("to_target") = false, py::arg("budget") = 0);

  m.def("fit_exponent", [](const std::vector<std::pair<double, double>>& points) {
    const auto fit = swc::fit_exponent(points);
    py::dict d;
    d["slope"] = fit.slope;
    d["intercept"] = fit.intercept;
    d["residual_norm"] = fit.residual_norm;
    d["n_min"] = fit.n_min;
    d["n_max"] = fit.n_max;
    return d;
  }, py::arg("points"));

  m.def("run_sweep", [](const std::string& config_text, int workers) {
    std::istringstream in(config_text);
    const auto config = swc::parse_sweep_config(in);
    std::vector<swc::CellResult> cells;
    {
      py::gil_scoped_release release;
      cells = swc::run_sweep(config, workers);
    }
    std::ostringstream out;
    swc::write_csv(out, cells);
    return out.str();
  }, py::arg("config"), py::arg("workers") = 1);

  py::register_exception<swc::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<swc::ContractViolation>(m, "ContractViolation");
}
