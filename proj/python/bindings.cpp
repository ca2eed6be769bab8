#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "utsp/bench.hpp"
#include "utsp/edge_candidates.hpp"
#include "utsp/heatmap.hpp"
#include "utsp/heatmap_generator.hpp"
#include "utsp/instance.hpp"
#include "utsp/io.hpp"
#include "utsp/local_search.hpp"

namespace py = pybind11;
using namespace utsp;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Instance make_instance(const RowMatrix& xy, const std::string& name) {
  if (xy.cols() != 2) throw std::invalid_argument("Instance: coordinates must have shape (n, 2)");
  std::vector<Point> pts;
  for (Eigen::Index i = 0; i < xy.rows(); ++i) pts.push_back({xy(i, 0), xy(i, 1)});
  return Instance(std::move(pts), name);
}

RowMatrix coords_of(const Instance& inst) {
  RowMatrix xy(inst.size(), 2);
  for (int i = 0; i < inst.size(); ++i) {
    xy(i, 0) = inst[i].x;
    xy(i, 1) = inst[i].y;
  }
  return xy;
}

py::dict loss_dict(const LossBreakdown& l) {
  py::dict d;
  d["row_penalty"] = l.row_penalty;
  d["self_loop"] = l.self_loop;
  d["expected_length"] = l.expected_length;
  d["total"] = l.total;
  return d;
}

std::vector<City> order_of(const Tour& tour) { return {tour.order().begin(), tour.order().end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heat-map guided TSP search";

  py::class_<Instance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("coords"), py::arg("name") = "")
      .def_property_readonly("n", &Instance::size)
      .def_property_readonly("name", &Instance::name)
      .def_property_readonly("coords", &coords_of)
      .def("__len__", &Instance::size);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_static("defaults_for", &TrainConfig::defaults_for, py::arg("n"))
      .def_readwrite("steps", &TrainConfig::steps)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("lambda1", &TrainConfig::lambda1)
      .def_readwrite("lambda2", &TrainConfig::lambda2)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<SearchParams>(m, "SearchParams")
      .def(py::init<>())
      .def_readwrite("alpha", &SearchParams::alpha)
      .def_readwrite("beta", &SearchParams::beta)
      .def_readwrite("candidates", &SearchParams::candidates)
      .def_readwrite("k_lo", &SearchParams::k_lo)
      .def_readwrite("k_hi", &SearchParams::k_hi)
      .def_readwrite("expand_budget", &SearchParams::expand_budget)
      .def_readwrite("time_limit", &SearchParams::time_limit)
      .def_readwrite("max_rounds", &SearchParams::max_rounds);

  m.def("generate_random", &generate_random, py::arg("n"), py::arg("seed"));
  m.def("load_instance", [](const std::string& path) { return load_instance(path); }, py::arg("path"));
  m.def("distance_matrix", [](const Instance& inst) { return distance_matrix(inst).d; }, py::arg("instance"));

  m.def("column_softmax", [](const RowMatrix& s) { return column_softmax(Logits{s}).t; }, py::arg("logits"));
  m.def("indicator_to_heatmap", [](const RowMatrix& t) { return indicator_to_heatmap(SoftIndicator{t}).h; },
        py::arg("indicator"));
  m.def(
      "surrogate_loss",
      [](const RowMatrix& t, const RowMatrix& d, double l1, double l2) {
        const SoftIndicator ind{t};
        return loss_dict(surrogate_loss(ind, indicator_to_heatmap(ind), DistanceMatrix{d}, l1, l2));
      },
      py::arg("indicator"), py::arg("distances"), py::arg("lambda1"), py::arg("lambda2"));
  m.def(
      "loss_gradient",
      [](const RowMatrix& s, const RowMatrix& d, double l1, double l2) {
        return loss_gradient(Logits{s}, DistanceMatrix{d}, l1, l2);
      },
      py::arg("logits"), py::arg("distances"), py::arg("lambda1"), py::arg("lambda2"));

  m.def(
      "optimize_heatmap",
      [](const Instance& inst, const TrainConfig& cfg) {
        const TrainResult r = optimize_heatmap(inst, cfg);
        py::list losses;
        for (const LossBreakdown& l : r.trace.steps) losses.append(l.total);
        py::dict out;
        out["logits"] = r.logits.s;
        out["indicator"] = r.indicator.t;
        out["heat"] = r.heat.h;
        out["final_loss"] = loss_dict(r.trace.final);
        out["losses"] = losses;
        out["returned_step"] = r.trace.returned_step;
        return out;
      },
      py::arg("instance"), py::arg("config"));

  m.def("top_m_filter", [](const RowMatrix& h, int k) { return top_m_filter(HeatMap{h}, k).hp; },
        py::arg("heat"), py::arg("m"));

  m.def("search_preset", &search_preset, py::arg("name"));
  m.def("search_preset_names", [] {
    std::vector<std::string> names;
    for (auto n : search_preset_names()) names.emplace_back(n);
    return names;
  });

  m.def(
      "run_search",
      [](const Instance& inst, const RowMatrix& hp, const SearchParams& params, std::uint64_t seed) {
        const DistanceMatrix dist = distance_matrix(inst);
        PrunedHeatMap pruned{hp, hp};
        const SearchResult r = run_search(dist, pruned, params, seed);
        return py::make_tuple(order_of(r.tour), tour_length(dist, r.tour));
      },
      py::arg("instance"), py::arg("pruned_heat"), py::arg("params"), py::arg("seed"));

  m.def(
      "two_opt_improve",
      [](const Instance& inst, const std::vector<City>& order) {
        return order_of(two_opt_improve(distance_matrix(inst), Tour(order)));
      },
      py::arg("instance"), py::arg("order"));
  m.def(
      "tour_length",
      [](const Instance& inst, const std::vector<City>& order) {
        return tour_length(distance_matrix(inst), Tour(order));
      },
      py::arg("instance"), py::arg("order"));

  m.def(
      "held_karp_exact",
      [](const Instance& inst) {
        const TourSolution s = held_karp_exact(inst);
        return py::make_tuple(order_of(s.tour), s.length);
      },
      py::arg("instance"));
  m.def(
      "nn_two_opt_baseline",
      [](const Instance& inst, std::uint64_t seed) {
        const TourSolution s = nn_two_opt_baseline(distance_matrix(inst), seed);
        return py::make_tuple(order_of(s.tour), s.length);
      },
      py::arg("instance"), py::arg("seed"));

  m.def(
      "solve_pipeline",
      [](const Instance& inst, const TrainConfig& cfg, const SearchParams& params, std::uint64_t seed) {
        const PipelineResult r = solve_pipeline(inst, cfg, params, seed);
        py::dict out;
        out["order"] = order_of(r.tour);
        out["length"] = r.result.length;
        out["heatmap_seconds"] = r.result.heatmap_seconds;
        out["search_seconds"] = r.result.search_seconds;
        out["rounds"] = r.stats.rounds;
        return out;
      },
      py::arg("instance"), py::arg("config"), py::arg("params"), py::arg("seed"));

  m.def("heat_increment", &heat_increment, py::arg("old_length"), py::arg("new_length"), py::arg("beta"));
}
