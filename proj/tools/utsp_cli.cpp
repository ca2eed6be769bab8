// utsp: command-line front end for instance generation, heat-map training,
// guided local search, exact and baseline solvers, and benchmarking.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "utsp/bench.hpp"
#include "utsp/edge_candidates.hpp"
#include "utsp/heatmap_generator.hpp"
#include "utsp/instance.hpp"
#include "utsp/io.hpp"
#include "utsp/local_search.hpp"

namespace {

using json = nlohmann::json;
using namespace utsp;

constexpr int kExitInvalidArgs = 2;
constexpr int kExitRuntime = 3;
constexpr int kDefaultRounds = 10;

struct SearchFlags {
  std::string preset;
  double time_budget = 0.0;
  int rounds = 0;
  std::optional<int> candidates;
};

struct TrainFlags {
  std::optional<int> steps;
  std::optional<double> lr;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> init_scale;
};

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--preset", f.preset, "Search preset (defaults to the one closest to n)")
      ->check(CLI::IsMember({"tsp20", "tsp50", "tsp100", "tsp200", "tsp500", "tsp1000"}));
  cmd->add_option("--time-budget", f.time_budget, "Search time limit in seconds")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rounds", f.rounds, "Cap on search rounds")->check(CLI::NonNegativeNumber);
  cmd->add_option("--candidates", f.candidates, "Override the candidate-list length M")
      ->check(CLI::PositiveNumber);
}

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--steps", f.steps, "Adam steps")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Adam learning rate");
  cmd->add_option("--lambda1", f.lambda1, "Row-constraint weight");
  cmd->add_option("--lambda2", f.lambda2, "Self-loop weight");
  cmd->add_option("--init-scale", f.init_scale, "Standard deviation of the initial logits");
}

std::string preset_for_size(int n) {
  if (n <= 35) return "tsp20";
  if (n <= 75) return "tsp50";
  if (n <= 150) return "tsp100";
  if (n <= 350) return "tsp200";
  if (n <= 750) return "tsp500";
  return "tsp1000";
}

SearchParams make_search_params(const SearchFlags& f, int n) {
  SearchParams p = search_preset(f.preset.empty() ? preset_for_size(n) : f.preset);
  p.time_limit = f.time_budget;
  p.max_rounds = f.rounds;
  if (p.time_limit == 0.0 && p.max_rounds == 0) p.max_rounds = kDefaultRounds;
  if (f.candidates) p.candidates = *f.candidates;
  p.candidates = std::min(p.candidates, n - 1);
  return p;
}

TrainConfig make_train_config(const TrainFlags& f, int n, std::uint64_t seed) {
  TrainConfig cfg = TrainConfig::defaults_for(n);
  if (f.steps) cfg.steps = *f.steps;
  if (f.lr) cfg.learning_rate = *f.lr;
  if (f.lambda1) cfg.lambda1 = *f.lambda1;
  if (f.lambda2) cfg.lambda2 = *f.lambda2;
  if (f.init_scale) cfg.init_scale = *f.init_scale;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

json to_json(const BenchResult& r) {
  json j = {{"instance", r.instance},
            {"method", r.method},
            {"length", r.length},
            {"heatmap_seconds", r.heatmap_seconds},
            {"search_seconds", r.search_seconds},
            {"seed", r.seed}};
  j["gap_percent"] = r.gap_percent ? json(*r.gap_percent) : json(nullptr);
  return j;
}

json bench_json(const std::vector<BenchResult>& rows) {
  struct Acc {
    double length = 0.0;
    double gap = 0.0;
    int gaps = 0;
    int count = 0;
  };
  std::map<std::string, Acc> acc;
  json out = {{"rows", json::array()}};
  for (const BenchResult& r : rows) {
    out["rows"].push_back(to_json(r));
    Acc& a = acc[r.method];
    a.length += r.length;
    ++a.count;
    if (r.gap_percent) {
      a.gap += *r.gap_percent;
      ++a.gaps;
    }
  }
  json summary = json::object();
  for (const auto& [method, a] : acc) {
    summary[method] = {{"count", a.count}, {"mean_length", a.length / a.count}};
    summary[method]["mean_gap_percent"] = a.gaps > 0 ? json(a.gap / a.gaps) : json(nullptr);
  }
  out["summary"] = summary;
  return out;
}

std::string solution_text(const Tour& tour, double length) { return format_tour(tour, length); }

// Rows for one benchmark instance: pipeline, single NN+2-opt, equal-time
// multistart NN+2-opt and, when tractable, the exact optimum.
std::vector<BenchResult> bench_instance(const Instance& inst, const TrainFlags& tf,
                                        const SearchFlags& sf, std::uint64_t seed) {
  const DistanceMatrix dist = distance_matrix(inst);
  const PipelineResult pipe =
      solve_pipeline(inst, make_train_config(tf, inst.size(), seed), make_search_params(sf, inst.size()), seed);

  std::vector<BenchResult> rows{pipe.result};
  const auto t0 = SearchClock::now();
  const TourSolution single = nn_two_opt_baseline(dist, seed);
  const double single_seconds = std::chrono::duration<double>(SearchClock::now() - t0).count();
  rows.push_back({inst.name(), "nn-2opt", single.length, std::nullopt, 0.0, single_seconds, seed});

  const double budget = pipe.result.heatmap_seconds + pipe.result.search_seconds;
  const TourSolution multi = nn_two_opt_multistart(dist, seed, budget);
  rows.push_back({inst.name(), "nn-2opt-multistart", multi.length, std::nullopt, 0.0, budget, seed});

  if (inst.size() <= kHeldKarpMaxCities) {
    const auto t1 = SearchClock::now();
    const TourSolution exact = held_karp_exact(dist);
    const double exact_seconds = std::chrono::duration<double>(SearchClock::now() - t1).count();
    rows.push_back({inst.name(), "held-karp", exact.length, std::nullopt, 0.0, exact_seconds, seed});
    for (BenchResult& r : rows) r.gap_percent = gap_percent(r.length, exact.length);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"utsp: heat-map guided TSP search"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--out", out, "Output path (stdout when omitted)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.fallthrough();

  // generate
  auto* gen = app.add_subcommand("generate", "Uniform random instance on the unit square");
  int gen_n = 0;
  bool gen_tsplib = false;
  gen->add_option("--n", gen_n, "Number of cities")->required()->check(CLI::Range(3, 1000000));
  gen->add_flag("--tsplib", gen_tsplib, "Write TSPLIB EUC_2D instead of the native format");

  // train-heatmap
  auto* train = app.add_subcommand("train-heatmap", "Optimise a heat map for one instance");
  std::string instance_path;
  std::string trace_path;
  TrainFlags train_flags;
  train->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  train->add_option("--trace", trace_path, "Write the loss trace as CSV");
  add_train_flags(train, train_flags);

  // search
  auto* search = app.add_subcommand("search", "Guided local search from a heat-map file");
  std::string heatmap_path;
  std::string svg_path;
  SearchFlags search_flags;
  search->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  search->add_option("--heatmap", heatmap_path, "Heat-map file")->required()->check(CLI::ExistingFile);
  search->add_option("--svg", svg_path, "Also draw the tour as SVG");
  add_search_flags(search, search_flags);

  // solve
  auto* solve = app.add_subcommand("solve", "Heat-map optimisation followed by guided search");
  solve->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  solve->add_option("--svg", svg_path, "Also draw the tour as SVG");
  add_train_flags(solve, train_flags);
  add_search_flags(solve, search_flags);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact tour by Held-Karp (n <= 18)");
  oracle->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--svg", svg_path, "Also draw the tour as SVG");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Nearest neighbour followed by 2-opt");
  baseline->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
  baseline->add_option("--svg", svg_path, "Also draw the tour as SVG");

  // coverage
  auto* coverage = app.add_subcommand("coverage", "Edge coverage of pruned heat maps");
  int cov_n = 12;
  int cov_count = 50;
  int cov_m = 5;
  bool cov_random = false;
  std::vector<std::string> cov_files;
  coverage->add_option("--n", cov_n, "Cities per generated instance")->check(CLI::Range(3, 100000))->capture_default_str();
  coverage->add_option("--count", cov_count, "Number of generated instances")->check(CLI::PositiveNumber)->capture_default_str();
  coverage->add_option("--m", cov_m, "Entries kept per heat-map row")->check(CLI::PositiveNumber)->capture_default_str();
  coverage->add_option("--instances", cov_files, "Instance files instead of generated ones")->check(CLI::ExistingFile);
  coverage->add_flag("--random-logits", cov_random, "Use the untrained initial heat maps");
  add_train_flags(coverage, train_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "Pipeline against baselines on generated instances");
  int bench_n = 20;
  int bench_count = 10;
  int jobs = 1;
  bench->add_option("--n", bench_n, "Cities per instance")->check(CLI::Range(3, 100000))->capture_default_str();
  bench->add_option("--count", bench_count, "Number of instances")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  add_train_flags(bench, train_flags);
  add_search_flags(bench, search_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidArgs;
  }

  try {
    if (*gen) {
      const Instance inst = generate_random(gen_n, seed);
      emit(out, gen_tsplib ? to_tsplib(inst) : format_instance(inst));
    } else if (*train) {
      const Instance inst = load_instance(instance_path);
      const TrainResult result = optimize_heatmap(inst, make_train_config(train_flags, inst.size(), seed));
      if (!trace_path.empty()) write_text_file(trace_path, trace_csv(result.trace));
      emit(out, format_heatmap(result.heat.h));
    } else if (*search) {
      const Instance inst = load_instance(instance_path);
      const HeatMap heat{parse_heatmap(read_text_file(heatmap_path))};
      if (heat.size() != inst.size()) throw std::invalid_argument("heat map size does not match the instance");
      const SearchParams params = make_search_params(search_flags, inst.size());
      const DistanceMatrix dist = distance_matrix(inst);
      const SearchResult result = run_search(dist, top_m_filter(heat, params.candidates), params, seed);
      if (!svg_path.empty()) emit_tour_svg(inst, result.tour, svg_path);
      emit(out, solution_text(result.tour, tour_length(dist, result.tour)));
    } else if (*solve) {
      const Instance inst = load_instance(instance_path);
      const PipelineResult result = solve_pipeline(inst, make_train_config(train_flags, inst.size(), seed),
                                                   make_search_params(search_flags, inst.size()), seed);
      if (!svg_path.empty()) emit_tour_svg(inst, result.tour, svg_path);
      emit(out, solution_text(result.tour, result.result.length));
      const std::vector<BenchResult> rows{result.result};
      std::cerr << (format == "json" ? bench_json(rows).dump(2) + "\n" : bench_csv(rows));
    } else if (*oracle || *baseline) {
      const Instance inst = load_instance(instance_path);
      const DistanceMatrix dist = distance_matrix(inst);
      const TourSolution sol = *oracle ? held_karp_exact(dist) : nn_two_opt_baseline(dist, seed);
      if (!svg_path.empty()) emit_tour_svg(inst, sol.tour, svg_path);
      emit(out, solution_text(sol.tour, sol.length));
    } else if (*coverage) {
      std::vector<Instance> instances;
      if (cov_files.empty()) {
        for (int k = 0; k < cov_count; ++k) instances.push_back(generate_random(cov_n, derive_seed(seed, k)));
      } else {
        for (const auto& f : cov_files) instances.push_back(load_instance(f));
      }
      std::vector<std::uint64_t> seeds;
      for (std::size_t k = 0; k < instances.size(); ++k) seeds.push_back(derive_seed(seed, k));
      const int n = instances.front().size();
      const std::vector<CoverageRow> rows =
          coverage_report(instances, seeds, make_train_config(train_flags, n, seed), cov_m,
                          cov_random ? HeatSource::kRandomLogits : HeatSource::kOptimized);
      if (format == "csv") {
        emit(out, coverage_csv(rows));
      } else {
        json j = {{"rows", json::array()}};
        double eta = 0.0;
        double pi = 0.0;
        int full = 0;
        for (const CoverageRow& r : rows) {
          j["rows"].push_back({{"instance", r.instance},
                               {"seed", r.seed},
                               {"M", r.m},
                               {"eta", r.eta},
                               {"pi_size", r.pi_size},
                               {"fully_covered", r.fully_covered},
                               {"truth", r.exact_truth ? "exact" : "proxy"}});
          eta += r.eta;
          pi += static_cast<double>(r.pi_size);
          full += r.fully_covered ? 1 : 0;
        }
        const double count = static_cast<double>(rows.size());
        j["summary"] = {{"mean_eta", eta / count}, {"mean_pi_size", pi / count}, {"fully_covered", full}};
        emit(out, j.dump(2) + "\n");
      }
    } else if (*bench) {
      std::vector<std::vector<BenchResult>> per_instance(static_cast<std::size_t>(bench_count));
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(bench_count));
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int k = next++; k < bench_count; k = next++) {
          try {
            const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
            per_instance[static_cast<std::size_t>(k)] =
                bench_instance(generate_random(bench_n, s), train_flags, search_flags, s);
          } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 1; t < std::min(jobs, bench_count); ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      std::vector<BenchResult> rows;
      for (auto& r : per_instance) rows.insert(rows.end(), r.begin(), r.end());
      emit(out, format == "json" ? bench_json(rows).dump(2) + "\n" : bench_csv(rows));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
