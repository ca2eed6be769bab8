// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "utsp/bench.hpp"
#include "utsp/edge_candidates.hpp"
#include "utsp/heatmap.hpp"
#include "utsp/heatmap_generator.hpp"
#include "utsp/instance.hpp"
#include "utsp/io.hpp"
#include "utsp/local_search.hpp"

namespace {

using namespace utsp;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<City> random_permutation(int n, std::mt19937_64& gen) {
  std::vector<City> q(static_cast<std::size_t>(n));
  std::iota(q.begin(), q.end(), 0);
  std::shuffle(q.begin(), q.end(), gen);
  return q;
}

SoftIndicator random_indicator(int n, std::mt19937_64& gen) {
  return column_softmax(Logits{oracle::random_matrix(n, n, gen, -3.0, 3.0)});
}

Outcome hamiltonian_cycles() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> size(3, 64);
  int good = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<City> q = random_permutation(size(gen), gen);
    const SoftIndicator t = permutation_indicator(q);
    const HamiltonianCheck check = verify_hamiltonian_heatmap(indicator_to_heatmap(t));
    const std::vector<City> cycle = permutation_to_cycle(t);
    std::vector<City> sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    bool once = cycle == q && check.cycle.size() == q.size();
    for (std::size_t k = 0; k < sorted.size(); ++k) once = once && sorted[k] == static_cast<City>(k);
    if (check.is_hamiltonian && once) ++good;
  }
  const double elapsed = seconds_since(start);
  return {good == 1000 && elapsed < 10.0, fmt("%d/1000 permutations, %.2f s", good, elapsed)};
}

Outcome loss_forms() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> size(3, 32);
  std::uniform_real_distribution<double> weight(0.0, 20.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(gen);
    const SoftIndicator t = random_indicator(n, gen);
    const HeatMap h = indicator_to_heatmap(t);
    const DistanceMatrix d = oracle::random_distances(n, gen);
    const double l1 = weight(gen);
    const double l2 = weight(gen);
    const double three_term = surrogate_loss(t, h, d, l1, l2).total;
    // Compact form with D~ = D + lambda2 I, written out entry by entry.
    double row_penalty = 0.0;
    double weighted = 0.0;
    for (int i = 0; i < n; ++i) {
      row_penalty += std::pow(t.t.row(i).sum() - 1.0, 2);
      for (int j = 0; j < n; ++j) weighted += (d(i, j) + (i == j ? l2 : 0.0)) * h.h(i, j);
    }
    const double explicit_compact = l1 * row_penalty + weighted;
    worst = std::max({worst, std::abs(three_term - explicit_compact),
                      std::abs(three_term - compact_loss(t, h, d, l1, l2))});
  }
  return {worst <= 1e-12, fmt("200 triples, max |difference| %.3g", worst)};
}

Outcome gradient_check() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> size(4, 10);
  std::uniform_real_distribution<double> weight(0.0, 20.0);
  const double step = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(gen);
    const Matrix s = oracle::random_matrix(n, n, gen, -2.0, 2.0);
    const DistanceMatrix d = oracle::random_distances(n, gen);
    const double l1 = weight(gen);
    const double l2 = weight(gen);
    const Matrix g = loss_gradient(Logits{s}, d, l1, l2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Matrix up = s;
        Matrix down = s;
        up(i, j) += step;
        down(i, j) -= step;
        const long double diff = oracle::naive_loss_extended(up, d.d, l1, l2) -
                                 oracle::naive_loss_extended(down, d.d, l1, l2);
        const double fd = static_cast<double>(diff / static_cast<long double>(up(i, j) - down(i, j)));
        const double scale = std::max(std::abs(fd), std::abs(g(i, j)));
        if (scale > 0.0) worst = std::max(worst, std::abs(fd - g(i, j)) / scale);
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && elapsed < 30.0, fmt("50 cases, max relative error %.3g, %.2f s", worst, elapsed)};
}

Outcome closed_forms() {
  std::mt19937_64 gen(4);
  double uniform_worst = 0.0;
  double cycle_worst = 0.0;
  for (int n = 3; n <= 40; ++n) {
    const DistanceMatrix d = oracle::random_distances(n, gen);
    const SoftIndicator uniform{Matrix::Constant(n, n, 1.0 / n)};
    const LossBreakdown u = surrogate_loss(uniform, indicator_to_heatmap(uniform), d, 10.0, 10.0);
    uniform_worst = std::max({uniform_worst, std::abs(u.row_penalty), std::abs(u.self_loop - 1.0),
                              std::abs(u.expected_length - d.d.sum() / n)});
    const std::vector<City> q = random_permutation(n, gen);
    const SoftIndicator p = permutation_indicator(q);
    const LossBreakdown c = surrogate_loss(p, indicator_to_heatmap(p), d, 10.0, 10.0);
    cycle_worst = std::max(cycle_worst, std::abs(c.expected_length - tour_length(d, Tour(permutation_to_cycle(p)))));
  }
  return {uniform_worst <= 1e-12 && cycle_worst <= 1e-9,
          fmt("uniform max error %.3g, permutation max error %.3g", uniform_worst, cycle_worst)};
}

TrainConfig coverage_config() {
  TrainConfig cfg = TrainConfig::defaults_for(12);
  cfg.lambda2 = 1.0;
  return cfg;
}

Outcome search_space_reduction() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Instance> instances;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 50; ++s) {
    instances.push_back(generate_random(12, 1000 + s));
    seeds.push_back(s);
  }
  const int m = 5;
  const auto mean_eta = [](const std::vector<CoverageRow>& rows) {
    double sum = 0.0;
    for (const CoverageRow& r : rows) sum += r.eta;
    return sum / static_cast<double>(rows.size());
  };
  const auto optimized = coverage_report(instances, seeds, coverage_config(), m, HeatSource::kOptimized);
  const auto random = coverage_report(instances, seeds, coverage_config(), m, HeatSource::kRandomLogits);
  const auto with_defaults = coverage_report(instances, seeds, TrainConfig::defaults_for(12), m);
  bool bounded = true;
  bool exact = true;
  for (const auto* rows : {&optimized, &random, &with_defaults}) {
    for (const CoverageRow& r : *rows) {
      bounded = bounded && r.pi_size <= static_cast<std::size_t>(12 * m);
      exact = exact && r.exact_truth;
    }
  }
  const double opt = mean_eta(optimized);
  const double rnd = mean_eta(random);
  const double elapsed = seconds_since(start);
  return {opt > rnd && opt >= 0.85 && bounded && exact && elapsed < 300.0,
          fmt("lambda2=1: optimized eta %.4f vs random %.4f (default lambdas: %.4f), |Pi|<=nM %s, %.1f s", opt,
              rnd, mean_eta(with_defaults), bounded ? "yes" : "no", elapsed)};
}

SearchParams small_preset() {
  SearchParams p = search_preset("tsp20");
  p.time_limit = 2.0;
  p.max_rounds = 20;
  return p;
}

Outcome end_to_end_optimality() {
  const auto start = std::chrono::steady_clock::now();
  int optimal = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Instance inst = generate_random(10, 5000 + s);
    const PipelineResult r = solve_pipeline(inst, TrainConfig::defaults_for(10), small_preset(), s);
    if (std::abs(r.result.length - held_karp_exact(inst).length) <= 1e-9) ++optimal;
  }
  const double elapsed = seconds_since(start);
  return {optimal >= 95 && elapsed < 300.0, fmt("%d/100 optimal, %.1f s", optimal, elapsed)};
}

Outcome baseline_dominance() {
  int wins = 0;
  int wins_single = 0;
  double improvement = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Instance inst = generate_random(100, 7000 + s);
    SearchParams p = search_preset("tsp100");
    p.time_limit = 3.0;
    const PipelineResult r = solve_pipeline(inst, TrainConfig::defaults_for(100), p, s);
    const double budget = r.result.heatmap_seconds + r.result.search_seconds;
    const DistanceMatrix d = distance_matrix(inst);
    const TourSolution multi = nn_two_opt_multistart(d, s, budget);
    const TourSolution single = nn_two_opt_baseline(d, s);
    if (r.result.length <= multi.length) ++wins;
    if (r.result.length <= single.length) ++wins_single;
    improvement += (multi.length - r.result.length) / multi.length;
  }
  improvement = 100.0 * improvement / 30.0;
  return {wins >= 27 && improvement > 0.0,
          fmt("%d/30 wins vs equal-time multistart (%d/30 vs one run), mean improvement %.3f%%", wins,
              wins_single, improvement)};
}

Outcome kopt_integrity() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> size(5, 100);
  Rng rng(8);
  std::int64_t accepted = 0;
  int failures = 0;
  double worst = 0.0;
  while (accepted < 100000) {
    const int n = size(gen);
    const DistanceMatrix d = oracle::random_distances(n, gen);
    const Matrix h = oracle::random_matrix(n, n, gen, 0.0, 1.0);
    const PrunedHeatMap pruned = top_m_filter(HeatMap{h}, std::min(5, n - 1));
    const CandidateMode mode = accepted % 2 == 0 ? CandidateMode::kHeatMap : CandidateMode::kDistance;
    const CandidateLists cand = candidate_lists(pruned, d, std::min(5, n - 1), mode);
    SearchStats stats(n);
    Tour tour = random_tour(n, rng);
    double tracked = tour_length(d, tour);
    for (int misses = 0; misses < 50 && accepted < 100000;) {
      const auto action = construct_kopt_action(tour, d, cand, pruned.hp, stats, 0.0, 2 + static_cast<int>(rng.uniform_int(9)), rng);
      if (!action) {
        ++misses;
        continue;
      }
      ++accepted;
      const Tour next = apply_action(tour, *action);
      const Tour reported(action->result);
      const std::vector<Edge> removed = action->removed_edges();
      const std::vector<Edge> added = action->added_edges();
      const std::set<Edge> removed_set(removed.begin(), removed.end());
      bool disjoint = true;
      for (const Edge& e : added) disjoint = disjoint && !removed_set.contains(e);
      tracked -= action->gain;
      const double full = tour_length(d, next);
      worst = std::max(worst, std::abs(tracked - full));
      if (!next.consistent() || next.size() != n || tour_edges(next) != tour_edges(reported) || !disjoint ||
          std::abs(tracked - full) > 1e-8) {
        ++failures;
      }
      tour = next;
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 120.0,
          fmt("%lld actions, %d invalid, max drift %.3g, %.1f s", static_cast<long long>(accepted), failures, worst,
              elapsed)};
}

Outcome two_opt_fixpoint() {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> size(4, 50);
  int clean = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(gen);
    const DistanceMatrix d = oracle::random_distances(n, gen);
    const Tour t = two_opt_improve(d, random_tour(n, static_cast<std::uint64_t>(trial)));
    if (t.consistent() && !oracle::has_improving_two_opt(d, t, kImprovementEpsilon)) ++clean;
  }
  return {clean == 100, fmt("%d/100 tours are 2-opt local optima", clean)};
}

Outcome preset_fidelity() {
  struct Row {
    const char* name;
    double beta;
    int m, k_lo, k_hi, budget;
  };
  const Row table[] = {
      {"tsp20", 10, 8, 10, 11, 60},     {"tsp50", 10, 8, 5, 15, 150},
      {"tsp100", 10, 8, 5, 35, 300},    {"tsp200", 10, 8, 10, 90, 600},
      {"tsp500", 50, 5, 30, 130, 1000}, {"tsp1000", 50, 5, 10, 110, 2000},
  };
  int matched = 0;
  for (const Row& r : table) {
    const SearchParams p = search_preset(r.name);
    if (p.alpha == 0.0 && p.beta == r.beta && p.candidates == r.m && p.k_lo == r.k_lo && p.k_hi == r.k_hi &&
        p.expand_budget == r.budget) {
      ++matched;
    }
  }
  const bool six = search_preset_names().size() == 6;
  return {matched == 6 && six, fmt("%d/6 presets match", matched)};
}

Outcome heat_update() {
  const double inc = heat_increment(10.0, 9.0, 10.0);
  std::mt19937_64 gen(11);
  const int n = 30;
  const DistanceMatrix d = oracle::random_distances(n, gen);
  Matrix hp = top_m_filter(HeatMap{oracle::random_matrix(n, n, gen, 0.0, 1.0)}, 5).hp;
  const CandidateLists cand = distance_candidates(d, 8);
  SearchStats stats(n);
  Rng rng(11);
  std::uniform_real_distribution<double> len(1.0, 10.0);
  int updates = 0;
  bool symmetric = true;
  Tour tour = random_tour(n, rng);
  while (updates < 10000) {
    const auto action = construct_kopt_action(tour, d, cand, hp, stats, 0.0, 6, rng);
    if (!action) {
      tour = random_tour(n, rng);
      continue;
    }
    const double old_length = len(gen);
    update_heatmap(hp, *action, old_length, old_length * len(gen) / 10.0, 10.0);
    ++updates;
    symmetric = symmetric && hp == hp.transpose();
    tour = apply_action(tour, *action);
  }
  return {std::abs(inc - 1.0517091808) <= 1e-9 && symmetric,
          fmt("increment %.12f, symmetric after %d updates: %s", inc, updates, symmetric ? "yes" : "no")};
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < size; ++k) hash_ = (hash_ ^ p[k]) * 0x100000001b3ULL;
  }
  void text(const std::string& s) { bytes(s.data(), s.size()); }
  void number(double x) { bytes(&x, sizeof x); }
  void number(std::int64_t x) { bytes(&x, sizeof x); }
  void matrix(const Matrix& m) { bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size())); }
  void tour(const Tour& t) { bytes(t.order().data(), sizeof(City) * t.order().size()); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t full_run_hash() {
  Fnv1a h;
  const Instance inst = generate_random(30, 12);
  h.text(format_instance(inst));
  h.text(to_tsplib(inst));
  const DistanceMatrix d = distance_matrix(inst);
  h.matrix(d.d);
  h.matrix(adjacency_weights(d).w);
  TrainConfig cfg = TrainConfig::defaults_for(30);
  cfg.seed = 5;
  h.matrix(init_logits(30, cfg).s);
  const TrainResult trained = optimize_heatmap(inst, cfg);
  h.matrix(trained.logits.s);
  h.matrix(trained.heat.h);
  for (const LossBreakdown& l : trained.trace.steps) h.number(l.total);
  h.number(static_cast<std::int64_t>(trained.trace.returned_step));
  const PrunedHeatMap pruned = top_m_filter(trained.heat, 8);
  h.matrix(pruned.hp);
  for (auto mode : {CandidateMode::kHeatMap, CandidateMode::kDistance}) {
    const CandidateLists c = candidate_lists(pruned, d, 8, mode);
    h.bytes(c.flat.data(), sizeof(City) * c.flat.size());
  }
  SearchParams p = search_preset("tsp50");
  p.max_rounds = 5;
  const SearchResult searched = run_search(d, pruned, p, 21);
  h.tour(searched.tour);
  h.number(searched.stats.total_expansions);
  h.number(searched.stats.accepted_actions);
  h.number(searched.stats.best_length);
  for (double b : searched.stats.round_best) h.number(b);
  const PipelineResult piped = solve_pipeline(inst, cfg, p, 21);
  h.tour(piped.tour);
  h.number(piped.result.length);
  h.tour(nn_two_opt_baseline(d, 3).tour);
  h.tour(two_opt_improve(d, random_tour(30, 4)));
  const Instance small = generate_random(12, 13);
  h.tour(held_karp_exact(small).tour);
  std::vector<Instance> insts{small};
  const std::vector<std::uint64_t> seeds{6};
  h.text(coverage_csv(coverage_report(insts, seeds, cfg, 5)));
  h.text(coverage_csv(coverage_report(insts, seeds, cfg, 5, HeatSource::kRandomLogits)));
  BenchResult row = piped.result;
  row.heatmap_seconds = 0.0;
  row.search_seconds = 0.0;
  h.text(bench_csv(std::vector<BenchResult>{row}));
  h.text(format_tour(piped.tour, piped.result.length));
  h.text(tour_svg(inst, piped.tour));
  return h.value();
}

Outcome determinism() {
  const std::uint64_t a = full_run_hash();
  const std::uint64_t b = full_run_hash();
  return {a == b, fmt("hashes %016llx %016llx", static_cast<unsigned long long>(a), static_cast<unsigned long long>(b))};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"hamiltonian-cycles", hamiltonian_cycles},
      {"loss-form-equivalence", loss_forms},
      {"gradient-finite-differences", gradient_check},
      {"closed-form-losses", closed_forms},
      {"search-space-reduction", search_space_reduction},
      {"end-to-end-optimality", end_to_end_optimality},
      {"baseline-dominance", baseline_dominance},
      {"kopt-integrity", kopt_integrity},
      {"two-opt-fixpoint", two_opt_fixpoint},
      {"preset-fidelity", preset_fidelity},
      {"heat-update", heat_update},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
