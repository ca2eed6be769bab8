#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "utsp/edge_candidates.hpp"
#include "utsp/instance.hpp"
#include "utsp/rng.hpp"

namespace utsp {

/// Minimum gain for a move to count as an improvement; absorbs rounding in
/// length deltas so that search and 2-opt never cycle on ties.
inline constexpr double kImprovementEpsilon = 1e-10;

/// Floor applied to every selection weight.
inline constexpr double kSelectionFloor = 1e-12;

struct SearchParams {
  double alpha = 0.0;       // exploration weight
  double beta = 10.0;       // heat-map reward scale
  int candidates = 8;       // M, candidate-list length
  int k_lo = 10;            // max removed edges K is drawn from [k_lo, k_hi)
  int k_hi = 11;
  int expand_budget = 60;   // action attempts per search node
  double time_limit = 0.0;  // seconds; 0 disables the wall-clock limit
  int max_rounds = 0;       // 0 disables the round cap

  /// Throws std::invalid_argument on out-of-range fields, including when
  /// neither a time limit nor a round cap is set.
  void validate() const;
};

/// Named configurations: tsp20, tsp50, tsp100, tsp200, tsp500, tsp1000.
/// Budgets are left unset. Throws std::invalid_argument for unknown names.
SearchParams search_preset(std::string_view name);
std::span<const std::string_view> search_preset_names();

/// Symmetric counter over unordered city pairs.
class EdgeCounter {
 public:
  explicit EdgeCounter(int n = 0)
      : n_(n), counts_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

  std::uint32_t operator()(City u, City v) const { return counts_[index(u, v)]; }
  void increment(City u, City v) {
    ++counts_[index(u, v)];
    if (u != v) ++counts_[index(v, u)];
  }
  int size() const noexcept { return n_; }

 private:
  std::size_t index(City u, City v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  int n_;
  std::vector<std::uint32_t> counts_;
};

struct SearchStats {
  explicit SearchStats(int n = 0) : edge_use_counts(n) {}

  EdgeCounter edge_use_counts;          // N: selections of each edge
  std::int64_t total_expansions = 0;    // S: action constructions attempted
  int rounds = 0;
  std::int64_t accepted_actions = 0;
  double best_length = 0.0;
  std::optional<Tour> best_tour;
  double first_round_initial_length = 0.0;  // length after the first 2-opt descent
  std::vector<double> round_best;           // best-so-far after each round
  double max_heat = 0.0;                    // largest pruned heat value at the end
};

/// Sequential k-opt move u1 v1 u2 v2 ... uk vk (v_{k+1} = u1). Removes
/// (u_i, v_i) and adds (v_i, u_{i+1}).
struct KOptAction {
  std::vector<City> sequence;  // u1, v1, u2, v2, ..., uk, vk
  double gain = 0.0;           // removed length minus added length
  std::vector<City> result;    // visiting order after the move

  int k() const noexcept { return static_cast<int>(sequence.size() / 2); }
  City u(int i) const { return sequence[static_cast<std::size_t>(2 * i)]; }
  City v(int i) const { return sequence[static_cast<std::size_t>(2 * i + 1)]; }
  std::vector<Edge> removed_edges() const;
  std::vector<Edge> added_edges() const;
};

/// Uniform random permutation of 0..n-1 by Fisher-Yates shuffle.
Tour random_tour(int n, Rng& rng);
Tour random_tour(int n, std::uint64_t seed);

/// First-improvement 2-opt until no move gains more than kImprovementEpsilon.
Tour two_opt_improve(const DistanceMatrix& dist, Tour tour);

/// Selection likelihood L(u, v) = hp(u, v) + alpha * sqrt(log(S + 1) / (N(u, v) + 1)).
double selection_likelihood(City u, City v, const Matrix& hp, const SearchStats& stats,
                            double alpha);

/// Samples v from u's candidates, skipping `excluded`, with probability
/// proportional to max(L(u, v), kSelectionFloor). Returns nullopt when no
/// candidate is feasible. Does not touch the statistics.
std::optional<City> select_next_city(City u, const CandidateLists& cand, const Matrix& hp,
                                     const SearchStats& stats, double alpha, Rng& rng,
                                     std::span<const City> excluded = {});

/// One attempt at building an improving sequential move with at most
/// `max_k` removed edges. Counts the attempt in stats.total_expansions and
/// every edge selection in stats.edge_use_counts. Returns nullopt when the
/// attempt is discarded (dead end or max_k reached without improvement).
std::optional<KOptAction> construct_kopt_action(const Tour& tour, const DistanceMatrix& dist,
                                                const CandidateLists& cand, const Matrix& hp,
                                                SearchStats& stats, double alpha, int max_k,
                                                Rng& rng);

/// Rebuilds a tour from its edge set after the move's edge exchange. Throws
/// std::invalid_argument when the exchange does not produce a single cycle.
Tour apply_action(const Tour& tour, const KOptAction& action);

using SearchClock = std::chrono::steady_clock;

/// Tries up to params.expand_budget constructions from `tour` and returns the
/// highest-gain improving action, or nullopt. Stops early at `deadline`.
std::optional<KOptAction> expand_node(const Tour& tour, const DistanceMatrix& dist,
                                      const CandidateLists& cand, const Matrix& hp,
                                      SearchStats& stats, const SearchParams& params, int max_k,
                                      Rng& rng,
                                      std::optional<SearchClock::time_point> deadline = {});

/// beta * (exp((old_length - new_length) / old_length) - 1), or 0 when the
/// move does not improve.
double heat_increment(double old_length, double new_length, double beta);

/// Adds heat_increment to both orientations of every added edge of the action.
void update_heatmap(Matrix& hp, const KOptAction& action, double old_length, double new_length,
                    double beta);

struct SearchResult {
  Tour tour;
  SearchStats stats;
};

/// Randomised restarts of heat-map-guided best-first k-opt search. Works on
/// a private copy of the pruned heat map, which accumulates rewards across
/// rounds. Each round draws K from [k_lo, k_hi) and the candidate mode
/// uniformly, then descends from a 2-opt-improved random tour.
SearchResult run_search(const DistanceMatrix& dist, const PrunedHeatMap& pruned,
                        const SearchParams& params, std::uint64_t seed);

}  // namespace utsp
