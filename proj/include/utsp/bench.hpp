#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "utsp/edge_candidates.hpp"
#include "utsp/heatmap_generator.hpp"
#include "utsp/instance.hpp"
#include "utsp/local_search.hpp"

namespace utsp {

struct TourSolution {
  Tour tour;
  double length = 0.0;
};

/// Largest instance accepted by held_karp_exact.
inline constexpr int kHeldKarpMaxCities = 18;

/// Optimal tour by bitmask dynamic programming over subsets, O(n^2 2^n).
/// Throws std::invalid_argument for n > kHeldKarpMaxCities.
TourSolution held_karp_exact(const DistanceMatrix& dist);
TourSolution held_karp_exact(const Instance& inst);

/// Nearest-neighbour construction from a random start city (ties to the
/// smaller index), followed by two_opt_improve.
TourSolution nn_two_opt_baseline(const DistanceMatrix& dist, std::uint64_t seed);

/// Repeats nn_two_opt_baseline with fresh start cities until `seconds`
/// elapse (at least once) and keeps the shortest tour.
TourSolution nn_two_opt_multistart(const DistanceMatrix& dist, std::uint64_t seed, double seconds);

/// 100 * (length - reference) / reference.
double gap_percent(double length, double reference);

struct BenchResult {
  std::string instance;
  std::string method;
  double length = 0.0;
  std::optional<double> gap_percent;  // set once a reference length is known
  double heatmap_seconds = 0.0;
  double search_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  BenchResult result;
  Tour tour;
  SearchStats stats;
  TrainTrace trace;
};

/// Heat-map optimisation, top-M pruning, then run_search with `seed`.
/// Pruning uses params.candidates (clamped to n-1).
PipelineResult solve_pipeline(const Instance& inst, const TrainConfig& train,
                              const SearchParams& params, std::uint64_t seed);

enum class HeatSource {
  kOptimized,     // after optimize_heatmap
  kRandomLogits,  // heat map of the initial random logits
};

struct CoverageRow {
  std::string instance;
  std::uint64_t seed = 0;
  int m = 0;
  double eta = 0.0;
  std::size_t pi_size = 0;
  bool fully_covered = false;
  bool exact_truth = true;  // false when truth is a heuristic "proxy" tour
};

/// Edge coverage of pruned heat maps against the optimal tour (Held-Karp up
/// to kHeldKarpMaxCities, otherwise a multi-start 2-opt proxy). Instance k is
/// trained with seed seeds[k].
std::vector<CoverageRow> coverage_report(std::span<const Instance> instances,
                                         std::span<const std::uint64_t> seeds,
                                         const TrainConfig& train, int m,
                                         HeatSource source = HeatSource::kOptimized);

/// `instance,seed,M,eta,pi_size,fully_covered`
std::string coverage_csv(std::span<const CoverageRow> rows);

/// `instance,method,length,gap_percent,heatmap_seconds,search_seconds,seed`
std::string bench_csv(std::span<const BenchResult> rows);

/// Standalone SVG of the instance with one circle per city and one line per
/// tour edge. Output depends only on the inputs.
std::string tour_svg(const Instance& inst, const Tour& tour);
void emit_tour_svg(const Instance& inst, const Tour& tour, const std::filesystem::path& path);

}  // namespace utsp
