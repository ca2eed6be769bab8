#include "utsp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "utsp/io.hpp"

namespace utsp {

namespace {

double seconds_since(SearchClock::time_point start) {
  return std::chrono::duration<double>(SearchClock::now() - start).count();
}

Tour nearest_neighbour_tour(const DistanceMatrix& dist, City start) {
  const int n = dist.size();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<City> order;
  order.reserve(static_cast<std::size_t>(n));
  City current = start;
  visited[static_cast<std::size_t>(current)] = 1;
  order.push_back(current);
  for (int step = 1; step < n; ++step) {
    City best = -1;
    for (City c = 0; c < n; ++c) {
      if (visited[static_cast<std::size_t>(c)]) continue;
      if (best < 0 || dist(current, c) < dist(current, best)) best = c;
    }
    visited[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    current = best;
  }
  return Tour(std::move(order));
}

TourSolution nn_two_opt_from(const DistanceMatrix& dist, City start) {
  Tour tour = two_opt_improve(dist, nearest_neighbour_tour(dist, start));
  const double length = tour_length(dist, tour);
  return TourSolution{std::move(tour), length};
}

// Best of nearest neighbour + 2-opt over min(n, 50) start cities.
TourSolution proxy_optimum(const DistanceMatrix& dist) {
  const int starts = std::min(dist.size(), 50);
  TourSolution best = nn_two_opt_from(dist, 0);
  for (City s = 1; s < starts; ++s) {
    TourSolution candidate = nn_two_opt_from(dist, s);
    if (candidate.length < best.length) best = std::move(candidate);
  }
  return best;
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

TourSolution held_karp_exact(const DistanceMatrix& dist) {
  const int n = dist.size();
  if (n > kHeldKarpMaxCities) {
    throw std::invalid_argument("held_karp_exact: n = " + std::to_string(n) +
                                " exceeds the exact-solver limit of " +
                                std::to_string(kHeldKarpMaxCities) + " cities");
  }
  if (n < Instance::kMinCities) throw std::invalid_argument("held_karp_exact: need at least 3 cities");

  // City 0 is fixed as the start; subsets range over cities 1..n-1.
  const int m = n - 1;
  const std::size_t subsets = std::size_t{1} << m;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(subsets * static_cast<std::size_t>(m), kInf);
  std::vector<std::int8_t> parent(subsets * static_cast<std::size_t>(m), -1);
  auto at = [m](std::size_t mask, int last) { return mask * static_cast<std::size_t>(m) + static_cast<std::size_t>(last); };

  for (int j = 0; j < m; ++j) cost[at(std::size_t{1} << j, j)] = dist(0, j + 1);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    for (int last = 0; last < m; ++last) {
      if (!(mask & (std::size_t{1} << last))) continue;
      const double base = cost[at(mask, last)];
      if (base == kInf) continue;
      for (int next = 0; next < m; ++next) {
        const std::size_t bit = std::size_t{1} << next;
        if (mask & bit) continue;
        const double value = base + dist(last + 1, next + 1);
        double& slot = cost[at(mask | bit, next)];
        if (value < slot) {
          slot = value;
          parent[at(mask | bit, next)] = static_cast<std::int8_t>(last);
        }
      }
    }
  }

  const std::size_t full = subsets - 1;
  int last = 0;
  double best = kInf;
  for (int j = 0; j < m; ++j) {
    const double value = cost[at(full, j)] + dist(j + 1, 0);
    if (value < best) {
      best = value;
      last = j;
    }
  }

  std::vector<City> order(static_cast<std::size_t>(n));
  order[0] = 0;
  std::size_t mask = full;
  for (int pos = n - 1; pos >= 1; --pos) {
    order[static_cast<std::size_t>(pos)] = last + 1;
    const int prev = parent[at(mask, last)];
    mask &= ~(std::size_t{1} << last);
    last = prev;
  }
  Tour tour(std::move(order));
  const double length = tour_length(dist, tour);
  return TourSolution{std::move(tour), length};
}

TourSolution held_karp_exact(const Instance& inst) { return held_karp_exact(distance_matrix(inst)); }

TourSolution nn_two_opt_baseline(const DistanceMatrix& dist, std::uint64_t seed) {
  Rng rng(seed);
  const auto start = static_cast<City>(rng.uniform_int(static_cast<std::uint64_t>(dist.size())));
  return nn_two_opt_from(dist, start);
}

TourSolution nn_two_opt_multistart(const DistanceMatrix& dist, std::uint64_t seed, double seconds) {
  const auto start = SearchClock::now();
  TourSolution best = nn_two_opt_baseline(dist, derive_seed(seed, 0));
  for (std::uint64_t k = 1; seconds_since(start) < seconds; ++k) {
    TourSolution candidate = nn_two_opt_baseline(dist, derive_seed(seed, k));
    if (candidate.length < best.length) best = std::move(candidate);
  }
  return best;
}

double gap_percent(double length, double reference) {
  if (!(reference > 0.0)) throw std::invalid_argument("gap_percent: reference length must be positive");
  return 100.0 * (length - reference) / reference;
}

PipelineResult solve_pipeline(const Instance& inst, const TrainConfig& train,
                              const SearchParams& params, std::uint64_t seed) {
  train.validate();
  params.validate();
  const DistanceMatrix dist = distance_matrix(inst);

  const auto t0 = SearchClock::now();
  TrainResult trained = optimize_heatmap(dist, train);
  const PrunedHeatMap pruned = top_m_filter(trained.heat, std::min(params.candidates, inst.size() - 1));
  const double heat_seconds = seconds_since(t0);

  const auto t1 = SearchClock::now();
  SearchResult search = run_search(dist, pruned, params, seed);
  const double search_seconds = seconds_since(t1);

  BenchResult result;
  result.instance = inst.name();
  result.method = "utsp";
  result.length = tour_length(dist, search.tour);
  result.heatmap_seconds = heat_seconds;
  result.search_seconds = search_seconds;
  result.seed = seed;
  return PipelineResult{std::move(result), std::move(search.tour), std::move(search.stats),
                        std::move(trained.trace)};
}

std::vector<CoverageRow> coverage_report(std::span<const Instance> instances,
                                         std::span<const std::uint64_t> seeds,
                                         const TrainConfig& train, int m, HeatSource source) {
  if (seeds.size() != instances.size()) {
    throw std::invalid_argument("coverage_report: one seed per instance is required");
  }
  std::vector<CoverageRow> rows;
  rows.reserve(instances.size());
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const Instance& inst = instances[k];
    const DistanceMatrix dist = distance_matrix(inst);
    TrainConfig cfg = train;
    cfg.seed = seeds[k];

    HeatMap heat;
    if (source == HeatSource::kOptimized) {
      heat = optimize_heatmap(dist, cfg).heat;
    } else {
      heat = indicator_to_heatmap(column_softmax(init_logits(inst.size(), cfg)));
    }
    const EdgeSet pi = edge_set(top_m_filter(heat, m));

    const bool exact = inst.size() <= kHeldKarpMaxCities;
    const TourSolution truth = exact ? held_karp_exact(dist) : proxy_optimum(dist);
    const EdgeSet gamma = tour_edges(truth.tour);

    CoverageRow row;
    row.instance = inst.name();
    row.seed = seeds[k];
    row.m = m;
    row.eta = overlap_coefficient(pi, gamma);
    row.pi_size = pi.size();
    row.fully_covered = pi.intersection_size(gamma) == gamma.size();
    row.exact_truth = exact;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string coverage_csv(std::span<const CoverageRow> rows) {
  std::string out = "instance,seed,M,eta,pi_size,fully_covered\n";
  for (const CoverageRow& r : rows) {
    out += r.instance + (r.exact_truth ? "" : " (proxy)") + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.m) + ',' + format_double(r.eta) + ',' + std::to_string(r.pi_size) + ',' +
           (r.fully_covered ? "true" : "false") + '\n';
  }
  return out;
}

std::string bench_csv(std::span<const BenchResult> rows) {
  std::string out = "instance,method,length,gap_percent,heatmap_seconds,search_seconds,seed\n";
  for (const BenchResult& r : rows) {
    out += r.instance + ',' + r.method + ',' + format_double(r.length) + ',' +
           (r.gap_percent ? format_double(*r.gap_percent) : std::string()) + ',' +
           format_double(r.heatmap_seconds) + ',' + format_double(r.search_seconds) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string tour_svg(const Instance& inst, const Tour& tour) {
  if (tour.size() != inst.size()) throw std::invalid_argument("tour_svg: tour and instance sizes differ");
  double min_x = inst[0].x, max_x = inst[0].x, min_y = inst[0].y, max_y = inst[0].y;
  for (const Point& p : inst.coords()) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  constexpr double kSize = 500.0;
  constexpr double kMargin = 10.0;
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  const double scale = (kSize - 2.0 * kMargin) / span;
  auto sx = [&](double x) { return fixed(kMargin + (x - min_x) * scale, 3); };
  // SVG y grows downwards.
  auto sy = [&](double y) { return fixed(kSize - kMargin - (y - min_y) * scale, 3); };

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
  out += "<rect width=\"500\" height=\"500\" fill=\"white\"/>\n";
  out += "<g stroke=\"#1f77b4\" stroke-width=\"1.5\">\n";
  for (int k = 0; k < tour.size(); ++k) {
    const Point& a = inst[tour[k]];
    const Point& b = inst[tour[(k + 1) % tour.size()]];
    out += "<line x1=\"" + sx(a.x) + "\" y1=\"" + sy(a.y) + "\" x2=\"" + sx(b.x) + "\" y2=\"" + sy(b.y) +
           "\"/>\n";
  }
  out += "</g>\n<g fill=\"#d62728\">\n";
  for (const Point& p : inst.coords()) {
    out += "<circle cx=\"" + sx(p.x) + "\" cy=\"" + sy(p.y) + "\" r=\"3\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

void emit_tour_svg(const Instance& inst, const Tour& tour, const std::filesystem::path& path) {
  write_text_file(path, tour_svg(inst, tour));
}

}  // namespace utsp
