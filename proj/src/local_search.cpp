#include "utsp/local_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace utsp {

void SearchParams::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("SearchParams: alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("SearchParams: beta must be >= 0");
  if (candidates < 1) throw std::invalid_argument("SearchParams: candidates (M) must be >= 1");
  if (k_lo < 2 || k_hi <= k_lo) {
    throw std::invalid_argument("SearchParams: K range must satisfy 2 <= k_lo < k_hi");
  }
  if (expand_budget < 1) throw std::invalid_argument("SearchParams: expand_budget must be >= 1");
  if (!(time_limit >= 0.0) || max_rounds < 0) {
    throw std::invalid_argument("SearchParams: budget values must be positive");
  }
  if (time_limit == 0.0 && max_rounds == 0) {
    throw std::invalid_argument("SearchParams: set a time limit and/or a round cap");
  }
}

namespace {

struct PresetRow {
  std::string_view name;
  double alpha;
  double beta;
  int m;
  int k_lo;
  int k_hi;
  int expand_budget;
};

// alpha, beta, M, K range [lo, hi), expansion budget. A fixed K is [K, K+1).
constexpr std::array<PresetRow, 6> kPresets{{
    {"tsp20", 0.0, 10.0, 8, 10, 11, 60},
    {"tsp50", 0.0, 10.0, 8, 5, 15, 150},
    {"tsp100", 0.0, 10.0, 8, 5, 35, 300},
    {"tsp200", 0.0, 10.0, 8, 10, 90, 600},
    {"tsp500", 0.0, 50.0, 5, 30, 130, 1000},
    {"tsp1000", 0.0, 50.0, 5, 10, 110, 2000},
}};

constexpr std::array<std::string_view, 6> kPresetNames{"tsp20",  "tsp50",  "tsp100",
                                                       "tsp200", "tsp500", "tsp1000"};

}  // namespace

SearchParams search_preset(std::string_view name) {
  for (const PresetRow& row : kPresets) {
    if (row.name != name) continue;
    SearchParams p;
    p.alpha = row.alpha;
    p.beta = row.beta;
    p.candidates = row.m;
    p.k_lo = row.k_lo;
    p.k_hi = row.k_hi;
    p.expand_budget = row.expand_budget;
    return p;
  }
  throw std::invalid_argument("unknown search preset '" + std::string(name) + "'");
}

std::span<const std::string_view> search_preset_names() { return kPresetNames; }

std::vector<Edge> KOptAction::removed_edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < k(); ++i) out.push_back(Edge::of(u(i), v(i)));
  return out;
}

std::vector<Edge> KOptAction::added_edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < k(); ++i) out.push_back(Edge::of(v(i), u((i + 1) % k())));
  return out;
}

Tour random_tour(int n, Rng& rng) {
  Tour identity = Tour::identity(n);
  std::vector<City> order(identity.order().begin(), identity.order().end());
  rng.shuffle(std::span<City>(order));
  return Tour(std::move(order));
}

Tour random_tour(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_tour(n, rng);
}

Tour two_opt_improve(const DistanceMatrix& dist, Tour tour) {
  const int n = tour.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i + 2 < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // the two edges share city tour[0]
        const City a = tour[i];
        const City b = tour[i + 1];
        const City c = tour[j];
        const City d = tour[(j + 1) % n];
        const double delta = dist(a, c) + dist(b, d) - dist(a, b) - dist(c, d);
        if (delta < -kImprovementEpsilon) {
          tour.reverse(i + 1, j);
          improved = true;
        }
      }
    }
  }
  return tour;
}

double selection_likelihood(City u, City v, const Matrix& hp, const SearchStats& stats,
                            double alpha) {
  double likelihood = hp(u, v);
  if (alpha != 0.0) {
    const double explored = std::log(static_cast<double>(stats.total_expansions) + 1.0);
    likelihood += alpha * std::sqrt(explored / (static_cast<double>(stats.edge_use_counts(u, v)) + 1.0));
  }
  return likelihood;
}

std::optional<City> select_next_city(City u, const CandidateLists& cand, const Matrix& hp,
                                     const SearchStats& stats, double alpha, Rng& rng,
                                     std::span<const City> excluded) {
  const auto options = cand.of(u);
  // Candidate lists are short (M <= a few dozen), so a stack buffer suffices
  // for the common case.
  std::array<double, 64> small_weights{};
  std::vector<double> large_weights;
  double* weights = small_weights.data();
  if (options.size() > small_weights.size()) {
    large_weights.resize(options.size());
    weights = large_weights.data();
  }

  double total = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < options.size(); ++k) {
    const City v = options[k];
    if (std::find(excluded.begin(), excluded.end(), v) != excluded.end()) {
      weights[k] = 0.0;
      continue;
    }
    weights[k] = std::max(selection_likelihood(u, v, hp, stats, alpha), kSelectionFloor);
    total += weights[k];
    any = true;
  }
  if (!any) return std::nullopt;

  const double target = rng.uniform01() * total;
  double running = 0.0;
  std::optional<City> last;
  for (std::size_t k = 0; k < options.size(); ++k) {
    if (weights[k] == 0.0) continue;
    running += weights[k];
    last = options[k];
    if (target < running) return options[k];
  }
  return last;
}

namespace {

bool has_edge(const std::vector<Edge>& edges, Edge e) {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

}  // namespace

std::optional<KOptAction> construct_kopt_action(const Tour& tour, const DistanceMatrix& dist,
                                                const CandidateLists& cand, const Matrix& hp,
                                                SearchStats& stats, double alpha, int max_k,
                                                Rng& rng) {
  const int n = tour.size();
  ++stats.total_expansions;

  const auto u1 = static_cast<City>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  const City v1 = tour.next(u1);

  // Hamiltonian path left after removing (u1, v1), written from the fixed
  // end u1 (index 0) to the moving end (index n-1).
  std::vector<City> path(static_cast<std::size_t>(n));
  std::vector<int> pos(static_cast<std::size_t>(n));
  const int start = tour.position(u1);
  for (int k = 0; k < n; ++k) {
    const City c = tour[(start - k + n) % n];
    path[static_cast<std::size_t>(k)] = c;
    pos[static_cast<std::size_t>(c)] = k;
  }

  KOptAction action;
  action.sequence = {u1, v1};
  double gain = dist(u1, v1);
  std::vector<Edge> removed{Edge::of(u1, v1)};
  std::vector<Edge> added;
  std::vector<City> excluded;

  for (int removed_count = 1;; ++removed_count) {
    const City moving = path.back();
    if (removed_count >= 2) {
      const double closing_gain = gain - dist(moving, u1);
      if (closing_gain > kImprovementEpsilon && !has_edge(removed, Edge::of(moving, u1))) {
        action.gain = closing_gain;
        action.result = std::move(path);
        return action;
      }
    }
    if (removed_count >= max_k) return std::nullopt;

    // Infeasible next cities: the fixed end, the moving end's path neighbour,
    // cities whose edge to the moving end was already removed, and cities
    // whose forward path edge was added by this action.
    excluded.clear();
    excluded.push_back(u1);
    excluded.push_back(path[static_cast<std::size_t>(n - 2)]);
    for (const Edge& e : removed) {
      if (e.a == moving) excluded.push_back(e.b);
      if (e.b == moving) excluded.push_back(e.a);
    }
    for (const Edge& e : added) {
      excluded.push_back(pos[static_cast<std::size_t>(e.a)] < pos[static_cast<std::size_t>(e.b)] ? e.a
                                                                                              : e.b);
    }

    const auto chosen = select_next_city(moving, cand, hp, stats, alpha, rng, excluded);
    if (!chosen) return std::nullopt;
    const City next_u = *chosen;
    stats.edge_use_counts.increment(moving, next_u);

    // Joining the moving end to path[j] forces removal of (path[j], path[j+1]);
    // the suffix is reversed so path[j+1] becomes the new moving end.
    const int j = pos[static_cast<std::size_t>(next_u)];
    const City next_v = path[static_cast<std::size_t>(j + 1)];
    gain += dist(next_u, next_v) - dist(moving, next_u);
    added.push_back(Edge::of(moving, next_u));
    removed.push_back(Edge::of(next_u, next_v));
    std::reverse(path.begin() + j + 1, path.end());
    for (int k = j + 1; k < n; ++k) pos[static_cast<std::size_t>(path[static_cast<std::size_t>(k)])] = k;
    action.sequence.push_back(next_u);
    action.sequence.push_back(next_v);
  }
}

Tour apply_action(const Tour& tour, const KOptAction& action) {
  const int n = tour.size();
  std::vector<std::array<City, 2>> adj(static_cast<std::size_t>(n));
  for (City c = 0; c < n; ++c) adj[static_cast<std::size_t>(c)] = {tour.prev(c), tour.next(c)};

  auto detach = [&](City a, City b) {
    auto& slots = adj[static_cast<std::size_t>(a)];
    if (slots[0] == b) {
      slots[0] = -1;
    } else if (slots[1] == b) {
      slots[1] = -1;
    } else {
      throw std::invalid_argument("apply_action: removed edge is not in the tour");
    }
  };
  auto attach = [&](City a, City b) {
    auto& slots = adj[static_cast<std::size_t>(a)];
    if (slots[0] == -1) {
      slots[0] = b;
    } else if (slots[1] == -1) {
      slots[1] = b;
    } else {
      throw std::invalid_argument("apply_action: city would get degree > 2");
    }
  };

  for (const Edge& e : action.removed_edges()) {
    detach(e.a, e.b);
    detach(e.b, e.a);
  }
  for (const Edge& e : action.added_edges()) {
    attach(e.a, e.b);
    attach(e.b, e.a);
  }

  std::vector<City> order;
  order.reserve(static_cast<std::size_t>(n));
  City prev = -1;
  City cur = 0;
  for (int step = 0; step < n; ++step) {
    if (step > 0 && cur == 0) break;
    order.push_back(cur);
    const auto& slots = adj[static_cast<std::size_t>(cur)];
    if (slots[0] == -1 || slots[1] == -1) {
      throw std::invalid_argument("apply_action: edge exchange leaves a city with degree < 2");
    }
    const City next = slots[0] != prev ? slots[0] : slots[1];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != n || cur != 0) {
    throw std::invalid_argument("apply_action: edge exchange splits the tour into sub-tours");
  }
  return Tour(std::move(order));
}

std::optional<KOptAction> expand_node(const Tour& tour, const DistanceMatrix& dist,
                                      const CandidateLists& cand, const Matrix& hp,
                                      SearchStats& stats, const SearchParams& params, int max_k,
                                      Rng& rng, std::optional<SearchClock::time_point> deadline) {
  std::optional<KOptAction> best;
  for (int attempt = 0; attempt < params.expand_budget; ++attempt) {
    if (deadline && SearchClock::now() >= *deadline) break;
    auto action = construct_kopt_action(tour, dist, cand, hp, stats, params.alpha, max_k, rng);
    if (action && (!best || action->gain > best->gain)) best = std::move(action);
  }
  return best;
}

double heat_increment(double old_length, double new_length, double beta) {
  if (!(new_length < old_length)) return 0.0;
  return beta * (std::exp((old_length - new_length) / old_length) - 1.0);
}

void update_heatmap(Matrix& hp, const KOptAction& action, double old_length, double new_length,
                    double beta) {
  const double increment = heat_increment(old_length, new_length, beta);
  if (increment == 0.0) return;
  for (const Edge& e : action.added_edges()) {
    hp(e.a, e.b) += increment;
    hp(e.b, e.a) += increment;
  }
}

SearchResult run_search(const DistanceMatrix& dist, const PrunedHeatMap& pruned,
                        const SearchParams& params, std::uint64_t seed) {
  params.validate();
  const int n = dist.size();
  if (pruned.size() != n) {
    throw std::invalid_argument("run_search: heat map and distance matrix sizes differ");
  }
  const int m = std::min(params.candidates, n - 1);

  Matrix hp = pruned.hp;
  Rng rng(seed);
  SearchStats stats(n);
  std::optional<SearchClock::time_point> deadline;
  if (params.time_limit > 0.0) {
    deadline = SearchClock::now() + std::chrono::duration_cast<SearchClock::duration>(
                                        std::chrono::duration<double>(params.time_limit));
  }

  std::optional<Tour> best;
  double best_length = 0.0;
  for (int round = 0; params.max_rounds == 0 || round < params.max_rounds; ++round) {
    const int max_k =
        params.k_lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(params.k_hi - params.k_lo)));
    const CandidateMode mode = rng.uniform_int(2) == 0 ? CandidateMode::kHeatMap : CandidateMode::kDistance;
    const CandidateLists cand = mode == CandidateMode::kHeatMap ? heat_candidates(hp, m)
                                                               : distance_candidates(dist, m);

    Tour current = two_opt_improve(dist, random_tour(n, rng));
    double length = tour_length(dist, current);
    if (round == 0) stats.first_round_initial_length = length;

    while (auto action = expand_node(current, dist, cand, hp, stats, params, max_k, rng, deadline)) {
      const double next_length = length - action->gain;
      update_heatmap(hp, *action, length, next_length, params.beta);
      current = Tour(std::move(action->result));
      length = next_length;
      ++stats.accepted_actions;
    }
    length = tour_length(dist, current);  // drop accumulated rounding from the deltas

    ++stats.rounds;
    if (!best || length < best_length) {
      best = current;
      best_length = length;
    }
    stats.round_best.push_back(best_length);
    if (deadline && SearchClock::now() >= *deadline) break;
  }

  stats.best_length = best_length;
  stats.best_tour = best;
  stats.max_heat = hp.maxCoeff();
  return SearchResult{std::move(*best), std::move(stats)};
}

}  // namespace utsp
