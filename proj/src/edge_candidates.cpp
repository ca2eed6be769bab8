#include "utsp/edge_candidates.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace utsp {

namespace {

void require_m(int m, int n, const char* what) {
  if (m < 1 || m > n - 1) {
    throw std::invalid_argument(std::string(what) + ": M must be in [1, " + std::to_string(n - 1) +
                                "], got " + std::to_string(m));
  }
}

// The m off-diagonal columns of row i that come first under `before`.
template <class Before>
void rank_row(int n, int i, int m, Before before, std::vector<City>& scratch, City* out) {
  scratch.clear();
  for (City j = 0; j < n; ++j) {
    if (j != i) scratch.push_back(j);
  }
  std::partial_sort(scratch.begin(), scratch.begin() + m, scratch.end(), before);
  std::copy_n(scratch.begin(), m, out);
}

}  // namespace

PrunedHeatMap top_m_filter(const HeatMap& heat, int m) {
  const int n = heat.size();
  if (heat.h.cols() != n) throw std::invalid_argument("top_m_filter: heat map must be square");
  require_m(m, n, "top_m_filter");

  PrunedHeatMap out{Matrix::Zero(n, n), Matrix()};
  std::vector<City> scratch;
  std::vector<City> kept(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    const auto row = heat.h.row(i);
    rank_row(n, i, m,
             [&](City a, City b) { return row(a) > row(b) || (row(a) == row(b) && a < b); },
             scratch, kept.data());
    for (City j : kept) out.filtered(i, j) = heat.h(i, j);
  }
  out.hp = out.filtered + out.filtered.transpose();
  return out;
}

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.a >= e.b) throw std::invalid_argument("EdgeSet: edges must satisfy a < b");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(Edge e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

std::size_t EdgeSet::intersection_size(const EdgeSet& other) const {
  std::size_t count = 0;
  auto a = edges_.begin();
  auto b = other.edges_.begin();
  while (a != edges_.end() && b != other.edges_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

EdgeSet edge_set(const PrunedHeatMap& pruned) {
  std::vector<Edge> edges;
  const int n = pruned.size();
  for (City i = 0; i < n; ++i) {
    for (City j = i + 1; j < n; ++j) {
      if (pruned.hp(i, j) > 0.0) edges.push_back({i, j});
    }
  }
  return EdgeSet(std::move(edges));
}

EdgeSet tour_edges(const Tour& tour) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(tour.size()));
  for (int k = 0; k < tour.size(); ++k) {
    edges.push_back(Edge::of(tour[k], tour[(k + 1) % tour.size()]));
  }
  return EdgeSet(std::move(edges));
}

double overlap_coefficient(const EdgeSet& pred, const EdgeSet& truth) {
  if (truth.empty()) throw std::invalid_argument("overlap_coefficient: empty ground-truth set");
  return static_cast<double>(truth.intersection_size(pred)) / static_cast<double>(truth.size());
}

CandidateLists heat_candidates(const Matrix& hp, int m) {
  const int n = static_cast<int>(hp.rows());
  require_m(m, n, "heat_candidates");
  CandidateLists out{n, m, CandidateMode::kHeatMap,
                     std::vector<City>(static_cast<std::size_t>(n) * static_cast<std::size_t>(m))};
  std::vector<City> scratch;
  for (int i = 0; i < n; ++i) {
    const auto row = hp.row(i);
    rank_row(n, i, m,
             [&](City a, City b) { return row(a) > row(b) || (row(a) == row(b) && a < b); },
             scratch, out.flat.data() + static_cast<std::ptrdiff_t>(i) * m);
  }
  return out;
}

CandidateLists distance_candidates(const DistanceMatrix& dist, int m) {
  const int n = dist.size();
  require_m(m, n, "distance_candidates");
  CandidateLists out{n, m, CandidateMode::kDistance,
                     std::vector<City>(static_cast<std::size_t>(n) * static_cast<std::size_t>(m))};
  std::vector<City> scratch;
  for (int i = 0; i < n; ++i) {
    const auto row = dist.d.row(i);
    rank_row(n, i, m,
             [&](City a, City b) { return row(a) < row(b) || (row(a) == row(b) && a < b); },
             scratch, out.flat.data() + static_cast<std::ptrdiff_t>(i) * m);
  }
  return out;
}

CandidateLists candidate_lists(const PrunedHeatMap& pruned, const DistanceMatrix& dist, int m,
                               CandidateMode mode) {
  return mode == CandidateMode::kHeatMap ? heat_candidates(pruned.hp, m)
                                         : distance_candidates(dist, m);
}

}  // namespace utsp
