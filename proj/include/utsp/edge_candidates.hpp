#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "utsp/common.hpp"
#include "utsp/heatmap.hpp"
#include "utsp/instance.hpp"

namespace utsp {

/// Heat map after edge elimination.
struct PrunedHeatMap {
  Matrix filtered;  // top-M off-diagonal entries of each heat-map row, rest zero
  Matrix hp;        // filtered + filtered^T (symmetric, zero diagonal)

  int size() const noexcept { return static_cast<int>(hp.rows()); }
};

/// Keeps the m largest off-diagonal entries of every row (ties go to the
/// smaller column index) and symmetrises. Requires 1 <= m <= n-1.
PrunedHeatMap top_m_filter(const HeatMap& heat, int m);

/// Undirected edge with a < b.
struct Edge {
  City a = 0;
  City b = 0;

  static Edge of(City u, City v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sorted set of distinct undirected edges.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::vector<Edge> edges);

  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(Edge e) const;
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// |this ∩ other|.
  std::size_t intersection_size(const EdgeSet& other) const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<Edge> edges_;
};

/// Pairs (i, j), i < j, with hp(i, j) > 0.
EdgeSet edge_set(const PrunedHeatMap& pruned);

/// The n undirected edges of a tour.
EdgeSet tour_edges(const Tour& tour);

/// |truth ∩ pred| / |truth|. Throws std::invalid_argument if truth is empty.
double overlap_coefficient(const EdgeSet& pred, const EdgeSet& truth);

enum class CandidateMode {
  kHeatMap,   // descending pruned heat value
  kDistance,  // ascending distance
};

/// Per-city candidate neighbours, m per city, stored flat.
struct CandidateLists {
  int n = 0;
  int m = 0;
  CandidateMode mode = CandidateMode::kHeatMap;
  std::vector<City> flat;

  std::span<const City> of(City c) const {
    return std::span<const City>(flat).subspan(static_cast<std::size_t>(c) * static_cast<std::size_t>(m),
                                               static_cast<std::size_t>(m));
  }
};

/// m best neighbours of every city ranked by descending hp (heat mode);
/// equal keys go to the smaller city index. Requires 1 <= m <= n-1.
CandidateLists heat_candidates(const Matrix& hp, int m);

/// m nearest neighbours of every city; equal distances go to the smaller
/// city index. Requires 1 <= m <= n-1.
CandidateLists distance_candidates(const DistanceMatrix& dist, int m);

CandidateLists candidate_lists(const PrunedHeatMap& pruned, const DistanceMatrix& dist, int m,
                               CandidateMode mode);

}  // namespace utsp
