#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "utsp/common.hpp"

namespace utsp {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// A 2D Euclidean TSP instance. Holds at least 3 cities; coordinates are
/// stored exactly as given (generated instances lie in the unit square).
class Instance {
 public:
  static constexpr int kMinCities = 3;

  explicit Instance(std::vector<Point> coords, std::string name = {});

  int size() const noexcept { return static_cast<int>(coords_.size()); }
  std::span<const Point> coords() const noexcept { return coords_; }
  const Point& operator[](City c) const { return coords_[static_cast<std::size_t>(c)]; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<Point> coords_;
  std::string name_;
};

/// n cities i.i.d. uniform on [0,1)^2, drawn as x0,y0,x1,y1,... from Rng(seed).
Instance generate_random(int n, std::uint64_t seed);

/// Parses the EUC_2D subset of TSPLIB (NAME, TYPE, COMMENT, DIMENSION,
/// EDGE_WEIGHT_TYPE, NODE_COORD_SECTION, EOF). Node ids are 1-based in the
/// file and must cover 1..DIMENSION exactly once. Throws ParseError.
Instance parse_tsplib(std::string_view text);

/// Writes an instance as a TSPLIB EUC_2D document. Coordinates use the
/// shortest round-trip decimal form, so parse_tsplib recovers them exactly.
std::string to_tsplib(const Instance& inst);

enum class Rounding {
  kExact,       // Euclidean distance in double precision
  kNearestInt,  // TSPLIB nint(), for comparison with external tools only
};

/// Symmetric Euclidean distance matrix with zero diagonal.
struct DistanceMatrix {
  Matrix d;

  int size() const noexcept { return static_cast<int>(d.rows()); }
  double operator()(City i, City j) const { return d(i, j); }
};

DistanceMatrix distance_matrix(const Instance& inst, Rounding rounding = Rounding::kExact);

/// Temperature used by adjacency_weights when none is given; tuned for
/// unit-square instances.
inline constexpr double kDefaultTau = 0.1;

/// Graph weights w_ij = exp(-d_ij / tau).
struct AdjacencyWeights {
  Matrix w;
  double tau = kDefaultTau;
};

AdjacencyWeights adjacency_weights(const DistanceMatrix& dist, double tau = kDefaultTau);

/// Hamiltonian cycle stored as a visiting order plus its inverse.
class Tour {
 public:
  /// Throws std::invalid_argument unless order is a permutation of 0..n-1
  /// with n >= 3.
  explicit Tour(std::vector<City> order);

  static Tour identity(int n);

  int size() const noexcept { return static_cast<int>(order_.size()); }
  std::span<const City> order() const noexcept { return order_; }
  City operator[](int k) const { return order_[static_cast<std::size_t>(k)]; }
  int position(City c) const { return position_[static_cast<std::size_t>(c)]; }

  City next(City c) const {
    const int p = position(c) + 1;
    return order_[static_cast<std::size_t>(p == size() ? 0 : p)];
  }
  City prev(City c) const {
    const int p = position(c);
    return order_[static_cast<std::size_t>(p == 0 ? size() - 1 : p - 1)];
  }

  /// Reverses the cities at positions [i, j] (i <= j, no wrap-around).
  void reverse(int i, int j);

  /// True when position_ is the inverse of order_ and order_ is a permutation.
  bool consistent() const;

  friend bool operator==(const Tour& a, const Tour& b) { return a.order_ == b.order_; }

 private:
  std::vector<City> order_;
  std::vector<int> position_;
};

/// Sum of d[order[k]][order[k+1 mod n]] in visiting order.
double tour_length(const DistanceMatrix& dist, const Tour& tour);

}  // namespace utsp
