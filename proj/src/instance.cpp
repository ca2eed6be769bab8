#include "utsp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "utsp/io.hpp"
#include "utsp/rng.hpp"

namespace utsp {

Instance::Instance(std::vector<Point> coords, std::string name)
    : coords_(std::move(coords)), name_(std::move(name)) {
  if (coords_.size() < static_cast<std::size_t>(kMinCities)) {
    throw std::invalid_argument("instance needs at least 3 cities, got " +
                                std::to_string(coords_.size()));
  }
  for (const Point& p : coords_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("instance coordinates must be finite");
    }
  }
}

Instance generate_random(int n, std::uint64_t seed) {
  if (n < Instance::kMinCities) {
    throw std::invalid_argument("generate_random: n must be >= 3, got " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<Point> coords(static_cast<std::size_t>(n));
  for (Point& p : coords) {
    p.x = rng.uniform01();
    p.y = rng.uniform01();
  }
  return Instance(std::move(coords), "rand" + std::to_string(n) + "-s" + std::to_string(seed));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits "KEY : VALUE" / "KEY: VALUE" / "KEY". Returns false if there is no key.
bool split_header(std::string_view line, std::string_view& key, std::string_view& value) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) {
    key = trim(line);
    value = {};
  } else {
    key = trim(line.substr(0, colon));
    value = trim(line.substr(colon + 1));
  }
  return !key.empty();
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view token, long long& value) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Instance parse_tsplib(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }

  std::string name;
  std::optional<long long> dimension;
  std::size_t dimension_line = 0;
  bool have_weight_type = false;
  std::size_t section_line = 0;
  std::size_t last_line = 1;  // last non-blank header line
  std::size_t i = 0;

  for (; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    last_line = lineno;
    std::string_view key, value;
    split_header(line, key, value);
    if (key == "EOF") break;
    if (key == "NODE_COORD_SECTION") {
      section_line = lineno;
      ++i;
      break;
    }
    if (key.ends_with("_SECTION")) {
      throw ParseError(lineno, "unsupported section " + std::string(key));
    }
    if (key == "NAME") {
      name = std::string(value);
    } else if (key == "TYPE") {
      if (value != "TSP") throw ParseError(lineno, "unsupported TYPE " + std::string(value));
    } else if (key == "DIMENSION") {
      long long dim = 0;
      if (!parse_int(value, dim) || dim < Instance::kMinCities) {
        throw ParseError(lineno, "invalid DIMENSION '" + std::string(value) + "'");
      }
      dimension = dim;
      dimension_line = lineno;
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value != "EUC_2D") {
        throw ParseError(lineno, "unsupported EDGE_WEIGHT_TYPE " + std::string(value) +
                                     " (only EUC_2D)");
      }
      have_weight_type = true;
    }
    // COMMENT, DISPLAY_DATA_TYPE and other scalar keys are ignored.
  }

  if (section_line == 0) {
    throw ParseError(last_line, "missing NODE_COORD_SECTION");
  }
  if (!dimension) throw ParseError(section_line, "missing DIMENSION before NODE_COORD_SECTION");
  if (!have_weight_type) {
    throw ParseError(section_line, "missing EDGE_WEIGHT_TYPE before NODE_COORD_SECTION");
  }

  const auto n = static_cast<std::size_t>(*dimension);
  std::vector<Point> coords(n);
  std::vector<bool> seen(n, false);
  std::size_t rows = 0;
  std::size_t end_line = lines.size();
  for (; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (line == "EOF") {
      end_line = lineno;
      break;
    }
    const auto fields = split_ws(line);
    long long id = 0;
    Point p;
    if (fields.size() != 3 || !parse_int(fields[0], id) || !parse_double(fields[1], p.x) ||
        !parse_double(fields[2], p.y)) {
      throw ParseError(lineno, "expected 'id x y', got '" + std::string(line) + "'");
    }
    if (rows == n) {
      throw ParseError(lineno, "more coordinate rows than DIMENSION " + std::to_string(n) +
                                   " (declared on line " + std::to_string(dimension_line) + ")");
    }
    if (id < 1 || static_cast<std::size_t>(id) > n || seen[static_cast<std::size_t>(id - 1)]) {
      throw ParseError(lineno, "node id " + std::to_string(id) + " out of range or repeated");
    }
    seen[static_cast<std::size_t>(id - 1)] = true;
    coords[static_cast<std::size_t>(id - 1)] = p;
    ++rows;
  }
  if (rows != n) {
    throw ParseError(end_line, "DIMENSION " + std::to_string(n) + " (line " +
                                   std::to_string(dimension_line) + ") but found " +
                                   std::to_string(rows) + " coordinate rows");
  }
  return Instance(std::move(coords), std::move(name));
}

std::string to_tsplib(const Instance& inst) {
  std::ostringstream out;
  out << "NAME : " << (inst.name().empty() ? "unnamed" : inst.name()) << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << inst.size() << '\n'
      << "EDGE_WEIGHT_TYPE : EUC_2D\n"
      << "NODE_COORD_SECTION\n";
  for (int i = 0; i < inst.size(); ++i) {
    out << (i + 1) << ' ' << format_double(inst[i].x) << ' ' << format_double(inst[i].y) << '\n';
  }
  out << "EOF\n";
  return out.str();
}

DistanceMatrix distance_matrix(const Instance& inst, Rounding rounding) {
  const int n = inst.size();
  DistanceMatrix dist{Matrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = inst[i].x - inst[j].x;
      const double dy = inst[i].y - inst[j].y;
      double d = std::sqrt(dx * dx + dy * dy);
      if (rounding == Rounding::kNearestInt) d = std::floor(d + 0.5);
      dist.d(i, j) = d;
      dist.d(j, i) = d;
    }
  }
  return dist;
}

AdjacencyWeights adjacency_weights(const DistanceMatrix& dist, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("adjacency_weights: tau must be positive and finite");
  }
  AdjacencyWeights out{Matrix(dist.size(), dist.size()), tau};
  out.w = (-dist.d.array() / tau).exp().matrix();
  return out;
}

Tour::Tour(std::vector<City> order) : order_(std::move(order)), position_(order_.size(), -1) {
  const int n = size();
  if (n < Instance::kMinCities) {
    throw std::invalid_argument("tour needs at least 3 cities, got " + std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    const City c = order_[static_cast<std::size_t>(k)];
    if (c < 0 || c >= n || position_[static_cast<std::size_t>(c)] != -1) {
      throw std::invalid_argument("tour order is not a permutation of 0..n-1");
    }
    position_[static_cast<std::size_t>(c)] = k;
  }
}

Tour Tour::identity(int n) {
  std::vector<City> order(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  return Tour(std::move(order));
}

void Tour::reverse(int i, int j) {
  while (i < j) {
    std::swap(order_[static_cast<std::size_t>(i)], order_[static_cast<std::size_t>(j)]);
    position_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])] = i;
    position_[static_cast<std::size_t>(order_[static_cast<std::size_t>(j)])] = j;
    ++i;
    --j;
  }
}

bool Tour::consistent() const {
  const int n = size();
  if (position_.size() != order_.size()) return false;
  std::vector<bool> seen(order_.size(), false);
  for (int k = 0; k < n; ++k) {
    const City c = order_[static_cast<std::size_t>(k)];
    if (c < 0 || c >= n || seen[static_cast<std::size_t>(c)]) return false;
    seen[static_cast<std::size_t>(c)] = true;
    if (position_[static_cast<std::size_t>(c)] != k) return false;
  }
  return true;
}

double tour_length(const DistanceMatrix& dist, const Tour& tour) {
  if (tour.size() != dist.size()) {
    throw std::invalid_argument("tour_length: tour has " + std::to_string(tour.size()) +
                                " cities but distance matrix has " +
                                std::to_string(dist.size()));
  }
  double total = 0.0;
  const int n = tour.size();
  for (int k = 0; k + 1 < n; ++k) total += dist(tour[k], tour[k + 1]);
  total += dist(tour[n - 1], tour[0]);
  return total;
}

}  // namespace utsp
