#include "utsp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace utsp {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

namespace {

// Line cursor over a text buffer that skips blank lines and tracks the
// 1-based line number for error reporting.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (pos_ <= text_.size()) {
      auto nl = text_.find('\n', pos_);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view raw = text_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      ++lineno_;
      const auto first = raw.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) continue;
      const auto last = raw.find_last_not_of(" \t\r");
      line = raw.substr(first, last - first + 1);
      return true;
    }
    return false;
  }

  std::string_view expect(const char* what) {
    std::string_view line;
    if (!next(line)) throw ParseError(lineno_, std::string("unexpected end of input, expected ") + what);
    return line;
  }

  std::size_t lineno() const { return lineno_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t lineno_ = 0;
};

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int read_count(LineReader& reader, int minimum) {
  const std::string_view line = reader.expect("city count");
  int n = 0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), n);
  if (ec != std::errc() || ptr != line.data() + line.size() || n < minimum) {
    throw ParseError(reader.lineno(), "invalid city count '" + std::string(line) + "'");
  }
  return n;
}

void expect_header(LineReader& reader, std::string_view header) {
  const std::string_view line = reader.expect("header");
  if (line != header) {
    throw ParseError(reader.lineno(), "expected header '" + std::string(header) + "', got '" +
                                          std::string(line) + "'");
  }
}

void expect_end(LineReader& reader) {
  std::string_view extra;
  if (reader.next(extra)) throw ParseError(reader.lineno(), "unexpected trailing content");
}

}  // namespace

std::string format_instance(const Instance& inst) {
  std::string out = "UTSP-INSTANCE v1\n" + std::to_string(inst.size()) + "\n";
  for (const Point& p : inst.coords()) {
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += '\n';
  }
  return out;
}

Instance parse_instance(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, "UTSP-INSTANCE v1");
  const int n = read_count(reader, Instance::kMinCities);
  std::vector<Point> coords(static_cast<std::size_t>(n));
  for (Point& p : coords) {
    const std::string_view line = reader.expect("coordinate row");
    const auto fields = tokens(line);
    if (fields.size() != 2 || !parse_double(fields[0], p.x) || !parse_double(fields[1], p.y)) {
      throw ParseError(reader.lineno(), "expected 'x y', got '" + std::string(line) + "'");
    }
  }
  expect_end(reader);
  return Instance(std::move(coords));
}

std::string format_heatmap(const Matrix& heat) {
  if (heat.rows() != heat.cols()) throw std::invalid_argument("format_heatmap: matrix not square");
  std::string out = "UTSP-HEATMAP v1\n" + std::to_string(heat.rows()) + "\n";
  for (Eigen::Index i = 0; i < heat.rows(); ++i) {
    for (Eigen::Index j = 0; j < heat.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(heat(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix parse_heatmap(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, "UTSP-HEATMAP v1");
  const int n = read_count(reader, 1);
  Matrix heat(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string_view line = reader.expect("heat-map row");
    const auto fields = tokens(line);
    if (fields.size() != static_cast<std::size_t>(n)) {
      throw ParseError(reader.lineno(), "expected " + std::to_string(n) + " values, got " +
                                            std::to_string(fields.size()));
    }
    for (int j = 0; j < n; ++j) {
      if (!parse_double(fields[static_cast<std::size_t>(j)], heat(i, j))) {
        throw ParseError(reader.lineno(), "invalid number '" +
                                              std::string(fields[static_cast<std::size_t>(j)]) + "'");
      }
    }
  }
  expect_end(reader);
  return heat;
}

std::string format_tour(const Tour& tour, double length) {
  std::string out = "UTSP-TOUR v1\n" + std::to_string(tour.size()) + "\n";
  for (int k = 0; k < tour.size(); ++k) {
    if (k > 0) out += ' ';
    out += std::to_string(tour[k]);
  }
  out += '\n';
  out += format_double(length);
  out += '\n';
  return out;
}

std::pair<Tour, double> parse_tour(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, "UTSP-TOUR v1");
  const int n = read_count(reader, Instance::kMinCities);
  const std::string_view line = reader.expect("tour order");
  const auto fields = tokens(line);
  if (fields.size() != static_cast<std::size_t>(n)) {
    throw ParseError(reader.lineno(), "expected " + std::to_string(n) + " cities, got " +
                                          std::to_string(fields.size()));
  }
  std::vector<City> order(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto f = fields[k];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), order[k]);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw ParseError(reader.lineno(), "invalid city '" + std::string(f) + "'");
    }
  }
  const std::size_t order_line = reader.lineno();
  const std::string_view len_line = reader.expect("tour length");
  double length = 0.0;
  if (!parse_double(len_line, length)) {
    throw ParseError(reader.lineno(), "invalid length '" + std::string(len_line) + "'");
  }
  expect_end(reader);
  try {
    return {Tour(std::move(order)), length};
  } catch (const std::invalid_argument& e) {
    throw ParseError(order_line, e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::system_error(errno, std::generic_category(), "write failed: " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool native = first != std::string::npos && text.compare(first, 16, "UTSP-INSTANCE v1") == 0;
  Instance inst = native ? parse_instance(text) : parse_tsplib(text);
  if (!inst.name().empty()) return inst;
  return Instance(std::vector<Point>(inst.coords().begin(), inst.coords().end()),
                  path.stem().string());
}

}  // namespace utsp
