#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include "utsp/common.hpp"
#include "utsp/instance.hpp"

namespace utsp {

// Text formats. Every real is written in its shortest round-trip decimal
// form, so reading a file back reproduces the in-memory values bit-exactly.
//
//   UTSP-INSTANCE v1      UTSP-HEATMAP v1        UTSP-TOUR v1
//   n                     n                      n
//   x y    (n lines)      h00 h01 ... (n lines)  c0 c1 ... c(n-1)
//                                                length

std::string format_double(double value);
/// Parses a complete token as a double; false on any trailing garbage.
bool parse_double(std::string_view token, double& value);

std::string format_instance(const Instance& inst);
Instance parse_instance(std::string_view text);

std::string format_heatmap(const Matrix& heat);
Matrix parse_heatmap(std::string_view text);

std::string format_tour(const Tour& tour, double length);
std::pair<Tour, double> parse_tour(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Reads either a UTSP-INSTANCE v1 file or a TSPLIB EUC_2D file, chosen by
/// the first line.
Instance load_instance(const std::filesystem::path& path);

}  // namespace utsp
