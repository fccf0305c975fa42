/**
 * @file text.hpp
 * @brief Small text helpers shared by the file formats
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palm {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Whole-string parse; nullopt on trailing garbage or overflow.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

std::string read_text_file(const std::string& path);

}  // namespace palm
