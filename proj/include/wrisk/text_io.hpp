#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wrisk {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict full-string parse. Leading/trailing blanks are trimmed.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

/// Splits one CSV line on commas. Quoting is not supported; none of the
/// formats handled here need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace wrisk
