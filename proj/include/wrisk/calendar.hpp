#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wrisk {

using Date = std::chrono::sys_days;

/// Parses a strict `YYYY-MM-DD` date. Returns nullopt on any malformed or
/// out-of-range input.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date date);

Date make_date(int year, unsigned month, unsigned day);

/// Monday that opens the ISO-8601 week containing `date`.
Date iso_week_start(Date date);

/// ISO-8601 week-numbering year (the calendar year of the week's Thursday).
int iso_week_year(Date date);

} // namespace wrisk
