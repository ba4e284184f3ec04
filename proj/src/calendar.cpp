#include "wrisk/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace wrisk {
namespace {

template <typename T>
bool parse_field(std::string_view text, T& out) {
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int year = 0;
    unsigned month = 0;
    unsigned day = 0;
    if (!parse_field(text.substr(0, 4), year) || !parse_field(text.substr(5, 2), month) ||
        !parse_field(text.substr(8, 2), day)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

std::string format_date(Date date) {
    std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                            std::chrono::day{day}}};
}

Date iso_week_start(Date date) {
    std::chrono::weekday wd{date};
    return date - std::chrono::days{wd.iso_encoding() - 1};
}

int iso_week_year(Date date) {
    Date thursday = iso_week_start(date) + std::chrono::days{3};
    return static_cast<int>(std::chrono::year_month_day{thursday}.year());
}

} // namespace wrisk
