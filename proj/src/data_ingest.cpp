#include "wrisk/data_ingest.hpp"

#include "wrisk/error.hpp"
#include "wrisk/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wrisk {
namespace {

constexpr std::ptrdiff_t kNoColumn = -1;

std::ptrdiff_t find_column(const std::vector<std::string_view>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), std::string_view{name});
    return it == header.end() ? kNoColumn : std::distance(header.begin(), it);
}

[[noreturn]] void fail_line(std::size_t line, const std::string& message) {
    throw DataError("line " + std::to_string(line) + ": " + message);
}

std::optional<double> optional_number(const std::vector<std::string_view>& fields, std::ptrdiff_t column,
                                      std::size_t line, const std::string& name) {
    if (column == kNoColumn || fields[static_cast<std::size_t>(column)].empty()) {
        return std::nullopt;
    }
    auto value = parse_double(fields[static_cast<std::size_t>(column)]);
    if (!value || !std::isfinite(*value)) {
        fail_line(line, "unparseable " + name + " '" +
                            std::string(fields[static_cast<std::size_t>(column)]) + "'");
    }
    if (*value < 0.0) {
        fail_line(line, "negative " + name + " " + format_double(*value));
    }
    return value;
}

std::string optional_cell(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string{};
}

} // namespace

std::vector<DailyRecord> parse_daily_csv(std::istream& source, const ColumnMapping& schema) {
    std::string header_line;
    if (!std::getline(source, header_line)) {
        throw DataError("daily CSV is empty (no header row)");
    }
    if (header_line.starts_with("\xEF\xBB\xBF")) {
        header_line.erase(0, 3);
    }
    const auto header = split_csv_line(header_line);
    const auto date_col = find_column(header, schema.date);
    const auto precip_col = find_column(header, schema.precip);
    if (date_col == kNoColumn) {
        throw DataError("missing required column '" + schema.date + "'");
    }
    if (precip_col == kNoColumn) {
        throw DataError("missing required column '" + schema.precip + "'");
    }
    const auto claims_col = find_column(header, schema.claims);
    const auto loss_col = find_column(header, schema.loss);
    const auto homes_col = find_column(header, schema.homes_insured);
    const auto index_col = find_column(header, schema.price_index);

    std::vector<DailyRecord> records;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            fail_line(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(fields.size()));
        }
        DailyRecord rec;
        auto date = parse_date(fields[static_cast<std::size_t>(date_col)]);
        if (!date) {
            fail_line(line_no, "unparseable date '" +
                                   std::string(fields[static_cast<std::size_t>(date_col)]) + "'");
        }
        rec.date = *date;
        auto precip = optional_number(fields, precip_col, line_no, schema.precip);
        if (!precip) {
            fail_line(line_no, "missing " + schema.precip);
        }
        rec.precipitation_mm = *precip;
        rec.claims = optional_number(fields, claims_col, line_no, schema.claims);
        rec.loss_nominal = optional_number(fields, loss_col, line_no, schema.loss);
        rec.homes_insured = optional_number(fields, homes_col, line_no, schema.homes_insured);
        rec.price_index = optional_number(fields, index_col, line_no, schema.price_index);
        if (rec.homes_insured && *rec.homes_insured <= 0.0) {
            fail_line(line_no, schema.homes_insured + " must be positive");
        }
        if (rec.price_index && *rec.price_index <= 0.0) {
            fail_line(line_no, schema.price_index + " must be positive");
        }
        if (!records.empty() && rec.date <= records.back().date) {
            fail_line(line_no, "date " + format_date(rec.date) + " does not follow " +
                                   format_date(records.back().date));
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<DailyRecord> read_daily_csv(const std::string& path, const ColumnMapping& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return parse_daily_csv(in, schema);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

double normalize_claims(double claims, double homes_insured) {
    if (!(homes_insured > 0.0)) {
        throw DataError("homes insured must be positive");
    }
    return claims / homes_insured * kClaimsPerHomes;
}

double deflate_loss(double loss_nominal, double index_t, double index_base) {
    if (!(index_t > 0.0) || !(index_base > 0.0)) {
        throw DataError("price index must be positive");
    }
    return loss_nominal * index_base / index_t;
}

WeeklySeries aggregate_weekly(const std::vector<DailyRecord>& daily, const AggregationOptions& options) {
    if (daily.empty()) {
        throw DataError("empty input");
    }
    std::optional<double> base = options.base_price_index;
    if (!base) {
        auto it = std::find_if(daily.begin(), daily.end(),
                               [](const DailyRecord& r) { return r.price_index.has_value(); });
        if (it != daily.end()) {
            base = it->price_index;
        }
    }

    WeeklySeries series;
    std::size_t i = 0;
    while (i < daily.size()) {
        const Date week = iso_week_start(daily[i].date);
        std::size_t j = i;
        while (j < daily.size() && iso_week_start(daily[j].date) == week) {
            ++j;
        }
        if (j - i == 7) {
            WeeklyRecord rec;
            rec.week_start = week;
            double claims = 0.0;
            double loss = 0.0;
            bool has_claims = true;
            bool has_loss = true;
            for (std::size_t k = i; k < j; ++k) {
                const auto& d = daily[k];
                rec.total_precip += d.precipitation_mm;
                rec.max_daily_precip = std::max(rec.max_daily_precip, d.precipitation_mm);
                if (d.claims) {
                    claims += d.homes_insured ? normalize_claims(*d.claims, *d.homes_insured) : *d.claims;
                } else {
                    has_claims = false;
                }
                if (d.loss_nominal) {
                    loss += d.price_index ? deflate_loss(*d.loss_nominal, *d.price_index, *base)
                                          : *d.loss_nominal;
                } else {
                    has_loss = false;
                }
            }
            if (has_claims) {
                rec.claims = claims;
            }
            if (has_loss) {
                rec.loss = loss;
            }
            series.records.push_back(rec);
        }
        i = j;
    }
    if (series.empty()) {
        throw DataError("no complete week");
    }
    return series;
}

FeatureSet build_claims_features(const WeeklySeries& series, bool require_target) {
    if (series.size() < 2) {
        throw DataError("series '" + series.label + "' needs at least 2 weeks for lagged features");
    }
    FeatureSet out;
    out.X = Matrix(0, 3);
    for (std::size_t t = 1; t < series.size(); ++t) {
        const auto& cur = series.records[t];
        const auto& prev = series.records[t - 1];
        if (cur.week_start - prev.week_start != std::chrono::days{7}) {
            continue;
        }
        const double row[3] = {cur.total_precip, prev.total_precip, cur.max_daily_precip};
        out.X.append_row(row);
        out.week_index.push_back(t);
        if (require_target) {
            if (!cur.claims) {
                throw DataError("missing N_t for week " + format_date(cur.week_start) + " in '" +
                                series.label + "'");
            }
            out.y.push_back(*cur.claims);
        }
    }
    if (out.week_index.empty()) {
        throw DataError("series '" + series.label + "' has no pair of consecutive weeks");
    }
    return out;
}

FeatureSet build_loss_features(const WeeklySeries& series, const std::vector<double>& claims,
                               bool require_target) {
    FeatureSet base = build_claims_features(series, false);
    if (claims.size() != base.X.rows()) {
        throw DataError("claims vector has " + std::to_string(claims.size()) + " entries, expected " +
                        std::to_string(base.X.rows()));
    }
    FeatureSet out;
    out.X = Matrix(0, 4);
    out.week_index = base.week_index;
    for (std::size_t r = 0; r < base.X.rows(); ++r) {
        const auto src = base.X.row(r);
        const double row[4] = {src[0], src[1], src[2], claims[r]};
        out.X.append_row(row);
        if (require_target) {
            const auto& rec = series.records[base.week_index[r]];
            if (!rec.loss) {
                throw DataError("missing L_t for week " + format_date(rec.week_start) + " in '" +
                                series.label + "'");
            }
            out.y.push_back(*rec.loss);
        }
    }
    return out;
}

void write_weekly_csv(std::ostream& out, const WeeklySeries& series) {
    out << "week_start,R_t,maxR_t,N_t,L_t\n";
    for (const auto& r : series.records) {
        out << format_date(r.week_start) << ',' << format_double(r.total_precip) << ','
            << format_double(r.max_daily_precip) << ',' << optional_cell(r.claims) << ','
            << optional_cell(r.loss) << '\n';
    }
}

WeeklySeries parse_weekly_csv(std::istream& source, std::string label) {
    std::string line;
    if (!std::getline(source, line) || trim(line) != "week_start,R_t,maxR_t,N_t,L_t") {
        throw DataError("weekly CSV header must be 'week_start,R_t,maxR_t,N_t,L_t'");
    }
    WeeklySeries series;
    series.label = std::move(label);
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) {
            fail_line(line_no, "expected 5 fields");
        }
        WeeklyRecord rec;
        auto date = parse_date(f[0]);
        auto total = parse_double(f[1]);
        auto peak = parse_double(f[2]);
        if (!date || !total || !peak) {
            fail_line(line_no, "malformed weekly row");
        }
        rec.week_start = *date;
        rec.total_precip = *total;
        rec.max_daily_precip = *peak;
        if (!f[3].empty()) {
            rec.claims = parse_double(f[3]);
            if (!rec.claims) {
                fail_line(line_no, "malformed N_t");
            }
        }
        if (!f[4].empty()) {
            rec.loss = parse_double(f[4]);
            if (!rec.loss) {
                fail_line(line_no, "malformed L_t");
            }
        }
        series.records.push_back(rec);
    }
    return series;
}

void write_daily_csv(std::ostream& out, const std::vector<DailyRecord>& records) {
    const auto any = [&](auto member) {
        return std::any_of(records.begin(), records.end(),
                           [&](const DailyRecord& r) { return (r.*member).has_value(); });
    };
    const bool claims = any(&DailyRecord::claims);
    const bool loss = any(&DailyRecord::loss_nominal);
    const bool homes = any(&DailyRecord::homes_insured);
    const bool index = any(&DailyRecord::price_index);

    out << "date,precip_mm";
    if (claims) out << ",claims";
    if (loss) out << ",loss";
    if (homes) out << ",homes_insured";
    if (index) out << ",price_index";
    out << '\n';
    for (const auto& r : records) {
        out << format_date(r.date) << ',' << format_double(r.precipitation_mm);
        if (claims) out << ',' << optional_cell(r.claims);
        if (loss) out << ',' << optional_cell(r.loss_nominal);
        if (homes) out << ',' << optional_cell(r.homes_insured);
        if (index) out << ',' << optional_cell(r.price_index);
        out << '\n';
    }
}

} // namespace wrisk
