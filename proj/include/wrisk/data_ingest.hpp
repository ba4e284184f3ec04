#pragma once

#include "wrisk/calendar.hpp"
#include "wrisk/matrix.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wrisk {

/// One day of observations. Claims, loss, exposure and price index are absent
/// for climate-scenario files, which carry precipitation only.
struct DailyRecord {
    Date date{};
    double precipitation_mm = 0.0;
    std::optional<double> claims;
    std::optional<double> loss_nominal;
    std::optional<double> homes_insured;
    std::optional<double> price_index;

    friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

/// One ISO week. `claims` is N_t (claims per 100,000 insured homes) and `loss`
/// is L_t in base-year prices.
struct WeeklyRecord {
    Date week_start{};
    double total_precip = 0.0; // R_t
    double max_daily_precip = 0.0; // maxR_t
    std::optional<double> claims;
    std::optional<double> loss;

    friend bool operator==(const WeeklyRecord&, const WeeklyRecord&) = default;
};

struct WeeklySeries {
    std::vector<WeeklyRecord> records;
    std::string label = "control";

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

/// Header names of the daily CSV columns. `date` and `precip` are required;
/// the rest are looked up and silently treated as absent when missing.
struct ColumnMapping {
    std::string date = "date";
    std::string precip = "precip_mm";
    std::string claims = "claims";
    std::string loss = "loss";
    std::string homes_insured = "homes_insured";
    std::string price_index = "price_index";
};

struct AggregationOptions {
    /// Price index of the base year. When unset, the index of the first
    /// record carrying one is used.
    std::optional<double> base_price_index;
};

inline constexpr double kClaimsPerHomes = 100'000.0;

/// Parses a daily CSV. Throws DataError naming the offending line for
/// malformed rows, negative values and non-increasing dates.
std::vector<DailyRecord> parse_daily_csv(std::istream& source, const ColumnMapping& schema = {});
std::vector<DailyRecord> read_daily_csv(const std::string& path, const ColumnMapping& schema = {});

/// Claims per 100,000 insured homes.
double normalize_claims(double claims, double homes_insured);

/// Converts a nominal amount to base-year prices.
double deflate_loss(double loss_nominal, double index_t, double index_base);

/// Aggregates daily records to complete ISO weeks (Monday to Sunday, all
/// seven days present). Incomplete boundary weeks are dropped.
///
/// N_t sums the normalized daily rates, so exposure is applied per day. When
/// the exposure column is absent the claims column is taken as already
/// normalized. Likewise losses without a price index are taken as already
/// deflated. A weekly target is present only when all seven days carry it.
WeeklySeries aggregate_weekly(const std::vector<DailyRecord>& daily,
                              const AggregationOptions& options = {});

/// Design matrix plus target with the index of the week each row describes.
struct FeatureSet {
    Matrix X;
    std::vector<double> y;
    std::vector<std::size_t> week_index;
};

/// Rows (R_t, R_{t-1}, maxR_t). A row is emitted only for weeks whose
/// preceding week is present, so the first week of every contiguous segment
/// is dropped. When `require_target` is false, y is left empty (projection).
FeatureSet build_claims_features(const WeeklySeries& series, bool require_target = true);

/// Rows (R_t, R_{t-1}, maxR_t, N_t) where N_t comes from `claims`, a vector
/// aligned with the rows of build_claims_features. Observed claims are used
/// for training and predicted claims at projection time.
FeatureSet build_loss_features(const WeeklySeries& series, const std::vector<double>& claims,
                               bool require_target = true);

/// Writes `week_start,R_t,maxR_t,N_t,L_t`, leaving absent fields empty.
void write_weekly_csv(std::ostream& out, const WeeklySeries& series);
WeeklySeries parse_weekly_csv(std::istream& source, std::string label = "control");

/// Writes the daily CSV layout accepted by parse_daily_csv (default mapping).
/// Optional columns are emitted only if at least one record carries them.
void write_daily_csv(std::ostream& out, const std::vector<DailyRecord>& records);

} // namespace wrisk
