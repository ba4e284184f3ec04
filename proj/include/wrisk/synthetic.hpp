#pragma once

#include "wrisk/calendar.hpp"
#include "wrisk/data_ingest.hpp"
#include "wrisk/random.hpp"

#include <cstdint>
#include <vector>

namespace wrisk {

/// Weekly claim rate as a smooth monotone function of the precipitation
/// features. The peak term saturates linearly for large daily maxima.
struct ClaimCoefficients {
    double base = 0.5;
    double total = 0.04;  // per mm of R_t
    double lag = 0.015;   // per mm of R_{t-1}
    double peak = 0.4;    // weight of maxR^2 / (peak_scale + maxR)
    double peak_scale = 15.0;
};

struct SynthConfig {
    int weeks = 520;
    Date start = make_date(2002, 1, 7); // a Monday
    double wet_probability = 0.35;
    double precip_shape = 0.8;  // gamma shape of wet-day amounts
    double precip_scale = 6.0;  // gamma scale (mm) of wet-day amounts
    double precip_multiplier = 1.0;
    ClaimCoefficients claims;
    double severity_mean = 8'000.0;      // CAD per claim-rate unit
    double severity_peak_gain = 1.0;     // severity grows with maxR_t
    double severity_dispersion = 0.25;   // coefficient of variation of the severity draw
    double noise = 0.1;                  // additive Gaussian noise sd on N_t
    double homes_insured = 100'000.0;
    double annual_inflation = 0.02;      // drift of the emitted price index
    bool with_targets = true;            // false: precipitation-only scenario data
    std::uint64_t seed = 1;
};

/// Throws ConfigError on out-of-range settings (weeks < 10, non-positive
/// shape/scale, start not a Monday, ...).
void validate(const SynthConfig& config);

/// Sets start and weeks so the emitted series covers the ISO week-years
/// [first_year, last_year] exactly.
void cover_years(SynthConfig& config, int first_year, int last_year);

/// Noise-free claim rate for one week's features.
double claims_generating_function(const ClaimCoefficients& coefficients, double total_precip,
                                  double total_precip_lag, double max_daily_precip);

/// Mean claim-rate multiplier of the severity for a given weekly maximum.
double severity_level(const SynthConfig& config, double max_daily_precip);

struct SyntheticData {
    std::vector<DailyRecord> daily;
    WeeklySeries weekly;
};

/// Daily records and the weekly truth they aggregate to. The generator runs
/// one hidden burn-in week so R_{t-1} exists for the first emitted week.
/// Fully deterministic for a given seed.
SyntheticData generate_synthetic_data(const SynthConfig& config);

WeeklySeries generate_synthetic(const SynthConfig& config);

} // namespace wrisk
