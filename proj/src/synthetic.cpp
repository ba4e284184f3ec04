#include "wrisk/synthetic.hpp"

#include "wrisk/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace wrisk {

void validate(const SynthConfig& c) {
    if (c.weeks < 10) {
        throw ConfigError("synth: weeks must be at least 10 (got " + std::to_string(c.weeks) + ")");
    }
    if (!(c.precip_shape > 0.0) || !(c.precip_scale > 0.0)) {
        throw ConfigError("synth: precipitation shape and scale must be positive");
    }
    if (!(c.wet_probability > 0.0) || c.wet_probability > 1.0) {
        throw ConfigError("synth: wet probability must lie in (0, 1]");
    }
    if (!(c.precip_multiplier > 0.0)) {
        throw ConfigError("synth: precipitation multiplier must be positive");
    }
    if (!(c.severity_mean > 0.0) || c.severity_dispersion < 0.0 || c.severity_peak_gain < 0.0) {
        throw ConfigError("synth: severity settings out of range");
    }
    if (c.noise < 0.0) {
        throw ConfigError("synth: noise must be non-negative");
    }
    if (!(c.homes_insured > 0.0) || c.annual_inflation <= -1.0) {
        throw ConfigError("synth: exposure/inflation settings out of range");
    }
    if (!(c.claims.peak_scale > 0.0)) {
        throw ConfigError("synth: peak scale must be positive");
    }
    if (std::chrono::weekday{c.start}.iso_encoding() != 1) {
        throw ConfigError("synth: start date " + format_date(c.start) + " is not a Monday");
    }
}

void cover_years(SynthConfig& config, int first_year, int last_year) {
    if (last_year < first_year) {
        throw ConfigError("synth: empty year range");
    }
    // January 4th always falls in ISO week 1.
    const Date begin = iso_week_start(make_date(first_year, 1, 4));
    const Date end = iso_week_start(make_date(last_year + 1, 1, 4));
    config.start = begin;
    config.weeks = static_cast<int>((end - begin).count() / 7);
}

double claims_generating_function(const ClaimCoefficients& k, double total_precip, double total_precip_lag,
                                  double max_daily_precip) {
    return k.base + k.total * total_precip + k.lag * total_precip_lag +
           k.peak * max_daily_precip * max_daily_precip / (k.peak_scale + max_daily_precip);
}

double severity_level(const SynthConfig& config, double max_daily_precip) {
    return config.severity_mean *
           (1.0 + config.severity_peak_gain * max_daily_precip / (config.claims.peak_scale + max_daily_precip));
}

SyntheticData generate_synthetic_data(const SynthConfig& config) {
    validate(config);
    Rng rng{config.seed};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::gamma_distribution<double> amount{config.precip_shape, config.precip_scale};
    std::normal_distribution<double> noise{0.0, 1.0};
    const double cv2 = config.severity_dispersion * config.severity_dispersion;
    std::gamma_distribution<double> severity_draw{cv2 > 0.0 ? 1.0 / cv2 : 1.0, cv2 > 0.0 ? cv2 : 1.0};

    SyntheticData out;
    out.weekly.label = "synthetic";
    const Date origin = config.start;
    const double base_index = 100.0;
    double prev_total = 0.0;

    for (int w = -1; w < config.weeks; ++w) {
        std::array<double, 7> precip{};
        for (auto& p : precip) {
            const double u = unit(rng);
            const double a = amount(rng);
            p = u < config.wet_probability ? a * config.precip_multiplier : 0.0;
        }
        const double z = noise(rng);
        const double s = severity_draw(rng);

        double total = 0.0;
        double peak = 0.0;
        for (double p : precip) {
            total += p;
            peak = std::max(peak, p);
        }
        const double claims =
            std::max(0.0, claims_generating_function(config.claims, total, prev_total, peak) + config.noise * z);
        const double loss = claims * severity_level(config, peak) * (cv2 > 0.0 ? s : 1.0);
        prev_total = total;
        if (w < 0) {
            continue; // burn-in week only provides R_{t-1}
        }

        const Date week_start = origin + std::chrono::days{7 * w};
        WeeklyRecord weekly;
        weekly.week_start = week_start;
        weekly.total_precip = total;
        weekly.max_daily_precip = peak;
        if (config.with_targets) {
            weekly.claims = claims;
            weekly.loss = loss;
        }
        out.weekly.records.push_back(weekly);

        for (int d = 0; d < 7; ++d) {
            DailyRecord day;
            day.date = week_start + std::chrono::days{d};
            day.precipitation_mm = precip[static_cast<std::size_t>(d)];
            if (config.with_targets) {
                const double share = total > 0.0 ? precip[static_cast<std::size_t>(d)] / total : 1.0 / 7.0;
                const double elapsed_years = (7.0 * w + d) / 365.25;
                const double index = base_index * std::pow(1.0 + config.annual_inflation, elapsed_years);
                day.claims = claims * share * config.homes_insured / kClaimsPerHomes;
                day.homes_insured = config.homes_insured;
                day.loss_nominal = loss * share * index / base_index;
                day.price_index = index;
            }
            out.daily.push_back(day);
        }
    }
    return out;
}

WeeklySeries generate_synthetic(const SynthConfig& config) {
    return generate_synthetic_data(config).weekly;
}

} // namespace wrisk
