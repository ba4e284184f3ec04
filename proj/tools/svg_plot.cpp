#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wrisk::app {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* colour(std::size_t k) { return kPalette[k % std::size(kPalette)]; }

struct Axis {
    double lo = 0.0;
    double hi = 1.0;

    double y(double v) const { return kTop + (hi - v) / (hi - lo) * (kHeight - kTop - kBottom); }
};

Axis padded(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void open(std::ostringstream& s, const std::string& title) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
}

void y_axis(std::ostringstream& s, const Axis& a, const std::string& label) {
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = a.lo + (a.hi - a.lo) * k / 4.0;
        s << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(a.y(v) + 4) << "\" text-anchor=\"end\">" << num(v)
          << "</text>\n";
    }
    s << "<text x=\"15\" y=\"" << num(kHeight / 2) << "\" transform=\"rotate(-90 15 " << num(kHeight / 2)
      << ")\" text-anchor=\"middle\">" << label << "</text>\n";
}

void legend(std::ostringstream& s, const std::vector<std::string>& names, const std::vector<std::string>& colours) {
    for (std::size_t k = 0; k < names.size(); ++k) {
        const double x = kLeft + 10 + 130.0 * static_cast<double>(k);
        s << "<rect x=\"" << num(x) << "\" y=\"" << num(kHeight - 22) << "\" width=\"12\" height=\"12\" fill=\""
          << colours[k] << "\"/>\n";
        s << "<text x=\"" << num(x + 16) << "\" y=\"" << num(kHeight - 12) << "\">" << names[k] << "</text>\n";
    }
}

} // namespace

std::string projection_svg(const std::vector<ProjectionResult>& results, bool loss) {
    std::vector<std::string> periods;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& r : results) {
        for (const auto& p : r.periods) {
            if (std::find(periods.begin(), periods.end(), p.period.label) == periods.end()) {
                periods.push_back(p.period.label);
            }
            const double v = loss ? p.delta_loss : p.delta_claims;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const Axis axis = padded(lo, hi);
    std::ostringstream s;
    open(s, loss ? "Projected change in losses" : "Projected change in claims");
    y_axis(s, axis, "change vs control (%)");

    const double plot = kWidth - kLeft - kRight;
    const double group = periods.empty() ? plot : plot / static_cast<double>(periods.size());
    const double bar = 0.8 * group / static_cast<double>(std::max<std::size_t>(results.size(), 1));
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(axis.y(0)) << "\" x2=\"" << num(kWidth - kRight)
      << "\" y2=\"" << num(axis.y(0)) << "\" stroke=\"black\"/>\n";
    for (std::size_t g = 0; g < periods.size(); ++g) {
        const double x0 = kLeft + group * static_cast<double>(g) + 0.1 * group;
        s << "<text x=\"" << num(x0 + 0.4 * group) << "\" y=\"" << num(kHeight - kBottom + 16)
          << "\" text-anchor=\"middle\">" << periods[g] << "</text>\n";
        for (std::size_t k = 0; k < results.size(); ++k) {
            for (const auto& p : results[k].periods) {
                if (p.period.label != periods[g]) {
                    continue;
                }
                const double v = loss ? p.delta_loss : p.delta_claims;
                const double top = axis.y(std::max(v, 0.0));
                const double h = std::abs(axis.y(v) - axis.y(0.0));
                s << "<rect x=\"" << num(x0 + bar * static_cast<double>(k)) << "\" y=\"" << num(top)
                  << "\" width=\"" << num(bar) << "\" height=\"" << num(h) << "\" fill=\"" << colour(k) << "\"/>\n";
            }
        }
    }
    std::vector<std::string> names;
    std::vector<std::string> colours;
    for (std::size_t k = 0; k < results.size(); ++k) {
        names.push_back(results[k].scenario);
        colours.emplace_back(colour(k));
    }
    legend(s, names, colours);
    s << "</svg>\n";
    return s.str();
}

std::string fitted_svg(const Comparison& comparison, bool loss) {
    const FittedSeries* reference = nullptr;
    for (const auto& f : comparison.fitted) {
        if (f) {
            reference = &*f;
            break;
        }
    }
    std::ostringstream s;
    open(s, loss ? "Observed and fitted weekly losses" : "Observed and fitted weekly claims");
    if (reference == nullptr) {
        s << "</svg>\n";
        return s.str();
    }
    const auto& observed = loss ? reference->observed_loss : reference->observed_claims;
    double lo = *std::min_element(observed.begin(), observed.end());
    double hi = *std::max_element(observed.begin(), observed.end());
    for (const auto& f : comparison.fitted) {
        if (f) {
            const auto& v = loss ? f->fitted_loss : f->fitted_claims;
            lo = std::min(lo, *std::min_element(v.begin(), v.end()));
            hi = std::max(hi, *std::max_element(v.begin(), v.end()));
        }
    }
    const Axis axis = padded(lo, hi);
    y_axis(s, axis, loss ? "loss" : "claims per 100,000 homes");

    const std::size_t n = observed.size();
    const double plot = kWidth - kLeft - kRight;
    const auto x = [&](std::size_t t) {
        return kLeft + (n > 1 ? plot * static_cast<double>(t) / static_cast<double>(n - 1) : 0.0);
    };
    const auto polyline = [&](const std::vector<double>& v, const char* stroke, double width) {
        s << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
        for (std::size_t t = 0; t < v.size(); ++t) {
            s << (t ? " " : "") << num(x(t)) << ',' << num(axis.y(v[t]));
        }
        s << "\"/>\n";
    };
    s << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kHeight - kBottom + 16) << "\">"
      << format_date(reference->weeks.front()) << "</text>\n";
    s << "<text x=\"" << num(kWidth - kRight) << "\" y=\"" << num(kHeight - kBottom + 16)
      << "\" text-anchor=\"end\">" << format_date(reference->weeks.back()) << "</text>\n";

    std::vector<std::string> names{"observed"};
    std::vector<std::string> colours{"black"};
    polyline(observed, "black", 1.0);
    for (std::size_t k = 0; k < comparison.rows.size(); ++k) {
        if (comparison.fitted[k]) {
            const auto& f = *comparison.fitted[k];
            polyline(loss ? f.fitted_loss : f.fitted_claims, colour(k), 1.0);
            names.emplace_back(to_string(comparison.rows[k].kind));
            colours.emplace_back(colour(k));
        }
    }
    legend(s, names, colours);
    s << "</svg>\n";
    return s.str();
}

} // namespace wrisk::app
