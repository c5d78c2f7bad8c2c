#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "s2oct/eval.hpp"

namespace s2oct::svg {

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

// Quantile with linear interpolation between closest ranks (type 7).
inline double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    return colors[i % 5];
}

}  // namespace detail

struct EcdfSeries {
    std::string name;
    std::vector<double> times;
};

// One chart with the ECDF step curve of every series; the x axis spans
// [0, limit] and runs above the limit count as unsolved.
inline std::string ecdf_svg(const std::vector<EcdfSeries>& series, double limit,
                            const std::string& title = "Run times") {
    const double width = 640, height = 420;
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double t) { return left + pw * (limit > 0 ? t / limit : 0.0); };
    auto sy = [&](double f) { return top + ph * (1.0 - f); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << detail::esc(title) << "</text>\n";

    // Axes and gridlines.
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        os << "<line x1=\"" << left << "\" y1=\"" << sy(f) << "\" x2=\"" << left + pw << "\" y2=\""
           << sy(f) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << sy(f) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << detail::num(f) << "</text>\n";
        const double t = f * limit;
        os << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::num(t) << "</text>\n";
    }
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
       << top + ph << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-size=\"12\">seconds</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto steps = ecdf(series[si].times, limit);
        std::ostringstream path;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const auto [t, f] = steps[k];
            if (k == 0)
                path << "M" << sx(t) << " " << sy(f);
            else {
                path << " L" << sx(t) << " " << sy(steps[k - 1].second) << " L" << sx(t) << " "
                     << sy(f);
            }
        }
        os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << detail::palette(si)
           << "\" stroke-width=\"1.8\"/>\n";
        os << "<rect x=\"" << left + 12 << "\" y=\"" << top + 8 + 18 * static_cast<double>(si)
           << "\" width=\"14\" height=\"4\" fill=\"" << detail::palette(si) << "\"/>\n";
        os << "<text x=\"" << left + 32 << "\" y=\"" << top + 14 + 18 * static_cast<double>(si)
           << "\" font-size=\"12\">" << detail::esc(series[si].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

struct BoxPanel {
    std::string title;
    std::vector<double> values;
};

// Grid of Tukey boxplots (quartile box, median line, whiskers at the last
// datum within 1.5 IQR, outliers as circles) with a dashed zero line.
inline std::string boxplot_grid_svg(const std::vector<BoxPanel>& panels, int ncols,
                                    const std::string& title = "") {
    const double cell_w = 240, cell_h = 220, header = title.empty() ? 10.0 : 34.0;
    const int nrows = static_cast<int>((panels.size() + static_cast<std::size_t>(ncols) - 1) /
                                       static_cast<std::size_t>(ncols));
    const double width = cell_w * ncols, height = header + cell_h * nrows;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
           << detail::esc(title) << "</text>\n";

    for (std::size_t idx = 0; idx < panels.size(); ++idx) {
        const auto& panel = panels[idx];
        const double ox = cell_w * static_cast<double>(idx % static_cast<std::size_t>(ncols));
        const double oy = header + cell_h * static_cast<double>(idx / static_cast<std::size_t>(ncols));
        const double left = ox + 52, top = oy + 30, ph = cell_h - 60, pw = cell_w - 80;

        os << "<text x=\"" << ox + cell_w / 2 << "\" y=\"" << oy + 18
           << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::esc(panel.title)
           << "</text>\n";

        std::vector<double> sorted = panel.values;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty()) {
            os << "<text x=\"" << ox + cell_w / 2 << "\" y=\"" << top + ph / 2
               << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#888888\">no data</text>\n";
            continue;
        }

        const double q1 = detail::quantile(sorted, 0.25);
        const double med = detail::quantile(sorted, 0.50);
        const double q3 = detail::quantile(sorted, 0.75);
        const double iqr = q3 - q1;
        double whisk_lo = q1, whisk_hi = q3;
        for (double v : sorted)
            if (v >= q1 - 1.5 * iqr) {
                whisk_lo = v;
                break;
            }
        for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
            if (*it <= q3 + 1.5 * iqr) {
                whisk_hi = *it;
                break;
            }

        double vmin = std::min({sorted.front(), 0.0});
        double vmax = std::max({sorted.back(), 0.0});
        if (vmax - vmin < 1e-12) {
            vmin -= 0.5;
            vmax += 0.5;
        }
        const double pad = 0.08 * (vmax - vmin);
        vmin -= pad;
        vmax += pad;
        auto sy = [&](double v) { return top + ph * (1.0 - (v - vmin) / (vmax - vmin)); };
        const double cx = left + pw / 2, bw = pw * 0.4;

        // Axis with min/zero/max ticks.
        os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
           << top + ph << "\" stroke=\"black\"/>\n";
        for (double tick : {vmin + pad, 0.0, vmax - pad}) {
            os << "<text x=\"" << left - 6 << "\" y=\"" << sy(tick) + 4
               << "\" text-anchor=\"end\" font-size=\"10\">"
               << detail::num(std::round(tick * 1000.0) / 1000.0) << "</text>\n";
        }
        os << "<line x1=\"" << left << "\" y1=\"" << sy(0.0) << "\" x2=\"" << left + pw
           << "\" y2=\"" << sy(0.0) << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";

        os << "<line x1=\"" << cx << "\" y1=\"" << sy(whisk_lo) << "\" x2=\"" << cx << "\" y2=\""
           << sy(q1) << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << cx << "\" y1=\"" << sy(q3) << "\" x2=\"" << cx << "\" y2=\""
           << sy(whisk_hi) << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << cx - bw / 3 << "\" y1=\"" << sy(whisk_lo) << "\" x2=\""
           << cx + bw / 3 << "\" y2=\"" << sy(whisk_lo) << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << cx - bw / 3 << "\" y1=\"" << sy(whisk_hi) << "\" x2=\""
           << cx + bw / 3 << "\" y2=\"" << sy(whisk_hi) << "\" stroke=\"black\"/>\n";
        os << "<rect x=\"" << cx - bw / 2 << "\" y=\"" << sy(q3) << "\" width=\"" << bw
           << "\" height=\"" << std::max(0.0, sy(q1) - sy(q3))
           << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << cx - bw / 2 << "\" y1=\"" << sy(med) << "\" x2=\"" << cx + bw / 2
           << "\" y2=\"" << sy(med) << "\" stroke=\"black\" stroke-width=\"1.6\"/>\n";
        for (double v : sorted)
            if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr)
                os << "<circle cx=\"" << cx << "\" cy=\"" << sy(v)
                   << "\" r=\"2.4\" fill=\"none\" stroke=\"black\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace s2oct::svg
