#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "riskbias/errors.hpp"

namespace riskbias {

namespace detail {

inline std::string fmt_g(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

// Round step to a 1/2/5 ladder for readable axis ticks.
inline double nice_step(double span, int target_ticks) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

} // namespace detail

// Multi-series line chart rendered as a standalone SVG string. Enough for
// convergence plots and grid slices; not a general charting library.
class SvgLinePlot {
  public:
    SvgLinePlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size() || x.empty())
            throw ConfigError("SvgLinePlot: series needs matching nonempty x/y");
        series_.push_back({std::move(name), std::move(x), std::move(y)});
    }

    // Horizontal reference line (e.g. the nominal level).
    void add_hline(double y) { hlines_.push_back(y); }

    std::string str() const {
        if (series_.empty()) throw ConfigError("SvgLinePlot: no series");
        const double W = 760, H = 480, L = 72, R = 160, T = 42, B = 54;
        const double pw = W - L - R, ph = H - T - B;

        double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
        double y_lo = x_lo, y_hi = -x_lo;
        for (const auto& s : series_) {
            for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
            for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
        }
        for (double v : hlines_) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
        if (x_hi <= x_lo) x_hi = x_lo + 1.0;
        if (y_hi <= y_lo) y_hi = y_lo + 1.0;
        const double y_pad = 0.05 * (y_hi - y_lo);
        y_lo -= y_pad;
        y_hi += y_pad;

        const auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * pw; };
        const auto py = [&](double y) { return T + (y_hi - y) / (y_hi - y_lo) * ph; };

        std::string svg;
        svg += "<svg xmlns='http://www.w3.org/2000/svg' width='" + detail::fmt_g(W) +
               "' height='" + detail::fmt_g(H) + "' font-family='sans-serif' font-size='12'>\n";
        svg += "<rect width='100%' height='100%' fill='white'/>\n";
        svg += "<text x='" + detail::fmt_g(L + pw / 2) + "' y='24' text-anchor='middle' "
               "font-size='15'>" + title_ + "</text>\n";

        // axes and ticks
        const double xs = detail::nice_step(x_hi - x_lo, 6);
        const double ys = detail::nice_step(y_hi - y_lo, 6);
        for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-12 * xs; t += xs) {
            const double X = px(t);
            svg += "<line x1='" + detail::fmt_g(X) + "' y1='" + detail::fmt_g(T) + "' x2='" +
                   detail::fmt_g(X) + "' y2='" + detail::fmt_g(T + ph) +
                   "' stroke='#e0e0e0'/>\n";
            svg += "<text x='" + detail::fmt_g(X) + "' y='" + detail::fmt_g(T + ph + 16) +
                   "' text-anchor='middle'>" + detail::fmt_g(t, 4) + "</text>\n";
        }
        for (double t = std::ceil(y_lo / ys) * ys; t <= y_hi + 1e-12 * ys; t += ys) {
            const double Y = py(t);
            svg += "<line x1='" + detail::fmt_g(L) + "' y1='" + detail::fmt_g(Y) + "' x2='" +
                   detail::fmt_g(L + pw) + "' y2='" + detail::fmt_g(Y) +
                   "' stroke='#e0e0e0'/>\n";
            svg += "<text x='" + detail::fmt_g(L - 6) + "' y='" + detail::fmt_g(Y + 4) +
                   "' text-anchor='end'>" + detail::fmt_g(t, 4) + "</text>\n";
        }
        svg += "<rect x='" + detail::fmt_g(L) + "' y='" + detail::fmt_g(T) + "' width='" +
               detail::fmt_g(pw) + "' height='" + detail::fmt_g(ph) +
               "' fill='none' stroke='#555'/>\n";
        svg += "<text x='" + detail::fmt_g(L + pw / 2) + "' y='" + detail::fmt_g(H - 12) +
               "' text-anchor='middle'>" + x_label_ + "</text>\n";
        svg += "<text x='18' y='" + detail::fmt_g(T + ph / 2) +
               "' text-anchor='middle' transform='rotate(-90 18 " + detail::fmt_g(T + ph / 2) +
               ")'>" + y_label_ + "</text>\n";

        for (double v : hlines_) {
            svg += "<line x1='" + detail::fmt_g(L) + "' y1='" + detail::fmt_g(py(v)) + "' x2='" +
                   detail::fmt_g(L + pw) + "' y2='" + detail::fmt_g(py(v)) +
                   "' stroke='#888' stroke-dasharray='5,4'/>\n";
        }

        static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                        "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            const char* color = kColors[si % 8];
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                pts += detail::fmt_g(px(s.x[i]));
                pts += ',';
                pts += detail::fmt_g(py(s.y[i]));
                pts += ' ';
            }
            svg += "<polyline points='" + pts + "' fill='none' stroke='" + color +
                   "' stroke-width='1.6'/>\n";
            const double ly = T + 16 + 18 * static_cast<double>(si);
            svg += "<line x1='" + detail::fmt_g(L + pw + 12) + "' y1='" + detail::fmt_g(ly - 4) +
                   "' x2='" + detail::fmt_g(L + pw + 34) + "' y2='" + detail::fmt_g(ly - 4) +
                   "' stroke='" + color + "' stroke-width='2'/>\n";
            svg += "<text x='" + detail::fmt_g(L + pw + 40) + "' y='" + detail::fmt_g(ly) + "'>" +
                   s.name + "</text>\n";
        }
        svg += "</svg>\n";
        return svg;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("SvgLinePlot: cannot open " + path);
        const std::string body = str();
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
    }

  private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<double> hlines_;
};

// Regular-grid heatmap (row-major values, rows indexed by p2, columns by p1)
// with a blue-white-red ramp centered on the value midpoint.
inline std::string svg_heatmap(const std::string& title, const std::string& x_label,
                               const std::string& y_label, const std::vector<double>& xs,
                               const std::vector<double>& ys, const std::vector<double>& values) {
    if (xs.empty() || ys.empty() || values.size() != xs.size() * ys.size())
        throw ConfigError("svg_heatmap: values must be a full xs-by-ys grid");
    const double W = 720, H = 520, L = 80, R = 110, T = 42, B = 54;
    const double pw = W - L - R, ph = H - T - B;
    const double cw = pw / static_cast<double>(xs.size());
    const double ch = ph / static_cast<double>(ys.size());

    double v_lo = *std::min_element(values.begin(), values.end());
    double v_hi = *std::max_element(values.begin(), values.end());
    if (v_hi <= v_lo) v_hi = v_lo + 1e-12;

    const auto color = [&](double v) {
        const double t = (v - v_lo) / (v_hi - v_lo);
        // blue (low) -> white -> red (high)
        int r, g, b;
        if (t < 0.5) {
            const double s = t / 0.5;
            r = static_cast<int>(59 + s * (255 - 59));
            g = static_cast<int>(76 + s * (255 - 76));
            b = static_cast<int>(192 + s * (255 - 192));
        } else {
            const double s = (t - 0.5) / 0.5;
            r = static_cast<int>(255 - s * (255 - 180));
            g = static_cast<int>(255 - s * (255 - 4));
            b = static_cast<int>(255 - s * (255 - 38));
        }
        char buf[10];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::string svg;
    svg += "<svg xmlns='http://www.w3.org/2000/svg' width='" + detail::fmt_g(W) + "' height='" +
           detail::fmt_g(H) + "' font-family='sans-serif' font-size='12'>\n";
    svg += "<rect width='100%' height='100%' fill='white'/>\n";
    svg += "<text x='" + detail::fmt_g(L + pw / 2) + "' y='24' text-anchor='middle' "
           "font-size='15'>" + title + "</text>\n";
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            const double v = values[yi * xs.size() + xi];
            // row 0 at the bottom
            const double X = L + cw * static_cast<double>(xi);
            const double Y = T + ph - ch * static_cast<double>(yi + 1);
            svg += "<rect x='" + detail::fmt_g(X) + "' y='" + detail::fmt_g(Y) + "' width='" +
                   detail::fmt_g(cw + 0.5) + "' height='" + detail::fmt_g(ch + 0.5) +
                   "' fill='" + color(v) + "'/>\n";
        }
    }
    svg += "<rect x='" + detail::fmt_g(L) + "' y='" + detail::fmt_g(T) + "' width='" +
           detail::fmt_g(pw) + "' height='" + detail::fmt_g(ph) +
           "' fill='none' stroke='#555'/>\n";

    const std::size_t x_tick = std::max<std::size_t>(1, xs.size() / 6);
    for (std::size_t xi = 0; xi < xs.size(); xi += x_tick) {
        const double X = L + cw * (static_cast<double>(xi) + 0.5);
        svg += "<text x='" + detail::fmt_g(X) + "' y='" + detail::fmt_g(T + ph + 16) +
               "' text-anchor='middle'>" + detail::fmt_g(xs[xi], 4) + "</text>\n";
    }
    const std::size_t y_tick = std::max<std::size_t>(1, ys.size() / 6);
    for (std::size_t yi = 0; yi < ys.size(); yi += y_tick) {
        const double Y = T + ph - ch * (static_cast<double>(yi) + 0.5);
        svg += "<text x='" + detail::fmt_g(L - 6) + "' y='" + detail::fmt_g(Y + 4) +
               "' text-anchor='end'>" + detail::fmt_g(ys[yi], 4) + "</text>\n";
    }
    svg += "<text x='" + detail::fmt_g(L + pw / 2) + "' y='" + detail::fmt_g(H - 12) +
           "' text-anchor='middle'>" + x_label + "</text>\n";
    svg += "<text x='20' y='" + detail::fmt_g(T + ph / 2) +
           "' text-anchor='middle' transform='rotate(-90 20 " + detail::fmt_g(T + ph / 2) +
           ")'>" + y_label + "</text>\n";

    // colorbar
    const double bx = L + pw + 26, bw = 16;
    const int steps = 48;
    for (int i = 0; i < steps; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / steps;
        const double Y = T + ph * (1.0 - (static_cast<double>(i) + 1.0) / steps);
        svg += "<rect x='" + detail::fmt_g(bx) + "' y='" + detail::fmt_g(Y) + "' width='" +
               detail::fmt_g(bw) + "' height='" + detail::fmt_g(ph / steps + 0.5) + "' fill='" +
               color(v_lo + frac * (v_hi - v_lo)) + "'/>\n";
    }
    svg += "<text x='" + detail::fmt_g(bx + bw + 6) + "' y='" + detail::fmt_g(T + 10) + "'>" +
           detail::fmt_g(v_hi, 4) + "</text>\n";
    svg += "<text x='" + detail::fmt_g(bx + bw + 6) + "' y='" + detail::fmt_g(T + ph) + "'>" +
           detail::fmt_g(v_lo, 4) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

inline void save_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("save_text: cannot open " + path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw ConfigError("save_text: write failed for " + path);
}

} // namespace riskbias
