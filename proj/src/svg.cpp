#include "wallmem/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool placeable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

double axis_value(double v, bool log) { return log ? std::log10(v) : v; }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish(bool log) {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            const double pad = log ? 0.5 : std::max(0.5, std::abs(lo) * 0.1);
            lo -= pad;
            hi += pad;
        }
    }
};

/// Tick positions in axis coordinates: decades on a log axis, 1-2-5 steps otherwise.
std::vector<double> ticks(const Range& r, bool log) {
    std::vector<double> out;
    if (log) {
        const double first = std::ceil(r.lo - 1e-9);
        const double span = r.hi - r.lo;
        const double step = std::max(1.0, std::ceil(span / 8.0));
        for (double d = first; d <= r.hi + 1e-9; d += step) out.push_back(d);
        return out;
    }
    const double raw = (r.hi - r.lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    for (double t = std::ceil(r.lo / step - 1e-9) * step; t <= r.hi + 1e-9 * step; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    if (spec.series.empty()) throw Error("plot: no series");
    Range xr, yr;
    for (const auto& s : spec.series) {
        if (s.xs.size() != s.ys.size()) throw Error("plot: series '" + s.label + "' has mismatched lengths");
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (placeable(s.xs[i], spec.log_x) && placeable(s.ys[i], spec.log_y)) {
                xr.add(axis_value(s.xs[i], spec.log_x));
                yr.add(axis_value(s.ys[i], spec.log_y));
            }
        }
    }
    xr.finish(spec.log_x);
    yr.finish(spec.log_y);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double ax) { return kLeft + (ax - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double ay) { return kTop + (1.0 - (ay - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(spec.title) + "</text>\n";

    for (double t : ticks(xr, spec.log_x)) {
        const double x = px(t);
        const std::string label = spec.log_x ? "1e" + tick_label(t) : tick_label(t);
        out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(kTop + ph) +
               "\" stroke=\"#e0e0e0\"/>\n";
        out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" + label +
               "</text>\n";
    }
    for (double t : ticks(yr, spec.log_y)) {
        const double y = py(t);
        const std::string label = spec.log_y ? "1e" + tick_label(t) : tick_label(t);
        out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" + fmt(y) +
               "\" stroke=\"#e0e0e0\"/>\n";
        out += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" + label +
               "</text>\n";
    }
    out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 14) + "\" text-anchor=\"middle\">" +
           escape(spec.x_label) + "</text>\n";
    out += "<text transform=\"translate(18 " + fmt(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        std::vector<std::string> runs(1);
        std::string marks;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!placeable(s.xs[i], spec.log_x) || !placeable(s.ys[i], spec.log_y)) {
                if (!runs.back().empty()) runs.emplace_back();
                continue;
            }
            const double x = px(axis_value(s.xs[i], spec.log_x));
            const double y = py(axis_value(s.ys[i], spec.log_y));
            runs.back() += (runs.back().empty() ? "" : " ") + fmt(x) + "," + fmt(y);
            if (s.markers) {
                marks += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
            }
        }
        if (s.line) {
            for (const auto& run : runs) {
                if (run.empty()) continue;
                out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" +
                       run + "\"/>\n";
            }
        }
        out += marks;
        const double ly = kTop + 16 + 16 * static_cast<double>(k);
        out += "<line x1=\"" + fmt(kLeft + pw - 170) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(kLeft + pw - 150) +
               "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(kLeft + pw - 144) + "\" y=\"" + fmt(ly) + "\">" + escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace wallmem
