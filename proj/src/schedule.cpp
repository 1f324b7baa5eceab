#include "wallmem/schedule.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

struct Row {
    ScheduleKnot knot;
    std::size_t line;
};

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void validate(const std::vector<Row>& rows) {
    if (rows.size() < 2) {
        throw ConfigError("schedule needs at least 2 knots, got " + std::to_string(rows.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [k, line] = rows[i];
        if (!std::isfinite(k.s) || !std::isfinite(k.a_ghz) || !std::isfinite(k.b_ghz)) {
            throw ConfigError(at_line(line) + "non-finite value");
        }
        if (k.a_ghz < 0.0 || k.b_ghz < 0.0) {
            throw ConfigError(at_line(line) + "negative energy");
        }
        if (i == 0) continue;
        const auto& prev = rows[i - 1].knot;
        if (!(k.s > prev.s)) {
            throw ConfigError(at_line(line) + "non-monotone s (" + format_double(k.s) + " after " +
                              format_double(prev.s) + ")");
        }
        if (k.a_ghz > prev.a_ghz) {
            throw ConfigError(at_line(line) + "A(s) increases with s");
        }
        if (k.b_ghz < prev.b_ghz) {
            throw ConfigError(at_line(line) + "B(s) decreases with s");
        }
    }
    if (rows.front().knot.s != 0.0) {
        throw ConfigError(at_line(rows.front().line) + "first knot must have s = 0");
    }
    if (rows.back().knot.s != 1.0) {
        throw ConfigError(at_line(rows.back().line) + "last knot must have s = 1");
    }
}

}  // namespace

ScheduleTable::ScheduleTable(std::string name, std::vector<ScheduleKnot> knots)
    : name_(std::move(name)), knots_(std::move(knots)) {
    std::vector<Row> rows;
    rows.reserve(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); ++i) rows.push_back({knots_[i], i + 1});
    validate(rows);
}

ScheduleTable ScheduleTable::synthetic_default() {
    constexpr int count = 1001;
    std::vector<ScheduleKnot> knots;
    knots.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double s = (i == count - 1) ? 1.0 : static_cast<double>(i) / (count - 1);
        knots.push_back({s, 6.0 * (1.0 - s) * (1.0 - s), 10.0 * s * s});
    }
    ScheduleTable table("synthetic-quadratic", std::move(knots));
    table.synthetic_ = true;
    return table;
}

ScheduleTable load_schedule(std::string_view csv, std::string name) {
    std::vector<Row> rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string_view line : split_lines(csv)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            const auto cols = split(line, ',');
            if (cols.size() != 3 || trim(cols[0]) != "s" || trim(cols[1]) != "A_GHz" ||
                trim(cols[2]) != "B_GHz") {
                throw ConfigError(at_line(line_no) + "expected header 's,A_GHz,B_GHz'");
            }
            header_seen = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 3) {
            throw ConfigError(at_line(line_no) + "malformed row, expected 3 columns");
        }
        double v[3];
        for (int c = 0; c < 3; ++c) {
            const auto parsed = parse_double(trim(cols[c]));
            if (!parsed) {
                throw ConfigError(at_line(line_no) + "malformed row, '" + std::string(trim(cols[c])) +
                                  "' is not a number");
            }
            v[c] = *parsed;
        }
        rows.push_back({{v[0], v[1], v[2]}, line_no});
    }
    if (!header_seen) throw ConfigError("schedule CSV is empty");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.knot.s < b.knot.s; });
    validate(rows);

    std::vector<ScheduleKnot> knots;
    knots.reserve(rows.size());
    for (const auto& r : rows) knots.push_back(r.knot);
    return ScheduleTable(std::move(name), std::move(knots));
}

ScheduleTable load_schedule_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open schedule file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_schedule(buf.str(), path);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Energies interpolate(const ScheduleTable& table, double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error("anneal fraction s = " + format_double(s) + " outside [0, 1]");
    }
    const auto& knots = table.knots();
    auto hi = std::upper_bound(knots.begin(), knots.end(), s,
                               [](double v, const ScheduleKnot& k) { return v < k.s; });
    if (hi == knots.end()) return {knots.back().a_ghz, knots.back().b_ghz};
    const auto lo = std::prev(hi);
    if (lo->s == s) return {lo->a_ghz, lo->b_ghz};
    const double w = (s - lo->s) / (hi->s - lo->s);
    return {lo->a_ghz + w * (hi->a_ghz - lo->a_ghz), lo->b_ghz + w * (hi->b_ghz - lo->b_ghz)};
}

EnergyPoint energy_point(const ScheduleTable& table, double s, double j_programmed) {
    if (!(j_programmed > 0.0 && j_programmed <= 1.0)) {
        throw Error("programmed coupling J = " + format_double(j_programmed) + " outside (0, 1]");
    }
    const auto [a, b] = interpolate(table, s);
    EnergyPoint p{a / 2.0, b * j_programmed / 2.0, 0.0, false};
    const double denom = b * j_programmed;
    if (denom > 0.0) {
        p.gamma_over_j = a / denom;
    } else {
        p.gamma_over_j = std::numeric_limits<double>::infinity();
        p.infinite = true;
    }
    return p;
}

Waveform build_reverse_waveform(double s_pause, double ramp_us, double hold_us) {
    if (!(s_pause >= 0.0 && s_pause <= 1.0)) {
        throw ConfigError("s_pause = " + format_double(s_pause) + " outside [0, 1]");
    }
    if (!(ramp_us > 0.0) || !std::isfinite(ramp_us)) {
        throw ConfigError("ramp_us must be positive, got " + format_double(ramp_us));
    }
    if (!(hold_us >= 0.0) || !std::isfinite(hold_us)) {
        throw ConfigError("hold_us must be non-negative, got " + format_double(hold_us));
    }
    Waveform w;
    w.s_pause_ = s_pause;
    w.ramp_us_ = ramp_us;
    w.hold_us_ = hold_us;
    w.points_ = {{0.0, 1.0},
                 {ramp_us, s_pause},
                 {ramp_us + hold_us, s_pause},
                 {2.0 * ramp_us + hold_us, 1.0}};
    return w;
}

std::vector<WaveformPoint> Waveform::distinct_breakpoints() const {
    std::vector<WaveformPoint> out;
    for (const auto& p : points_) {
        if (out.empty() || p.t_us > out.back().t_us) out.push_back(p);
    }
    return out;
}

std::string Waveform::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : points_) j.push_back({p.t_us, p.s});
    return j.dump();
}

double s_at(const Waveform& w, double t_us) {
    const double total = w.duration_us();
    const double slack = 1e-12 * std::max(1.0, total);
    if (!(t_us >= -slack && t_us <= total + slack)) {
        throw Error("time " + format_double(t_us) + " us outside waveform [0, " +
                    format_double(total) + "]");
    }
    const double ramp = w.ramp_us();
    const double sp = w.s_pause();
    if (t_us <= ramp) return 1.0 + (sp - 1.0) * std::max(t_us, 0.0) / ramp;
    if (t_us <= ramp + w.hold_us()) return sp;
    const double back = std::min(t_us, total) - ramp - w.hold_us();
    return sp + (1.0 - sp) * back / ramp;
}

std::vector<double> smooth_piece_bounds(const ScheduleTable& table, const Waveform& waveform) {
    const auto points = waveform.distinct_breakpoints();
    std::vector<double> bounds;
    for (std::size_t seg = 0; seg + 1 < points.size(); ++seg) {
        const auto& p0 = points[seg];
        const auto& p1 = points[seg + 1];
        bounds.push_back(p0.t_us);
        if (p0.s == p1.s) continue;
        const double lo = std::min(p0.s, p1.s);
        const double hi = std::max(p0.s, p1.s);
        for (const auto& k : table.knots()) {
            if (k.s <= lo || k.s >= hi) continue;
            bounds.push_back(p0.t_us + (k.s - p0.s) / (p1.s - p0.s) * (p1.t_us - p0.t_us));
        }
    }
    bounds.push_back(points.back().t_us);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    return bounds;
}

}  // namespace wallmem
