#include "wallmem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

constexpr const char* kMetricsHeader = "s,gamma_over_j,gamma_ghz,entropy,sdwp,moved_sdwp,mean_walls";

void require_samples(const std::vector<SpinConfig>& samples, const char* what) {
    if (samples.empty()) throw Error(std::string(what) + ": no samples");
}

int ring_offset(int edge, int origin, int n) {
    int d = ((edge - origin) % n + n) % n;
    if (d > n / 2) d -= n;
    return d;
}

bool on_log_axis(double v) { return v > 0.0 && std::isfinite(v); }

std::vector<PointMetrics> sorted_by_ratio(std::vector<PointMetrics> points) {
    std::stable_sort(points.begin(), points.end(),
                     [](const PointMetrics& a, const PointMetrics& b) { return a.gamma_over_j < b.gamma_over_j; });
    return points;
}

}  // namespace

std::string to_string(WallAggregation a) {
    return a == WallAggregation::all_walls ? "all_walls" : "single_wall_only";
}

WallAggregation parse_wall_aggregation(const std::string& text) {
    if (text == "all_walls") return WallAggregation::all_walls;
    if (text == "single_wall_only") return WallAggregation::single_wall_only;
    throw ConfigError("unknown wall aggregation '" + text + "' (expected all_walls or single_wall_only)");
}

WallHistogram wall_histogram(const std::vector<SpinConfig>& samples, WallAggregation aggregation) {
    require_samples(samples, "wall_histogram");
    const int n = samples.front().size();
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
    for (const auto& cfg : samples) {
        if (cfg.size() != n) throw Error("wall_histogram: samples have inconsistent lengths");
        const auto walls = detect_walls(cfg);
        if (aggregation == WallAggregation::single_wall_only && walls.size() != 1) continue;
        for (const auto& w : walls) counts[w.edge] += 1.0;
    }
    return histogram_from_weights(counts);
}

WallHistogram histogram_from_weights(const Eigen::VectorXd& weights) {
    if ((weights.array() < 0.0).any()) throw Error("histogram weights must be non-negative");
    WallHistogram h;
    h.counts = weights;
    h.total = weights.sum();
    h.p = h.total > 0.0 ? Eigen::VectorXd(weights / h.total) : Eigen::VectorXd::Zero(weights.size());
    return h;
}

double entropy(const WallHistogram& hist) {
    const int n = hist.n_edges();
    if (n <= 1 || hist.empty()) return 0.0;
    double acc = 0.0;
    for (int e = 0; e < n; ++e) {
        const double p = hist.p[e];
        if (p > 0.0) acc -= p * std::log(p);
    }
    return std::clamp(acc / std::log(static_cast<double>(n)), 0.0, 1.0);
}

double sdwp(const std::vector<SpinConfig>& samples) {
    require_samples(samples, "sdwp");
    const auto single = std::count_if(samples.begin(), samples.end(),
                                      [](const SpinConfig& c) { return wall_count(c) == 1; });
    return static_cast<double>(single) / static_cast<double>(samples.size());
}

double moved_sdwp(const std::vector<SpinConfig>& samples, const RingSpec& spec) {
    require_samples(samples, "moved_sdwp");
    std::size_t moved = 0;
    for (const auto& cfg : samples) {
        const auto walls = detect_walls(cfg);
        if (walls.size() != 1) continue;
        if (walls[0].edge != spec.initial_wall_edge || walls[0].orientation == WallOrientation::down) ++moved;
    }
    return static_cast<double>(moved) / static_cast<double>(samples.size());
}

double mean_wall_count(const std::vector<SpinConfig>& samples) {
    require_samples(samples, "mean_wall_count");
    double total = 0.0;
    for (const auto& cfg : samples) total += wall_count(cfg);
    return total / static_cast<double>(samples.size());
}

std::vector<double> spatial_density(const std::vector<SpinConfig>& samples, const RingSpec& spec,
                                    bool exclude_initial, int max_distance, bool folded) {
    require_samples(samples, "spatial_density");
    const int n = samples.front().size();
    if (max_distance < 0 || max_distance > n / 2) {
        throw Error("spatial_density: max_distance must lie in [0, " + std::to_string(n / 2) + "]");
    }
    std::vector<double> per_offset(static_cast<std::size_t>(2 * max_distance + 1), 0.0);
    for (const auto& cfg : samples) {
        if (cfg.size() != n) throw Error("spatial_density: samples have inconsistent lengths");
        for (const auto& w : detect_walls(cfg)) {
            if (exclude_initial && w.edge == spec.initial_wall_edge) continue;
            const int d = ring_offset(w.edge, spec.initial_wall_edge, n);
            if (std::abs(d) > max_distance) continue;
            per_offset[static_cast<std::size_t>(d + max_distance)] += 1.0;
        }
    }
    const double count = static_cast<double>(samples.size());
    for (auto& v : per_offset) v /= count;
    if (!folded) return per_offset;

    std::vector<double> out(static_cast<std::size_t>(max_distance + 1));
    out[0] = per_offset[static_cast<std::size_t>(max_distance)];
    for (int d = 1; d <= max_distance; ++d) {
        out[static_cast<std::size_t>(d)] =
            0.5 * (per_offset[static_cast<std::size_t>(max_distance + d)] +
                   per_offset[static_cast<std::size_t>(max_distance - d)]);
    }
    return out;
}

PointMetrics point_metrics(const PointRecord& record, const RingSpec& spec, WallAggregation aggregation) {
    if (record.failed()) throw Error("point s=" + format_double(record.s) + " failed: " + *record.error);
    PointMetrics m;
    m.s = record.s;
    m.gamma_over_j = record.gamma_over_j;
    m.gamma_ghz = record.gamma_ghz;
    m.entropy = entropy(wall_histogram(record.samples, aggregation));
    m.sdwp = sdwp(record.samples);
    m.moved_sdwp = moved_sdwp(record.samples, spec);
    m.mean_walls = mean_wall_count(record.samples);
    return m;
}

Onset gamma_init(const std::vector<PointMetrics>& points, double threshold) {
    std::vector<PointMetrics> usable;
    for (const auto& p : sorted_by_ratio(points)) {
        if (p.gamma_ghz > 0.0) usable.push_back(p);
    }
    Onset onset;
    if (usable.empty() || usable.front().entropy >= threshold) return onset;
    for (std::size_t i = 1; i < usable.size(); ++i) {
        const auto& a = usable[i - 1];
        const auto& b = usable[i];
        if (b.entropy < threshold) continue;
        const double w = (threshold - a.entropy) / (b.entropy - a.entropy);
        const double lg = std::log10(a.gamma_ghz) + w * (std::log10(b.gamma_ghz) - std::log10(a.gamma_ghz));
        onset.found = true;
        onset.gamma_ghz = std::pow(10.0, lg);
        if (w == 1.0) onset.gamma_ghz = b.gamma_ghz;
        if (!std::isfinite(b.gamma_over_j)) {
            onset.gamma_over_j = w == 0.0 ? a.gamma_over_j : b.gamma_over_j;
        } else if (on_log_axis(a.gamma_over_j)) {
            const double lr = std::log10(a.gamma_over_j) +
                              w * (std::log10(b.gamma_over_j) - std::log10(a.gamma_over_j));
            onset.gamma_over_j = w == 1.0 ? b.gamma_over_j : std::pow(10.0, lr);
        } else {
            onset.gamma_over_j = b.gamma_over_j;
        }
        return onset;
    }
    return onset;
}

WpmBounds wpm_bounds(const std::vector<PointMetrics>& points, double lo, double hi) {
    if (!(lo < hi)) throw Error("wpm_bounds: lo must be below hi");
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : sorted_by_ratio(points)) {
        if (on_log_axis(p.gamma_over_j)) xy.emplace_back(std::log10(p.gamma_over_j), p.entropy);
    }
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    const auto inside = [&](double h) { return h > lo && h < hi; };
    const auto extend = [&](double x) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    };
    for (const auto& [x, h] : xy) {
        if (inside(h)) extend(x);
    }
    // h is linear on each segment, so the part inside the band is one
    // interval; its closure gives the bounds.
    for (std::size_t i = 1; i < xy.size(); ++i) {
        const auto [x0, h0] = xy[i - 1];
        const auto [x1, h1] = xy[i];
        double w_lo = 0.0, w_hi = 1.0;
        if (h0 == h1) {
            if (!inside(h0)) continue;
        } else {
            const double wa = (lo - h0) / (h1 - h0);
            const double wb = (hi - h0) / (h1 - h0);
            w_lo = std::max(0.0, std::min(wa, wb));
            w_hi = std::min(1.0, std::max(wa, wb));
            if (!(w_lo < w_hi)) continue;
        }
        extend(x0 + w_lo * (x1 - x0));
        extend(x0 + w_hi * (x1 - x0));
    }
    WpmBounds b;
    if (!(xmin <= xmax)) return b;
    b.found = true;
    b.gamma_over_j_min = std::pow(10.0, xmin);
    b.gamma_over_j_max = std::pow(10.0, xmax);
    b.width_decades = xmax - xmin;
    return b;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& tau_gamma) {
    if (tau_gamma.size() < 2) throw Error("scaling_fit: need at least 2 (tau, Gamma_init) pairs");
    const auto m = static_cast<Eigen::Index>(tau_gamma.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto [tau, gamma] = tau_gamma[static_cast<std::size_t>(i)];
        if (!(tau > 0.0) || !(gamma > 0.0)) throw Error("scaling_fit: tau and Gamma_init must be positive");
        a(i, 0) = std::log10(tau);
        a(i, 1) = 1.0;
        y[i] = -std::log10(gamma);
    }
    if ((a.col(0).array() == a(0, 0)).all()) throw Error("scaling_fit: all tau values are equal");
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
    ScalingFit fit;
    fit.slope = coef[0];
    fit.intercept = coef[1];
    const double ss_res = (a * coef - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RingSpec spec_from_header(const Json& header) {
    const auto it = header.find("config");
    if (it == header.end() || !it->is_object()) throw Error("archive header has no config");
    RingSpec spec;
    const auto& c = *it;
    try {
        spec.n = c.at("n").get<int>();
        spec.j_programmed = c.value("j_programmed", 1.0);
        spec.initial_wall_edge = c.value("initial_wall_edge", 0);
        spec.faulty_sites = c.value("faulty_sites", std::vector<int>{});
    } catch (const Json::exception& e) {
        throw Error(std::string("archive header: ") + e.what());
    }
    return validated(spec);
}

AnalysisReport analyze_archive(const SampleArchive& archive, const RingSpec& spec,
                               const AnalysisOptions& options) {
    AnalysisReport report;
    report.axis = options.axis;
    for (const auto& r : archive.records) {
        if (r.failed()) {
            report.failures.emplace_back(r.s, *r.error);
            continue;
        }
        if (!r.samples.empty() && r.samples.front().size() != spec.n) {
            throw Error("archive samples have " + std::to_string(r.samples.front().size()) +
                        " sites but the ring has " + std::to_string(spec.n));
        }
        report.points.push_back(point_metrics(r, spec, options.aggregation));
    }

    std::vector<double> xs, ys;
    for (const auto& p : report.points) {
        if (options.axis == FitAxis::s) {
            xs.push_back(p.s);
        } else if (on_log_axis(p.gamma_over_j)) {
            xs.push_back(std::log10(p.gamma_over_j));
        } else {
            continue;
        }
        ys.push_back(p.entropy);
    }
    if (xs.size() >= 4) {
        const auto guess = options.axis == FitAxis::s ? sigmoid_guess_s_axis() : sigmoid_guess_log_axis(xs, ys);
        report.sigmoid = fit_sigmoid(xs, ys, guess);
    }
    report.onset = gamma_init(report.points, options.onset_threshold);
    report.wpm = wpm_bounds(report.points, options.wpm_lo, options.wpm_hi);
    return report;
}

std::string metrics_csv(const MetricsTable& table) {
    std::string out;
    for (const auto& [key, value] : table.metadata) out += "# " + key + "=" + value + "\n";
    out += kMetricsHeader;
    out += '\n';
    for (const auto& p : table.points) {
        out += format_double(p.s) + ',' + format_double(p.gamma_over_j) + ',' + format_double(p.gamma_ghz) + ',' +
               format_double(p.entropy) + ',' + format_double(p.sdwp) + ',' + format_double(p.moved_sdwp) + ',' +
               format_double(p.mean_walls) + '\n';
    }
    return out;
}

MetricsTable parse_metrics_csv(const std::string& content) {
    MetricsTable table;
    bool header_seen = false;
    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        const std::string where = "metrics line " + std::to_string(i + 1) + ": ";
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                table.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
            }
            continue;
        }
        if (!header_seen) {
            if (line != kMetricsHeader) throw Error(where + "expected header '" + kMetricsHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 7) throw Error(where + "expected 7 fields");
        double v[7];
        for (std::size_t k = 0; k < 7; ++k) {
            const auto parsed = parse_double(trim(fields[k]));
            if (!parsed) throw Error(where + "not a number: '" + std::string(fields[k]) + "'");
            v[k] = *parsed;
        }
        table.points.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    if (!header_seen) throw Error("metrics CSV has no header");
    if (table.points.empty()) throw Error("metrics CSV has no data rows");
    return table;
}

MetricsTable metrics_table(const AnalysisReport& report, const Json& archive_header) {
    MetricsTable table;
    table.points = report.points;
    if (const auto it = archive_header.find("config"); it != archive_header.end()) {
        for (const char* key : {"n", "j_programmed", "initial_wall_edge", "ramp_us", "hold_us", "backend",
                                "seed", "shots_per_point", "temperature_mk", "dt_ns"}) {
            if (!it->contains(key)) continue;
            const auto& v = (*it)[key];
            table.metadata[key] = v.is_string() ? v.get<std::string>()
                                  : v.is_number_float() ? format_double(v.get<double>())
                                                         : v.dump();
        }
        if (it->contains("faulty_sites")) {
            std::string sites;
            for (const auto& f : (*it)["faulty_sites"]) sites += (sites.empty() ? "" : " ") + f.dump();
            table.metadata["faulty_sites"] = sites;
        }
    }
    if (const auto it = archive_header.find("schedule_name"); it != archive_header.end()) {
        table.metadata["schedule"] = it->get<std::string>();
    }
    if (const auto it = archive_header.find("schedule_synthetic"); it != archive_header.end()) {
        table.metadata["schedule_synthetic"] = it->dump();
    }
    if (const auto it = archive_header.find("started_at"); it != archive_header.end()) {
        table.metadata["started_at"] = it->get<std::string>();
    }
    return table;
}

Json fit_report_json(const AnalysisReport& report) {
    const auto num = [](double v) -> Json {
        if (std::isfinite(v)) return v;
        return format_double(v);
    };
    Json j;
    j["axis"] = report.axis == FitAxis::s ? "s" : "log10_gamma_over_j";
    if (report.sigmoid) {
        const auto& f = *report.sigmoid;
        j["sigmoid"] = {{"l", num(f.l)},
                        {"x0", num(f.x0)},
                        {"k", num(f.k)},
                        {"residual_rss", num(f.residual_rss)},
                        {"converged", f.converged},
                        {"iterations", f.iterations},
                        {"value_at_x0", num(f(f.x0))}};
    } else {
        j["sigmoid"] = nullptr;
    }
    j["gamma_init"] = {{"found", report.onset.found}};
    if (report.onset.found) {
        j["gamma_init"]["gamma_ghz"] = num(report.onset.gamma_ghz);
        j["gamma_init"]["gamma_over_j"] = num(report.onset.gamma_over_j);
    }
    j["wpm"] = {{"found", report.wpm.found}};
    if (report.wpm.found) {
        j["wpm"]["gamma_over_j_min"] = num(report.wpm.gamma_over_j_min);
        j["wpm"]["gamma_over_j_max"] = num(report.wpm.gamma_over_j_max);
        j["wpm"]["width_decades"] = num(report.wpm.width_decades);
    }
    Json failures = Json::array();
    for (const auto& [s, msg] : report.failures) failures.push_back({{"s", s}, {"error", msg}});
    j["failures"] = failures;
    return j;
}

std::string density_csv(const SampleArchive& archive, const RingSpec& spec, bool exclude_initial) {
    const int max_d = spec.n / 2;
    std::string out = "s,gamma_over_j";
    for (int d = 0; d <= max_d; ++d) out += ",d" + std::to_string(d);
    out += '\n';
    for (const auto& r : archive.records) {
        if (r.failed()) continue;
        out += format_double(r.s) + ',' + format_double(r.gamma_over_j);
        for (double v : spatial_density(r.samples, spec, exclude_initial, max_d)) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace wallmem
