// wallmem: run reverse-anneal sweeps on odd Ising rings and analyze the
// domain-wall statistics of the readouts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wallmem/analysis.hpp"
#include "wallmem/archive.hpp"
#include "wallmem/embed.hpp"
#include "wallmem/error.hpp"
#include "wallmem/harness.hpp"
#include "wallmem/svg.hpp"
#include "wallmem/text.hpp"

namespace fs = std::filesystem;
using namespace wallmem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;
};

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

/// "runs/desk.jsonl.gz" -> "runs/desk"
std::string artifact_stem(const std::string& path) {
    fs::path p(path);
    if (p.extension() == ".gz") p.replace_extension();
    if (p.extension() == ".jsonl" || p.extension() == ".json" || p.extension() == ".csv") p.replace_extension();
    return p.string();
}

std::string in_out_dir(const Globals& g, const std::string& path) {
    if (g.out.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(g.out) / path).string();
}

std::string label_for(const std::string& path) {
    fs::path p(path);
    std::string name = p.filename().string();
    for (const char* suffix : {".csv", ".metrics", ".density"}) {
        const std::string s(suffix);
        if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
            name.resize(name.size() - s.size());
        }
    }
    return name;
}

void ensure_parent(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_output(const std::string& path, const std::string& content) {
    ensure_parent(path);
    write_file_atomic(path, content);
}

std::string summary_line(const AnalysisReport& report) {
    std::string line = "points=" + std::to_string(report.points.size()) +
                       " failures=" + std::to_string(report.failures.size());
    if (report.onset.found) {
        line += " gamma_init_ghz=" + format_double(report.onset.gamma_ghz) +
                " gamma_init_over_j=" + format_double(report.onset.gamma_over_j);
    } else {
        line += " gamma_init=no-onset";
    }
    if (report.wpm.found) {
        line += " wpm=[" + format_double(report.wpm.gamma_over_j_min) + "," +
                format_double(report.wpm.gamma_over_j_max) + "] width_decades=" +
                format_double(report.wpm.width_decades);
    } else {
        line += " wpm=none";
    }
    return line;
}

/// Writes metrics CSV, fit report and density CSV next to `stem`.
AnalysisReport write_analysis(const SampleArchive& archive, const std::string& stem, const AnalysisOptions& options,
                              bool exclude_initial) {
    const RingSpec spec = spec_from_header(archive.header);
    const auto report = analyze_archive(archive, spec, options);
    auto table = metrics_table(report, archive.header);
    table.metadata["aggregation"] = to_string(options.aggregation);
    write_output(stem + ".metrics.csv", metrics_csv(table));
    write_output(stem + ".fit.json", fit_report_json(report).dump(2) + "\n");
    write_output(stem + ".density.csv", density_csv(archive, spec, exclude_initial));
    return report;
}

int cmd_run(const Globals& g, const std::string& config_path, const std::vector<std::string>& overrides,
            bool resume, const AnalysisOptions& options) {
    Json j = load_config_json(config_path);
    if (!j.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
    for (const auto& o : overrides) apply_override(j, o);
    if (g.seed) j["seed"] = *g.seed;
    if (g.workers) j["workers"] = *g.workers;
    ExperimentConfig cfg = experiment_config_from_json(j);
    cfg.output_path = in_out_dir(g, cfg.output_path);

    SweepOptions sweep;
    sweep.resume = resume;
    const std::size_t total = cfg.s_values.size();
    sweep.on_record = [total](const PointRecord& r) {
        std::cerr << "[" << (r.index + 1) << "/" << total << "] s=" << format_double(r.s);
        if (r.failed()) std::cerr << " FAILED: " << *r.error;
        std::cerr << "\n";
    };
    const auto summary = run_sweep(cfg, sweep);
    for (const auto& [s, msg] : summary.failures) warn("point s=" + format_double(s) + " failed: " + msg);

    const auto archive = read_archive(cfg.output_path);
    const auto report = write_analysis(archive, artifact_stem(cfg.output_path), options, true);
    std::cout << "archive=" << cfg.output_path << " " << summary_line(report) << "\n";
    return 0;
}

int cmd_analyze(const Globals& g, const std::string& archive_path, const AnalysisOptions& options,
                bool exclude_initial) {
    const auto archive = read_archive(archive_path);
    const std::string stem = in_out_dir(g, g.out.empty() ? artifact_stem(archive_path)
                                                         : fs::path(artifact_stem(archive_path)).filename().string());
    const auto report = write_analysis(archive, stem, options, exclude_initial);
    std::cout << "metrics=" << stem << ".metrics.csv " << summary_line(report) << "\n";
    return 0;
}

int cmd_fit(const Globals& g, const std::string& metrics_path, FitAxis axis, const std::string& output) {
    const auto table = parse_metrics_csv(read_file(metrics_path));
    AnalysisReport report;
    report.axis = axis;
    report.points = table.points;
    std::vector<double> xs, ys;
    for (const auto& p : table.points) {
        if (axis == FitAxis::s) {
            xs.push_back(p.s);
        } else if (p.gamma_over_j > 0.0 && std::isfinite(p.gamma_over_j)) {
            xs.push_back(std::log10(p.gamma_over_j));
        } else {
            continue;
        }
        ys.push_back(p.entropy);
    }
    if (xs.size() < 4) throw Error("fit: need at least 4 usable points, have " + std::to_string(xs.size()));
    report.sigmoid = fit_sigmoid(xs, ys, axis == FitAxis::s ? sigmoid_guess_s_axis() : sigmoid_guess_log_axis(xs, ys));
    report.onset = gamma_init(report.points);
    report.wpm = wpm_bounds(report.points);
    const std::string text = fit_report_json(report).dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        write_output(in_out_dir(g, output), text);
    }
    return 0;
}

struct ScalingInput {
    std::string label;
    double tau_us;
    double gamma_init_ghz;
};

std::vector<ScalingInput> scaling_inputs(const std::vector<std::string>& paths, double threshold) {
    std::vector<ScalingInput> usable;
    for (const auto& path : paths) {
        const auto table = parse_metrics_csv(read_file(path));
        const auto it = table.metadata.find("hold_us");
        const auto tau = it == table.metadata.end() ? std::nullopt : parse_double(it->second);
        if (!tau || !(*tau > 0.0)) {
            warn(path + ": no positive hold_us metadata, excluded");
            continue;
        }
        const auto onset = gamma_init(table.points, threshold);
        if (!onset.found) {
            warn(path + ": no onset, excluded");
            continue;
        }
        usable.push_back({label_for(path), *tau, onset.gamma_ghz});
    }
    return usable;
}

PlotSpec scaling_plot(const std::vector<ScalingInput>& inputs, const ScalingFit& fit) {
    PlotSpec spec;
    spec.title = "Onset field against exposure time";
    spec.x_label = "hold time (us)";
    spec.y_label = "Gamma_init (GHz)";
    spec.log_x = true;
    spec.log_y = true;
    PlotSeries data{"Gamma_init", {}, {}, false, true};
    for (const auto& in : inputs) {
        data.xs.push_back(in.tau_us);
        data.ys.push_back(in.gamma_init_ghz);
    }
    const auto [lo, hi] = std::minmax_element(data.xs.begin(), data.xs.end());
    PlotSeries line{"fit, slope " + format_double(std::round(fit.slope * 1000.0) / 1000.0), {}, {}, true, false};
    for (double tau : {*lo, *hi}) {
        line.xs.push_back(tau);
        line.ys.push_back(std::pow(10.0, -(fit.slope * std::log10(tau) + fit.intercept)));
    }
    spec.series = {data, line};
    return spec;
}

int cmd_scaling(const Globals& g, const std::vector<std::string>& paths, double threshold, const std::string& name) {
    const auto inputs = scaling_inputs(paths, threshold);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& in : inputs) pairs.emplace_back(in.tau_us, in.gamma_init_ghz);
    std::vector<double> taus;
    for (const auto& p : pairs) taus.push_back(p.first);
    std::sort(taus.begin(), taus.end());
    if (std::unique(taus.begin(), taus.end()) - taus.begin() < 2) {
        throw Error("scaling: need at least 2 usable inputs with distinct hold times, have " +
                    std::to_string(inputs.size()));
    }
    const auto fit = scaling_fit(pairs);
    Json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["threshold"] = threshold;
    Json rows = Json::array();
    for (const auto& in : inputs) rows.push_back({{"input", in.label}, {"tau_us", in.tau_us}, {"gamma_init_ghz", in.gamma_init_ghz}});
    j["inputs"] = rows;
    const std::string stem = in_out_dir(g, name);
    write_output(stem + ".json", j.dump(2) + "\n");
    write_output(stem + ".svg", render_svg(scaling_plot(inputs, fit)));
    std::cout << "slope=" << format_double(fit.slope) << " r_squared=" << format_double(fit.r_squared)
              << " inputs=" << inputs.size() << " report=" << stem << ".json\n";
    return 0;
}

int cmd_embed(const Globals& g, const std::string& graph_path, int min_length, long long iterations,
              double time_ms, const std::string& output) {
    const auto graph = load_graph_file(graph_path);
    for (const auto& w : graph.warnings) warn(graph_path + ": " + w);
    const std::uint64_t seed = g.seed.value_or(1);
    const int workers = g.workers.value_or(1);
    std::optional<CycleEmbedding> found;
    if (time_ms > 0.0) {
        found = find_odd_cycle_timed(graph, min_length, time_ms, seed, workers);
    } else {
        found = find_odd_cycle(graph, {min_length, iterations, seed, workers});
    }
    if (found) {
        const auto check = validate_embedding(graph, found->cycle);
        if (!check.ok) throw Error("embedding failed validation: " + check.reason);
    }
    const std::string text = embedding_json(graph, found).dump() + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        write_output(in_out_dir(g, output), text);
        std::cout << "length=" << (found ? found->length() : 0) << " vertices=" << graph.vertex_count()
                  << " output=" << in_out_dir(g, output) << "\n";
    }
    return 0;
}

int cmd_plot(const Globals& g, const std::vector<std::string>& paths, const std::string& kind,
             const std::string& axis, const std::string& output) {
    PlotSpec spec;
    if (kind == "scaling") {
        const auto inputs = scaling_inputs(paths, 0.05);
        std::vector<std::pair<double, double>> pairs;
        for (const auto& in : inputs) pairs.emplace_back(in.tau_us, in.gamma_init_ghz);
        spec = scaling_plot(inputs, scaling_fit(pairs));
    } else if (kind == "density") {
        spec.title = "Domain-wall density";
        spec.x_label = "distance from initial wall (edges)";
        spec.y_label = "walls per sample";
        spec.log_x = false;
        for (const auto& path : paths) {
            const auto lines = split_lines(read_file(path));
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 1; i < lines.size(); ++i) {
                if (trim(lines[i]).empty()) continue;
                std::vector<double> row;
                for (auto f : split(lines[i], ',')) {
                    const auto v = parse_double(trim(f));
                    if (!v) throw Error(path + " line " + std::to_string(i + 1) + ": not a number");
                    row.push_back(*v);
                }
                rows.push_back(std::move(row));
            }
            if (rows.empty()) throw Error(path + ": no data rows");
            // At most six rows, evenly spread over the sweep.
            const std::size_t shown = std::min<std::size_t>(6, rows.size());
            for (std::size_t k = 0; k < shown; ++k) {
                const auto& row = rows[shown == 1 ? 0 : k * (rows.size() - 1) / (shown - 1)];
                PlotSeries s{label_for(path) + " G/J=" + short_number(row[1]), {}, {}, true, true};
                for (std::size_t d = 2; d < row.size(); ++d) {
                    s.xs.push_back(static_cast<double>(d - 2));
                    s.ys.push_back(row[d]);
                }
                spec.series.push_back(std::move(s));
            }
        }
    } else if (kind == "entropy" || kind == "sdwp") {
        spec.title = kind == "entropy" ? "Domain-wall entropy" : "Single-domain-wall proportion";
        spec.y_label = kind == "entropy" ? "h" : "SDWP";
        spec.x_label = axis == "gamma" ? "Gamma (GHz)" : axis == "s" ? "s" : "Gamma/J";
        spec.log_x = axis != "s";
        std::optional<std::string> ring_size;
        for (const auto& path : paths) {
            const auto table = parse_metrics_csv(read_file(path));
            const auto n = table.metadata.count("n") ? table.metadata.at("n") : std::string("?");
            if (ring_size && *ring_size != n) warn("inputs mix ring sizes (" + *ring_size + " and " + n + ")");
            if (!ring_size) ring_size = n;
            PlotSeries s{label_for(path), {}, {}, true, true};
            for (const auto& p : table.points) {
                s.xs.push_back(axis == "gamma" ? p.gamma_ghz : axis == "s" ? p.s : p.gamma_over_j);
                s.ys.push_back(kind == "entropy" ? p.entropy : p.sdwp);
            }
            spec.series.push_back(std::move(s));
        }
    } else {
        throw ConfigError("unknown plot kind '" + kind + "'");
    }
    const std::string path = in_out_dir(g, output.empty() ? kind + ".svg" : output);
    write_output(path, render_svg(spec));
    std::cout << "plot=" << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reverse-anneal memory erasure on odd Ising rings"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    int workers = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed");
    auto* workers_opt = app.add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory");

    AnalysisOptions analysis;
    std::string aggregation = "all_walls";
    std::string fit_axis = "gamma_over_j";
    const auto add_analysis_flags = [&](CLI::App* sub) {
        sub->add_option("--aggregation", aggregation, "Walls entering p_e")
            ->check(CLI::IsMember({"all_walls", "single_wall_only"}));
        sub->add_option("--axis", fit_axis, "Sigmoid fit axis")->check(CLI::IsMember({"gamma_over_j", "s"}));
        sub->add_option("--threshold", analysis.onset_threshold, "Entropy level defining Gamma_init");
    };

    auto* run = app.add_subcommand("run", "Run a sweep, then analyze it");
    std::string config_path;
    std::vector<std::string> overrides;
    bool resume = false;
    run->add_option("--config", config_path, "Experiment config JSON")->required();
    run->add_option("--set", overrides, "Override key=value (repeatable)");
    run->add_flag("--resume", resume, "Continue an interrupted sweep");
    add_analysis_flags(run);

    auto* analyze = app.add_subcommand("analyze", "Metrics, fits and densities from an archive");
    std::string archive_path;
    bool keep_initial = false;
    analyze->add_option("archive", archive_path, "Sample archive")->required();
    analyze->add_flag("--include-initial", keep_initial, "Keep the initial edge in the density output");
    add_analysis_flags(analyze);

    auto* fit = app.add_subcommand("fit", "Sigmoid fit of a metrics CSV");
    std::string metrics_path, fit_output;
    fit->add_option("metrics", metrics_path, "Metrics CSV")->required();
    fit->add_option("--axis", fit_axis, "Fit axis")->check(CLI::IsMember({"gamma_over_j", "s"}));
    fit->add_option("-o,--output", fit_output, "Report path (default: stdout)");

    auto* scaling = app.add_subcommand("scaling", "Power-law fit of Gamma_init against hold time");
    std::vector<std::string> scaling_paths;
    std::string scaling_name = "scaling";
    double scaling_threshold = 0.05;
    scaling->add_option("metrics", scaling_paths, "Metrics CSVs with hold_us metadata")->required();
    scaling->add_option("--threshold", scaling_threshold, "Entropy level defining Gamma_init");
    scaling->add_option("--name", scaling_name, "Output stem for the report and plot");

    auto* embed = app.add_subcommand("embed", "Find a long odd cycle in a hardware graph");
    std::string graph_path, embed_output;
    int min_length = 3;
    long long iterations = 2'000'000;
    double time_ms = 0.0;
    embed->add_option("graph", graph_path, "Edge list")->required();
    embed->add_option("--min-length", min_length, "Shortest acceptable cycle");
    embed->add_option("--iterations", iterations, "Search budget in path moves (deterministic)");
    embed->add_option("--time-ms", time_ms, "Wall-clock budget instead of iterations");
    embed->add_option("-o,--output", embed_output, "Embedding JSON path (default: stdout)");

    auto* plot = app.add_subcommand("plot", "SVG plot of metrics or density CSVs");
    std::vector<std::string> plot_paths;
    std::string kind = "entropy", axis = "gamma_over_j", plot_output;
    plot->add_option("inputs", plot_paths, "CSV files")->required();
    plot->add_option("--kind", kind, "entropy|sdwp|density|scaling")
        ->check(CLI::IsMember({"entropy", "sdwp", "density", "scaling"}));
    plot->add_option("--axis", axis, "gamma_over_j|gamma|s")->check(CLI::IsMember({"gamma_over_j", "gamma", "s"}));
    plot->add_option("-o,--output", plot_output, "SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (*seed_opt) g.seed = seed;
    if (*workers_opt) g.workers = workers;

    try {
        analysis.aggregation = parse_wall_aggregation(aggregation);
        analysis.axis = fit_axis == "s" ? FitAxis::s : FitAxis::log_gamma_over_j;
        if (*run) return cmd_run(g, config_path, overrides, resume, analysis);
        if (*analyze) return cmd_analyze(g, archive_path, analysis, !keep_initial);
        if (*fit) return cmd_fit(g, metrics_path, analysis.axis, fit_output);
        if (*scaling) return cmd_scaling(g, scaling_paths, scaling_threshold, scaling_name);
        if (*embed) return cmd_embed(g, graph_path, min_length, iterations, time_ms, embed_output);
        if (*plot) return cmd_plot(g, plot_paths, kind, axis, plot_output);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
