#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wallmem/archive.hpp"
#include "wallmem/ring.hpp"

namespace wallmem {

/// Which walls enter p_e: every wall of every sample, or only the wall of
/// single-wall samples.
enum class WallAggregation { all_walls, single_wall_only };

std::string to_string(WallAggregation a);
WallAggregation parse_wall_aggregation(const std::string& text);

/// Per-edge wall counts, orientation-agnostic.
struct WallHistogram {
    Eigen::VectorXd counts;
    Eigen::VectorXd p;
    double total = 0.0;

    int n_edges() const { return static_cast<int>(counts.size()); }
    bool empty() const { return total == 0.0; }
};

WallHistogram wall_histogram(const std::vector<SpinConfig>& samples,
                             WallAggregation aggregation = WallAggregation::all_walls);
/// Histogram from explicit probabilities (or unnormalized weights).
WallHistogram histogram_from_weights(const Eigen::VectorXd& weights);

/// h = -sum_e p_e log_N p_e with 0 log 0 = 0. An empty histogram gives 0.
double entropy(const WallHistogram& hist);

/// Fraction of samples with exactly one wall.
double sdwp(const std::vector<SpinConfig>& samples);
/// Fraction of samples with one wall that is off the initial edge or down-down.
double moved_sdwp(const std::vector<SpinConfig>& samples, const RingSpec& spec);
double mean_wall_count(const std::vector<SpinConfig>& samples);

/// Mean walls per sample against ring distance from the initial edge.
///
/// Folded: index d in [0, max_distance], the two edges at distance d averaged.
/// Signed: index d + max_distance for offsets d in [-max_distance,
/// max_distance]. With exclude_initial the initial edge contributes nothing.
std::vector<double> spatial_density(const std::vector<SpinConfig>& samples, const RingSpec& spec,
                                    bool exclude_initial, int max_distance, bool folded = true);

struct PointMetrics {
    double s = 0.0;
    double gamma_over_j = 0.0;
    double gamma_ghz = 0.0;
    double entropy = 0.0;
    double sdwp = 0.0;
    double moved_sdwp = 0.0;
    double mean_walls = 0.0;
};

PointMetrics point_metrics(const PointRecord& record, const RingSpec& spec,
                           WallAggregation aggregation = WallAggregation::all_walls);

/// y = l / (1 + exp(-k (x - x0)))
struct SigmoidParams {
    double l = 1.0;
    double x0 = 0.0;
    double k = 1.0;
};

double sigmoid(const SigmoidParams& p, double x);

struct SigmoidFit {
    double l = 0.0;
    double x0 = 0.0;
    double k = 0.0;
    double residual_rss = 0.0;
    bool converged = false;
    int iterations = 0;

    double operator()(double x) const { return sigmoid({l, x0, k}, x); }
};

/// Initial guess on a log10(Gamma/J) axis: l = max y, x0 = abscissa of the y
/// nearest l/2, |k| = 4 / x-range with the sign of the overall trend.
SigmoidParams sigmoid_guess_log_axis(const std::vector<double>& xs, const std::vector<double>& ys);
/// Initial guess on the s axis.
inline SigmoidParams sigmoid_guess_s_axis() { return {1.0, 0.8, -40.0}; }

/// Levenberg-Marquardt least squares with the analytic Jacobian. Needs at
/// least 4 points. `converged` is false when the iteration limit is hit, the
/// Jacobian is degenerate or the data show no crossover (l ~ 0).
SigmoidFit fit_sigmoid(const std::vector<double>& xs, const std::vector<double>& ys,
                       std::optional<SigmoidParams> guess = std::nullopt);

struct Onset {
    bool found = false;
    double gamma_ghz = 0.0;
    double gamma_over_j = 0.0;
};

/// First upward crossing of h = threshold along points sorted by ascending
/// Gamma/J, interpolated linearly in (log10 Gamma, h). Points with Gamma = 0
/// have no place on a log axis and are skipped.
Onset gamma_init(const std::vector<PointMetrics>& points, double threshold = 0.05);

struct WpmBounds {
    bool found = false;
    double gamma_over_j_min = 0.0;
    double gamma_over_j_max = 0.0;
    double width_decades = 0.0;
};

/// Extent of lo < h < hi on the piecewise-linear interpolant of h against
/// log10(Gamma/J). Points with Gamma/J = 0 or infinite are skipped.
WpmBounds wpm_bounds(const std::vector<PointMetrics>& points, double lo = 0.05, double hi = 0.95);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (log10 tau, log10 (1 / Gamma_init)).
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& tau_gamma);

enum class FitAxis { log_gamma_over_j, s };

struct AnalysisOptions {
    WallAggregation aggregation = WallAggregation::all_walls;
    FitAxis axis = FitAxis::log_gamma_over_j;
    double onset_threshold = 0.05;
    double wpm_lo = 0.05;
    double wpm_hi = 0.95;
};

struct AnalysisReport {
    std::vector<PointMetrics> points;
    std::optional<SigmoidFit> sigmoid;  // absent with fewer than 4 usable points
    FitAxis axis = FitAxis::log_gamma_over_j;
    Onset onset;
    WpmBounds wpm;
    std::vector<std::pair<double, std::string>> failures;
};

/// Ring parameters recorded in an archive header.
RingSpec spec_from_header(const Json& header);

AnalysisReport analyze_archive(const SampleArchive& archive, const RingSpec& spec,
                               const AnalysisOptions& options = {});

/// Metrics CSV: `# key=value` metadata lines, then
/// `s,gamma_over_j,gamma_ghz,entropy,sdwp,moved_sdwp,mean_walls`.
struct MetricsTable {
    std::map<std::string, std::string> metadata;
    std::vector<PointMetrics> points;
};

std::string metrics_csv(const MetricsTable& table);
MetricsTable parse_metrics_csv(const std::string& content);
MetricsTable metrics_table(const AnalysisReport& report, const Json& archive_header);

Json fit_report_json(const AnalysisReport& report);

/// Spatial density rows, one per point: `s,gamma_over_j,d0,d1,...`.
std::string density_csv(const SampleArchive& archive, const RingSpec& spec, bool exclude_initial);

}  // namespace wallmem
