#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wallmem {

/// One knot of an annealer energy schedule. Energies are in GHz.
struct ScheduleKnot {
    double s;
    double a_ghz;
    double b_ghz;
};

/// Tabulated A(s), B(s) curves.
///
/// Construction validates: at least two knots, s strictly increasing from 0
/// to 1, A >= 0 non-increasing, B >= 0 non-decreasing. The table is immutable
/// afterwards and safe to share between threads.
class ScheduleTable {
public:
    ScheduleTable(std::string name, std::vector<ScheduleKnot> knots);

    const std::string& name() const { return name_; }
    const std::vector<ScheduleKnot>& knots() const { return knots_; }
    bool synthetic() const { return synthetic_; }

    /// Synthetic default, A(s) = 6(1-s)^2 and B(s) = 10 s^2 on 1001 uniform
    /// knots. Not hardware data.
    static ScheduleTable synthetic_default();

private:
    std::string name_;
    std::vector<ScheduleKnot> knots_;
    bool synthetic_ = false;
};

/// Parses `s,A_GHz,B_GHz` CSV content. Rows are sorted by s before validation;
/// errors carry the 1-based line number of the offending row.
ScheduleTable load_schedule(std::string_view csv, std::string name = "schedule");
ScheduleTable load_schedule_file(const std::string& path);

struct Energies {
    double a_ghz;
    double b_ghz;
};

/// Linear interpolation between bracketing knots, exact at knots.
Energies interpolate(const ScheduleTable& table, double s);

/// Transverse and coupling energy at one anneal fraction.
///
/// gamma_ghz = A/2, j_ghz = B J/2 and gamma_over_j = A / (B J). When B J = 0
/// the ratio is infinite and gamma_over_j holds +infinity with `infinite` set.
struct EnergyPoint {
    double gamma_ghz;
    double j_ghz;
    double gamma_over_j;
    bool infinite;
};

EnergyPoint energy_point(const ScheduleTable& table, double s, double j_programmed);

struct WaveformPoint {
    double t_us;
    double s;
};

/// Piecewise-linear symmetric reverse anneal: ramp from s=1 down to s_pause,
/// hold, and ramp back to s=1.
class Waveform {
public:
    const std::vector<WaveformPoint>& breakpoints() const { return points_; }
    double s_pause() const { return s_pause_; }
    double ramp_us() const { return ramp_us_; }
    double hold_us() const { return hold_us_; }
    double duration_us() const { return 2.0 * ramp_us_ + hold_us_; }

    /// Breakpoint times with the zero-length hold collapsed.
    std::vector<WaveformPoint> distinct_breakpoints() const;

    /// `[[t_us, s], ...]`
    std::string to_json() const;

private:
    friend Waveform build_reverse_waveform(double, double, double);
    std::vector<WaveformPoint> points_;
    double s_pause_ = 1.0;
    double ramp_us_ = 0.0;
    double hold_us_ = 0.0;
};

Waveform build_reverse_waveform(double s_pause, double ramp_us, double hold_us);

/// s(t) for t in [0, duration].
double s_at(const Waveform& waveform, double t_us);

/// Times in [0, duration] (us, sorted, endpoints included) at which A(s(t))
/// or B(s(t)) may have a kink: waveform breakpoints and the instants a ramp
/// crosses a table knot. Both energies are affine in t between neighbours.
std::vector<double> smooth_piece_bounds(const ScheduleTable& table, const Waveform& waveform);

}  // namespace wallmem
