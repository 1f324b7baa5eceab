#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wallmem/archive.hpp"
#include "wallmem/dynamics.hpp"
#include "wallmem/ring.hpp"
#include "wallmem/schedule.hpp"

namespace wallmem {

/// One sweep over pause points. Built from a flat JSON object whose keys are
/// listed by experiment_config_keys(); unknown keys are rejected.
struct ExperimentConfig {
    RingSpec spec;
    /// "synthetic" or a schedule CSV path.
    std::string schedule = "synthetic";
    ScheduleTable table = ScheduleTable::synthetic_default();
    BackendConfig backend;
    std::vector<double> s_values;
    double ramp_us = 0.5;
    double hold_us = 1.0;
    int shots_per_point = 8000;
    std::string output_path = "archive.jsonl";
    int workers = 1;
    /// Adds a wall-clock start time to the archive header. Off by default so
    /// repeated runs produce identical bytes.
    bool record_timestamps = false;
};

const std::vector<std::string>& experiment_config_keys();

/// `s_count` points evenly spaced on [s_min, s_max] (defaults 0 and 1).
std::vector<double> s_grid(int count, double s_min = 0.0, double s_max = 1.0);

/// Environment variable naming the directory searched for relative schedule
/// paths that do not exist as given.
inline constexpr const char* kScheduleDirEnv = "WALLMEM_SCHEDULE_DIR";

/// Throws ConfigError on unknown keys, wrong types, invalid values or an
/// unreadable schedule (the message names the path).
ExperimentConfig experiment_config_from_json(const Json& j);
Json experiment_config_to_json(const ExperimentConfig& cfg);
Json load_config_json(const std::string& path);

/// Applies `key=value` to a flat config object. The value is read as JSON
/// when it parses, otherwise as a string.
void apply_override(Json& j, const std::string& assignment);

void validate(const ExperimentConfig& cfg);

Waveform point_waveform(const ExperimentConfig& cfg, double s_pause);

/// Readout at s_values[index]. The RNG is seeded from (backend.seed, index),
/// so the record does not depend on which other points run or in what order.
/// Exact and oracle backends evolve once and draw Born samples; svmc runs one
/// trajectory per shot. Faults are applied to every sample after readout.
PointRecord run_point(const ExperimentConfig& cfg, std::size_t index);

struct SweepOptions {
    /// Continue from `<output>.partial` when present.
    bool resume = false;
    /// Stop after this many records have been committed (for interruption tests).
    std::optional<std::size_t> stop_after;
    std::function<void(const PointRecord&)> on_record;
    /// Replaces run_point when set.
    std::function<PointRecord(const ExperimentConfig&, std::size_t)> runner;
};

struct SweepSummary {
    std::size_t records = 0;
    std::size_t resumed = 0;
    std::vector<std::pair<double, std::string>> failures;
    bool complete = false;
};

Json archive_header(const ExperimentConfig& cfg);

/// Runs every point, up to cfg.workers at a time, and commits records to the
/// archive in index order. A point that throws is recorded as a failure and
/// the sweep continues.
SweepSummary run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

}  // namespace wallmem
