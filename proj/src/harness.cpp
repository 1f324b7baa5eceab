#include "wallmem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

template <typename T>
T get_as(const Json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const Json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type: " + j.dump());
    }
}

double get_number(const Json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number, got " + j.dump());
    return j.get<double>();
}

int get_int(const Json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer, got " + j.dump());
    return j.get<int>();
}

std::string resolve_schedule_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (fs::path(path).is_relative()) {
        if (const char* dir = std::getenv(kScheduleDirEnv); dir && *dir) {
            const auto candidate = fs::path(dir) / path;
            if (fs::exists(candidate)) return candidate.string();
        }
    }
    throw ConfigError("schedule file not found: " + path);
}

Json header_without_timestamp(Json header) {
    header.erase("started_at");
    return header;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& experiment_config_keys() {
    static const std::vector<std::string> keys = {
        "n",          "j_programmed",   "initial_wall_edge", "faulty_sites",  "schedule",
        "backend",    "dt_ns",          "sweeps_per_us",     "temperature_mk", "seed",
        "oracle_slices", "oracle_rule", "s_values",          "s_count",       "s_min",
        "s_max",      "ramp_us",        "hold_us",           "shots_per_point", "output_path",
        "workers",    "record_timestamps"};
    return keys;
}

std::vector<double> s_grid(int count, double s_min, double s_max) {
    if (count < 1) throw ConfigError("s_count must be >= 1");
    if (count == 1) return {s_min};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // On [0, 1] this is a single rounded division, so 37/100 reads back as 0.37.
        const double w = static_cast<double>(i) / static_cast<double>(count - 1);
        out[static_cast<std::size_t>(i)] = (i == count - 1) ? s_max : s_min + (s_max - s_min) * w;
    }
    return out;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto& known = experiment_config_keys();
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    ExperimentConfig cfg;
    if (j.contains("n")) cfg.spec.n = get_int(j["n"], "n");
    if (j.contains("j_programmed")) cfg.spec.j_programmed = get_number(j["j_programmed"], "j_programmed");
    if (j.contains("initial_wall_edge")) cfg.spec.initial_wall_edge = get_int(j["initial_wall_edge"], "initial_wall_edge");
    if (j.contains("faulty_sites")) cfg.spec.faulty_sites = get_as<std::vector<int>>(j["faulty_sites"], "faulty_sites");
    cfg.spec = validated(cfg.spec);

    if (j.contains("schedule")) cfg.schedule = get_as<std::string>(j["schedule"], "schedule");
    if (cfg.schedule != "synthetic") {
        cfg.table = load_schedule_file(resolve_schedule_path(cfg.schedule));
    }

    if (j.contains("backend")) cfg.backend.kind = parse_backend_kind(get_as<std::string>(j["backend"], "backend"));
    if (j.contains("dt_ns")) cfg.backend.dt_ns = get_number(j["dt_ns"], "dt_ns");
    if (j.contains("sweeps_per_us")) cfg.backend.sweeps_per_us = get_number(j["sweeps_per_us"], "sweeps_per_us");
    if (j.contains("temperature_mk")) cfg.backend.temperature_mk = get_number(j["temperature_mk"], "temperature_mk");
    if (j.contains("seed")) {
        const auto& seed = j["seed"];
        if (seed.is_number_unsigned()) {
            cfg.backend.seed = seed.get<std::uint64_t>();
        } else if (seed.is_number_integer() && seed.get<long long>() >= 0) {
            cfg.backend.seed = static_cast<std::uint64_t>(seed.get<long long>());
        } else {
            throw ConfigError("config key 'seed' must be a non-negative integer, got " + seed.dump());
        }
    }
    if (j.contains("oracle_slices")) cfg.backend.oracle_slices = get_int(j["oracle_slices"], "oracle_slices");
    if (j.contains("oracle_rule")) cfg.backend.oracle_rule = parse_oracle_rule(get_as<std::string>(j["oracle_rule"], "oracle_rule"));

    const bool has_grid = j.contains("s_count") || j.contains("s_min") || j.contains("s_max");
    if (j.contains("s_values") && has_grid) {
        throw ConfigError("give either s_values or s_count/s_min/s_max, not both");
    }
    if (j.contains("s_values")) {
        cfg.s_values = get_as<std::vector<double>>(j["s_values"], "s_values");
    } else {
        const int count = j.contains("s_count") ? get_int(j["s_count"], "s_count") : 101;
        const double lo = j.contains("s_min") ? get_number(j["s_min"], "s_min") : 0.0;
        const double hi = j.contains("s_max") ? get_number(j["s_max"], "s_max") : 1.0;
        cfg.s_values = s_grid(count, lo, hi);
    }

    if (j.contains("ramp_us")) cfg.ramp_us = get_number(j["ramp_us"], "ramp_us");
    if (j.contains("hold_us")) cfg.hold_us = get_number(j["hold_us"], "hold_us");
    if (j.contains("shots_per_point")) cfg.shots_per_point = get_int(j["shots_per_point"], "shots_per_point");
    if (j.contains("output_path")) cfg.output_path = get_as<std::string>(j["output_path"], "output_path");
    if (j.contains("workers")) cfg.workers = get_int(j["workers"], "workers");
    if (j.contains("record_timestamps")) cfg.record_timestamps = get_as<bool>(j["record_timestamps"], "record_timestamps");
    validate(cfg);
    return cfg;
}

Json experiment_config_to_json(const ExperimentConfig& cfg) {
    Json j;
    j["n"] = cfg.spec.n;
    j["j_programmed"] = cfg.spec.j_programmed;
    j["initial_wall_edge"] = cfg.spec.initial_wall_edge;
    j["faulty_sites"] = cfg.spec.faulty_sites;
    j["schedule"] = cfg.schedule;
    j["backend"] = to_string(cfg.backend.kind);
    j["dt_ns"] = cfg.backend.dt_ns;
    j["sweeps_per_us"] = cfg.backend.sweeps_per_us;
    j["temperature_mk"] = cfg.backend.temperature_mk;
    j["seed"] = cfg.backend.seed;
    j["oracle_slices"] = cfg.backend.oracle_slices;
    j["oracle_rule"] = to_string(cfg.backend.oracle_rule);
    j["s_values"] = cfg.s_values;
    j["ramp_us"] = cfg.ramp_us;
    j["hold_us"] = cfg.hold_us;
    j["shots_per_point"] = cfg.shots_per_point;
    j["output_path"] = cfg.output_path;
    j["workers"] = cfg.workers;
    j["record_timestamps"] = cfg.record_timestamps;
    return j;
}

Json load_config_json(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        throw ConfigError("cannot read config file: " + path);
    }
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
}

void apply_override(Json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value: " + assignment);
    }
    const std::string key(trim(std::string_view(assignment).substr(0, eq)));
    const std::string value(trim(std::string_view(assignment).substr(eq + 1)));
    const auto& known = experiment_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown override key '" + key + "'");
    }
    Json parsed;
    try {
        parsed = Json::parse(value);
    } catch (const Json::exception&) {
        parsed = value;
    }
    // A grid override replaces an explicit list and vice versa.
    if (key == "s_values") {
        j.erase("s_count");
        j.erase("s_min");
        j.erase("s_max");
    } else if (key == "s_count" || key == "s_min" || key == "s_max") {
        j.erase("s_values");
    }
    j[key] = parsed;
}

void validate(const ExperimentConfig& cfg) {
    validated(cfg.spec);
    validate(cfg.backend);
    if (cfg.shots_per_point < 1) throw ConfigError("shots_per_point must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.s_values.empty()) throw ConfigError("s_values is empty");
    for (std::size_t i = 0; i < cfg.s_values.size(); ++i) {
        const double s = cfg.s_values[i];
        if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("s value out of [0, 1]: " + format_double(s));
        if (i > 0 && !(s > cfg.s_values[i - 1])) throw ConfigError("s_values must be strictly increasing");
    }
    if (!(cfg.ramp_us > 0.0)) throw ConfigError("ramp_us must be > 0");
    if (!(cfg.hold_us >= 0.0)) throw ConfigError("hold_us must be >= 0");
    if (cfg.backend.kind == BackendKind::exact && cfg.spec.n > kMaxExactSites) {
        throw ConfigError("exact backend supports n <= " + std::to_string(kMaxExactSites));
    }
    if (cfg.backend.kind == BackendKind::oracle && cfg.spec.n > kMaxOracleSites) {
        throw ConfigError("oracle backend supports n <= " + std::to_string(kMaxOracleSites));
    }
}

Waveform point_waveform(const ExperimentConfig& cfg, double s_pause) {
    return build_reverse_waveform(s_pause, cfg.ramp_us, cfg.hold_us);
}

PointRecord run_point(const ExperimentConfig& cfg, std::size_t index) {
    if (index >= cfg.s_values.size()) throw Error("point index out of range");
    const double s = cfg.s_values[index];
    try {
        const auto waveform = point_waveform(cfg, s);
        const auto ep = energy_point(cfg.table, s, cfg.spec.j_programmed);
        PointRecord record;
        record.index = index;
        record.s = s;
        record.gamma_over_j = ep.gamma_over_j;
        record.gamma_ghz = ep.gamma_ghz;
        const std::uint64_t point_seed = derive_seed(cfg.backend.seed, index);
        const auto shots = static_cast<std::size_t>(cfg.shots_per_point);
        record.samples.reserve(shots);

        if (cfg.backend.kind == BackendKind::svmc) {
            const auto start = initial_state(cfg.spec);
            for (std::size_t k = 0; k < shots; ++k) {
                Rng rng(derive_seed(point_seed, k));
                auto sample = evolve_svmc(start, cfg.spec.j_programmed, cfg.table, waveform, cfg.backend, rng);
                record.samples.push_back(apply_faults(sample, cfg.spec, rng));
            }
        } else {
            const auto state = cfg.backend.kind == BackendKind::exact
                                   ? evolve_exact(cfg.spec, cfg.table, waveform, cfg.backend)
                                   : evolve_oracle(cfg.spec, cfg.table, waveform,
                                                   cfg.backend.oracle_slices, cfg.backend.oracle_rule);
            Rng rng(point_seed);
            for (auto& sample : measure_z(state, cfg.shots_per_point, rng)) {
                record.samples.push_back(apply_faults(sample, cfg.spec, rng));
            }
        }
        record.wall_counts.reserve(shots);
        for (const auto& sample : record.samples) record.wall_counts.push_back(wall_count(sample));
        return record;
    } catch (const std::exception& e) {
        throw Error("s_pause=" + format_double(s) + ": " + e.what());
    }
}

Json archive_header(const ExperimentConfig& cfg) {
    Json h;
    h["format"] = "wallmem-samples";
    h["version"] = 1;
    h["schedule_name"] = cfg.table.name();
    h["schedule_synthetic"] = cfg.table.synthetic();
    h["config"] = experiment_config_to_json(cfg);
    // Where and how parallel a run executes does not change its records.
    h["config"].erase("output_path");
    h["config"].erase("workers");
    if (cfg.record_timestamps) h["started_at"] = utc_now();
    return h;
}

SweepSummary run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
    validate(cfg);
    SweepSummary summary;
    const std::string partial = ArchiveWriter::partial_path(cfg.output_path);
    if (const auto parent = std::filesystem::path(cfg.output_path).parent_path(); !parent.empty()) {
        std::filesystem::create_directories(parent);
    }

    Json header = archive_header(cfg);
    std::vector<PointRecord> carried;
    if (options.resume && std::filesystem::exists(partial)) {
        auto previous = read_archive(partial, true);
        if (header_without_timestamp(previous.header) != header_without_timestamp(header)) {
            throw Error("cannot resume: " + partial + " was written with a different config");
        }
        header = previous.header;
        for (auto& r : previous.records) {
            if (r.index != carried.size()) break;
            carried.push_back(std::move(r));
        }
    }

    ArchiveWriter writer(cfg.output_path, header);
    const auto commit = [&](const PointRecord& r) {
        writer.append(r);
        ++summary.records;
        if (r.failed()) summary.failures.emplace_back(r.s, *r.error);
        if (options.on_record) options.on_record(r);
    };
    for (const auto& r : carried) {
        commit(r);
        ++summary.resumed;
    }

    const std::size_t total = cfg.s_values.size();
    const auto limit_reached = [&] { return options.stop_after && summary.records >= *options.stop_after; };
    if (limit_reached()) return summary;

    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::size_t, PointRecord> done;
    std::atomic<std::size_t> next{carried.size()};
    std::atomic<bool> stop{false};

    const auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            PointRecord r;
            try {
                r = options.runner ? options.runner(cfg, i) : run_point(cfg, i);
            } catch (const std::exception& e) {
                r = PointRecord{};
                r.index = i;
                r.s = cfg.s_values[i];
                r.error = e.what();
            }
            {
                std::lock_guard lock(mutex);
                done.emplace(i, std::move(r));
            }
            ready.notify_all();
        }
    };

    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), total - carried.size());
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

    std::exception_ptr failure;
    try {
        for (std::size_t i = carried.size(); i < total && !limit_reached(); ++i) {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return done.count(i) != 0; });
            PointRecord r = std::move(done.at(i));
            done.erase(i);
            lock.unlock();
            commit(r);
        }
    } catch (...) {
        failure = std::current_exception();
    }
    stop.store(true);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    if (summary.records == total) {
        writer.finish();
        summary.complete = true;
    }
    return summary;
}

}  // namespace wallmem
