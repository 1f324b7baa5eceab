#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wallmem/analysis.hpp"
#include "wallmem/archive.hpp"
#include "wallmem/text.hpp"

using namespace wallmem;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

Result cli(const std::string& dir, const std::string& args) {
    const std::string out = dir + "/stdout.txt", err = dir + "/stderr.txt";
    const std::string cmd = "cd '" + dir + "' && '" WALLMEM_CLI_PATH "' " + args + " > '" + out + "' 2> '" + err + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

// Metrics CSV whose entropy crosses 0.05 at Gamma = g0 on a log-linear ramp.
std::string metrics_with_onset(double hold_us, double g0, int n = 9) {
    MetricsTable t;
    t.metadata["n"] = std::to_string(n);
    t.metadata["hold_us"] = format_double(hold_us);
    for (int i = 0; i <= 20; ++i) {
        PointMetrics p;
        const double x = -3.0 + 0.25 * i;  // log10 (Gamma / g0)
        p.gamma_ghz = g0 * std::pow(10.0, x);
        p.gamma_over_j = p.gamma_ghz / 2.0;
        p.s = 1.0 - i / 20.0;
        p.entropy = std::clamp(0.05 + 0.1 * x, 0.0, 1.0);
        p.sdwp = 1.0 - p.entropy;
        t.points.push_back(p);
    }
    return metrics_csv(t);
}

const char* kSmallConfig = R"({
  "n": 5, "s_values": [0.1, 0.3, 0.5, 0.7, 0.9, 1.0], "ramp_us": 0.01, "hold_us": 0.02,
  "shots_per_point": 300, "dt_ns": 0.1, "seed": 4, "output_path": "runs/small.jsonl"
})";

}  // namespace

TEST_CASE("run produces an archive and analysis artifacts") {
    const auto dir = scratch_dir("cli_run");
    spit(dir + "/small.json", kSmallConfig);
    const auto r = cli(dir, "run --config small.json");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "archive=runs/small.jsonl"));
    CHECK(contains(r.out, "points=6"));
    CHECK(contains(r.out, "wpm="));
    for (const char* f : {"runs/small.jsonl", "runs/small.metrics.csv", "runs/small.fit.json", "runs/small.density.csv"}) {
        CHECK(fs::exists(dir + "/" + f));
    }
    const auto table = parse_metrics_csv(slurp(dir + "/runs/small.metrics.csv"));
    CHECK(table.points.size() == 6);
    CHECK(table.metadata.at("n") == "5");
    CHECK(table.points.back().entropy == 0.0);

    // Same inputs, same bytes.
    const auto first_archive = slurp(dir + "/runs/small.jsonl");
    const auto first_metrics = slurp(dir + "/runs/small.metrics.csv");
    CHECK(cli(dir, "--workers 3 run --config small.json").code == 0);
    CHECK(slurp(dir + "/runs/small.jsonl") == first_archive);
    CHECK(slurp(dir + "/runs/small.metrics.csv") == first_metrics);

    // --out relocates outputs; analyze reproduces the metrics.
    CHECK(cli(dir, "--out elsewhere analyze runs/small.jsonl").code == 0);
    CHECK(slurp(dir + "/elsewhere/small.metrics.csv") == first_metrics);
}

TEST_CASE("overrides reach the archive header") {
    const auto dir = scratch_dir("cli_override");
    spit(dir + "/small.json", kSmallConfig);
    const auto r = cli(dir, "run --config small.json --set hold_us=100 --set 's_values=[0.5,1.0]' --set shots_per_point=20 --set n=3");
    REQUIRE(r.code == 0);
    const auto a = read_archive(dir + "/runs/small.jsonl");
    CHECK(a.header["config"]["hold_us"] == 100.0);
    CHECK(a.records.size() == 2);
    CHECK(contains(slurp(dir + "/runs/small.metrics.csv"), "# hold_us=100"));

    const auto seeded = cli(dir, "--seed 99 run --config small.json --set 's_values=[0.5]' --set shots_per_point=5 --set n=3");
    REQUIRE(seeded.code == 0);
    CHECK(read_archive(dir + "/runs/small.jsonl").header["config"]["seed"] == 99);
}

TEST_CASE("configuration errors exit 1 before any work") {
    const auto dir = scratch_dir("cli_errors");
    spit(dir + "/small.json", kSmallConfig);
    spit(dir + "/bad_schedule.json", R"({"n": 5, "schedule": "missing/sched.csv", "s_values": [0.5]})");

    auto r = cli(dir, "run --config bad_schedule.json");
    CHECK(r.code == 1);
    CHECK(contains(r.err, "missing/sched.csv"));

    r = cli(dir, "run --config small.json --set no_such_key=3");
    CHECK(r.code == 1);
    CHECK(contains(r.err, "no_such_key"));
    CHECK_FALSE(fs::exists(dir + "/runs"));

    CHECK(cli(dir, "frobnicate").code == 1);
    CHECK(cli(dir, "").code == 1);
    CHECK(cli(dir, "run --config absent.json").code == 1);
    CHECK(cli(dir, "run --config small.json --set n=4").code == 1);
    CHECK(cli(dir, "plot x.csv --kind pie").code == 1);
    CHECK(cli(dir, "--help").code == 0);
}

TEST_CASE("runtime errors exit 2") {
    const auto dir = scratch_dir("cli_runtime");
    spit(dir + "/garbage.jsonl", "not json\n");
    auto r = cli(dir, "analyze garbage.jsonl");
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    spit(dir + "/empty.csv", "");
    CHECK(cli(dir, "plot empty.csv").code == 2);
}

TEST_CASE("plots") {
    const auto dir = scratch_dir("cli_plot");
    spit(dir + "/hold_1.metrics.csv", metrics_with_onset(1.0, 0.2));
    spit(dir + "/hold_10.metrics.csv", metrics_with_onset(10.0, 0.1));
    spit(dir + "/hold_100.metrics.csv", metrics_with_onset(100.0, 0.05));

    auto r = cli(dir, "plot hold_1.metrics.csv --kind entropy -o one.svg");
    REQUIRE(r.code == 0);
    auto svg = slurp(dir + "/one.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(contains(svg, "Gamma/J"));
    CHECK(contains(svg, "hold_1"));

    r = cli(dir, "plot hold_1.metrics.csv hold_10.metrics.csv hold_100.metrics.csv --kind entropy --axis gamma -o three.svg");
    REQUIRE(r.code == 0);
    svg = slurp(dir + "/three.svg");
    CHECK(contains(svg, "Gamma (GHz)"));
    for (const char* label : {"hold_1", "hold_10", "hold_100"}) CHECK(contains(svg, label));
    CHECK(r.err.empty());

    spit(dir + "/other_n.metrics.csv", metrics_with_onset(3.0, 0.1, 11));
    r = cli(dir, "plot hold_1.metrics.csv other_n.metrics.csv --kind sdwp -o mixed.svg");
    CHECK(r.code == 0);
    CHECK(contains(r.err, "ring sizes"));
    CHECK(fs::exists(dir + "/mixed.svg"));
}

TEST_CASE("scaling recovers a square-root law") {
    const auto dir = scratch_dir("cli_scaling");
    for (double tau : {2.0, 100.0, 2000.0}) {
        spit(dir + "/t" + format_double(tau) + ".metrics.csv", metrics_with_onset(tau, 0.8 / std::sqrt(tau)));
    }
    auto r = cli(dir, "scaling t2.metrics.csv t100.metrics.csv t2000.metrics.csv --name law");
    REQUIRE(r.code == 0);
    const auto report = Json::parse(slurp(dir + "/law.json"));
    CHECK(std::abs(report["slope"].get<double>() - 0.5) < 1e-9);
    CHECK(fs::exists(dir + "/law.svg"));

    // An input without onset is dropped with a warning.
    MetricsTable flat;
    flat.metadata["hold_us"] = "50";
    for (int i = 0; i < 5; ++i) {
        PointMetrics p;
        p.gamma_ghz = p.gamma_over_j = std::pow(10.0, i - 2);
        flat.points.push_back(p);
    }
    spit(dir + "/flat.metrics.csv", metrics_csv(flat));
    r = cli(dir, "scaling t2.metrics.csv flat.metrics.csv t2000.metrics.csv --name two");
    REQUIRE(r.code == 0);
    CHECK(contains(r.err, "flat.metrics.csv"));
    CHECK(contains(r.err, "no onset"));
    const auto two = Json::parse(slurp(dir + "/two.json"));
    CHECK(two["inputs"].size() == 2);
    CHECK(std::abs(two["slope"].get<double>() - 0.5) < 1e-9);

    CHECK(cli(dir, "scaling t2.metrics.csv flat.metrics.csv --name one").code == 2);
}

TEST_CASE("embed") {
    const auto dir = scratch_dir("cli_embed");
    spit(dir + "/c9.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 0\n");
    auto r = cli(dir, "embed c9.txt");
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["length"] == 9);

    spit(dir + "/sq.txt", "0 1\n1 2\n2 3\n3 0\n0 1\n");
    r = cli(dir, "embed sq.txt -o sq.json");
    REQUIRE(r.code == 0);
    CHECK(contains(r.err, "warning"));
    CHECK(Json::parse(slurp(dir + "/sq.json"))["length"] == 0);

    spit(dir + "/loop.txt", "0 0\n");
    CHECK(cli(dir, "embed loop.txt").code == 1);
}
