#include <doctest.h>

#include <cmath>
#include <string>

#include "wallmem/error.hpp"
#include "wallmem/schedule.hpp"

using namespace wallmem;

namespace {

ScheduleTable two_knot() { return ScheduleTable("line", {{0.0, 6.0, 0.0}, {1.0, 0.0, 10.0}}); }

std::string error_of(const std::string& csv) {
    try {
        load_schedule(csv);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("load_schedule accepts a minimal monotone table") {
    const auto t = load_schedule("s,A_GHz,B_GHz\n0,6,0.1\n0.5,2,5\n1,0.001,10\n");
    CHECK(t.knots().size() == 3);
    CHECK(t.knots()[1].a_ghz == 2.0);
}

TEST_CASE("load_schedule sorts rows by s") {
    const auto t = load_schedule("s,A_GHz,B_GHz\n1,0,10\n0,6,0\n0.5,2,5\n");
    REQUIRE(t.knots().size() == 3);
    CHECK(t.knots()[0].s == 0.0);
    CHECK(t.knots()[2].s == 1.0);
}

TEST_CASE("load_schedule errors carry the row number") {
    const auto dup = error_of("s,A_GHz,B_GHz\n0,6,0\n0.5,3,4\n0.5,2,5\n1,0,10\n");
    CHECK(dup.find("non-monotone s") != std::string::npos);
    CHECK(dup.find("line 4") != std::string::npos);

    const auto bad = error_of("s,A_GHz,B_GHz\n0,6,0\n0.5,x,5\n1,0,10\n");
    CHECK(bad.find("line 3") != std::string::npos);

    const auto short_row = error_of("s,A_GHz,B_GHz\n0,6\n1,0,10\n");
    CHECK(short_row.find("line 2") != std::string::npos);

    const auto a_up = error_of("s,A_GHz,B_GHz\n0,6,0\n0.5,7,5\n1,0,10\n");
    CHECK(a_up.find("line 3") != std::string::npos);

    const auto b_down = error_of("s,A_GHz,B_GHz\n0,6,3\n0.5,2,1\n1,0,10\n");
    CHECK(b_down.find("line 3") != std::string::npos);

    CHECK_FALSE(error_of("s,A,B\n0,6,0\n1,0,10\n").empty());
    CHECK_FALSE(error_of("s,A_GHz,B_GHz\n0.1,6,0\n1,0,10\n").empty());
    CHECK_FALSE(error_of("s,A_GHz,B_GHz\n0,6,0\n").empty());
}

TEST_CASE("synthetic default evaluates its closed forms at the knots") {
    const auto t = ScheduleTable::synthetic_default();
    CHECK(t.synthetic());
    REQUIRE(t.knots().size() == 1001);
    for (int i = 0; i <= 1000; i += 37) {
        const double s = i / 1000.0;
        const auto e = interpolate(t, s);
        CHECK(e.a_ghz == doctest::Approx(6.0 * (1 - s) * (1 - s)).epsilon(1e-14));
        CHECK(e.b_ghz == doctest::Approx(10.0 * s * s).epsilon(1e-14));
    }
}

TEST_CASE("interpolate is linear between knots and exact at knots") {
    const auto t = two_knot();
    const auto mid = interpolate(t, 0.5);
    CHECK(mid.a_ghz == 3.0);
    CHECK(mid.b_ghz == 5.0);
    const auto start = interpolate(t, 0.0);
    CHECK(start.a_ghz == 6.0);
    CHECK(start.b_ghz == 0.0);
    const auto quarter = interpolate(t, 0.25);
    CHECK(quarter.a_ghz == doctest::Approx(4.5));
    CHECK(quarter.b_ghz == doctest::Approx(2.5));
    CHECK_THROWS_AS(interpolate(t, 1.5), Error);
    CHECK_THROWS_AS(interpolate(t, -0.1), Error);
}

TEST_CASE("interpolate is continuous across knots") {
    const auto t = ScheduleTable::synthetic_default();
    for (const auto& k : t.knots()) {
        const double below = std::max(0.0, k.s - 1e-12);
        const double above = std::min(1.0, k.s + 1e-12);
        CHECK(std::abs(interpolate(t, below).a_ghz - k.a_ghz) < 1e-9);
        CHECK(std::abs(interpolate(t, above).b_ghz - k.b_ghz) < 1e-9);
    }
}

TEST_CASE("energy_point ratios") {
    const ScheduleTable t("flat", {{0.0, 0.5, 10.0}, {1.0, 0.0, 10.0}});
    auto e = energy_point(t, 0.0, 1.0);
    CHECK(e.gamma_over_j == doctest::Approx(0.05));
    CHECK(e.gamma_ghz == doctest::Approx(0.25));
    CHECK(e.j_ghz == doctest::Approx(5.0));
    e = energy_point(t, 0.0, 0.001);
    CHECK(e.gamma_over_j == doctest::Approx(50.0));
    e = energy_point(t, 1.0, 1.0);
    CHECK(e.gamma_over_j == 0.0);
    CHECK(e.gamma_ghz == 0.0);
    CHECK_FALSE(e.infinite);
}

TEST_CASE("energy_point flags B J = 0 as infinite") {
    const auto e = energy_point(ScheduleTable::synthetic_default(), 0.0, 1.0);
    CHECK(e.infinite);
    CHECK(std::isinf(e.gamma_over_j));
    CHECK(e.gamma_ghz == 3.0);
}

TEST_CASE("energy_point is homogeneous in J and monotone in s") {
    const auto t = ScheduleTable::synthetic_default();
    double previous = HUGE_VAL;
    for (int i = 1; i <= 100; ++i) {
        const double s = i / 100.0;
        const auto full = energy_point(t, s, 1.0);
        const auto half = energy_point(t, s, 0.5);
        CHECK(half.gamma_over_j == 2.0 * full.gamma_over_j);
        CHECK(full.gamma_over_j <= previous);
        previous = full.gamma_over_j;
    }
}

TEST_CASE("build_reverse_waveform breakpoints") {
    const auto w = build_reverse_waveform(0.2, 0.5, 2.0);
    const auto& p = w.breakpoints();
    REQUIRE(p.size() == 4);
    CHECK(p[0].t_us == 0.0);
    CHECK(p[0].s == 1.0);
    CHECK(p[1].t_us == 0.5);
    CHECK(p[1].s == 0.2);
    CHECK(p[2].t_us == 2.5);
    CHECK(p[2].s == 0.2);
    CHECK(p[3].t_us == 3.0);
    CHECK(p[3].s == 1.0);
    CHECK(w.duration_us() == 3.0);
}

TEST_CASE("degenerate waveforms") {
    const auto flat = build_reverse_waveform(1.0, 0.5, 100.0);
    CHECK(flat.duration_us() == 101.0);
    for (double t : {0.0, 0.3, 50.0, 101.0}) CHECK(s_at(flat, t) == 1.0);

    const auto no_hold = build_reverse_waveform(0.9, 0.5, 0.0);
    CHECK(no_hold.breakpoints().size() == 4);
    const auto distinct = no_hold.distinct_breakpoints();
    REQUIRE(distinct.size() == 3);
    CHECK(distinct[1].t_us == 0.5);
    CHECK(distinct[1].s == 0.9);
    CHECK(distinct[2].t_us == 1.0);

    CHECK_THROWS_AS(build_reverse_waveform(1.2, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(build_reverse_waveform(0.5, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(build_reverse_waveform(0.5, 0.5, -1.0), ConfigError);
}

TEST_CASE("s_at evaluates the piecewise-linear waveform") {
    const auto w = build_reverse_waveform(0.2, 0.5, 2.0);
    CHECK(s_at(w, 0.25) == doctest::Approx(0.6));
    CHECK(s_at(w, 1.5) == 0.2);
    CHECK(s_at(w, 3.0) == 1.0);
    CHECK_THROWS_AS(s_at(w, 3.5), Error);
    CHECK_THROWS_AS(s_at(w, -0.1), Error);
}

TEST_CASE("waveform is symmetric about the hold midpoint") {
    for (double sp : {0.0, 0.37, 0.9}) {
        const auto w = build_reverse_waveform(sp, 0.5, 1.3);
        const double total = w.duration_us();
        for (int i = 0; i <= 200; ++i) {
            const double t = total * i / 200.0;
            CHECK(s_at(w, t) == doctest::Approx(s_at(w, total - t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("waveform JSON lists [t, s] pairs") {
    CHECK(build_reverse_waveform(0.2, 0.5, 2.0).to_json() == "[[0.0,1.0],[0.5,0.2],[2.5,0.2],[3.0,1.0]]");
}

TEST_CASE("smooth pieces split ramps at table knots") {
    const ScheduleTable t("three", {{0.0, 6.0, 0.0}, {0.5, 2.0, 5.0}, {1.0, 0.0, 10.0}});
    const auto b = smooth_piece_bounds(t, build_reverse_waveform(0.0, 1.0, 1.0));
    // ramp down crosses s = 0.5 at t = 0.5; ramp up at t = 2.5
    REQUIRE(b.size() == 6);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == doctest::Approx(0.5));
    CHECK(b[2] == 1.0);
    CHECK(b[3] == 2.0);
    CHECK(b[4] == doctest::Approx(2.5));
    CHECK(b[5] == 3.0);
}
