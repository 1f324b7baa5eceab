#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "wallmem/error.hpp"
#include "wallmem/ring.hpp"

using namespace wallmem;

namespace {

RingSpec ring(int n, int edge = 0, std::vector<int> faults = {}) {
    RingSpec s;
    s.n = n;
    s.initial_wall_edge = edge;
    s.faulty_sites = std::move(faults);
    return validated(s);
}

}  // namespace

TEST_CASE("validated rejects bad ring specs") {
    RingSpec s;
    s.n = 4;
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.n = 1;
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.n = 5;
    s.j_programmed = 0.0;
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.j_programmed = 1.5;
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.j_programmed = 1.0;
    s.initial_wall_edge = 5;
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.initial_wall_edge = 0;
    s.faulty_sites = {7};
    CHECK_THROWS_AS(validated(s), ConfigError);
    s.faulty_sites = {3, 1, 3};
    CHECK(validated(s).faulty_sites == std::vector<int>{1, 3});
}

TEST_CASE("detect_walls examples") {
    auto w = detect_walls(SpinConfig::parse("+-+-+"));
    REQUIRE(w.size() == 1);
    CHECK(w[0].edge == 4);
    CHECK(w[0].orientation == WallOrientation::up);

    w = detect_walls(SpinConfig::parse("+++++"));
    CHECK(w.size() == 5);
    for (const auto& wall : w) CHECK(wall.orientation == WallOrientation::up);

    w = detect_walls(SpinConfig::parse("+--+-"));
    REQUIRE(w.size() == 1);
    CHECK(w[0].edge == 1);
    CHECK(w[0].orientation == WallOrientation::down);
}

TEST_CASE("wall count is odd for every configuration of small odd rings") {
    for (int n : {3, 5, 7, 9, 11}) {
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
            // Count aligned edges straight from the bits.
            int aligned = 0;
            for (int i = 0; i < n; ++i) {
                const int j = (i + 1) % n;
                aligned += ((idx >> i) & 1) == ((idx >> j) & 1);
            }
            REQUIRE(aligned % 2 == 1);
            REQUIRE(wall_count(SpinConfig::from_index(idx, n)) == aligned);
        }
    }
}

TEST_CASE("initial_state places one up-up wall") {
    CHECK(initial_state(ring(5, 0)).to_string() == "++-+-");
    CHECK(initial_state(ring(3, 1)).to_string() == "-++");
    for (int n : {3, 5, 7, 9, 11, 101}) {
        for (int e = 0; e < n; e += std::max(1, n / 7)) {
            const auto walls = detect_walls(initial_state(ring(n, e)));
            REQUIRE(walls.size() == 1);
            CHECK(walls[0].edge == e);
            CHECK(walls[0].orientation == WallOrientation::up);
        }
    }
}

TEST_CASE("apply_faults") {
    Rng rng(3);
    const auto spec = ring(7);
    const auto start = initial_state(spec);
    CHECK(apply_faults(start, spec, rng) == start);

    const auto faulty = ring(7, 0, {2, 5});
    for (int k = 0; k < 200; ++k) {
        const auto out = apply_faults(start, faulty, rng);
        for (int i = 0; i < 7; ++i) {
            if (i != 2 && i != 5) CHECK(out[i] == start[i]);
        }
    }

    // All sites faulty: every configuration equally likely.
    const auto all = ring(3, 0, {0, 1, 2});
    std::map<std::string, int> freq;
    const int draws = 80000;
    for (int k = 0; k < draws; ++k) ++freq[apply_faults(initial_state(all), all, rng).to_string()];
    CHECK(freq.size() == 8);
    for (const auto& [cfg, count] : freq) CHECK(std::abs(count / double(draws) - 0.125) < 0.005);
}

TEST_CASE("hamming_distance") {
    const auto a = SpinConfig::parse("++-+-");
    CHECK(hamming_distance(a, a) == 0);
    CHECK(hamming_distance(a, global_flip(a)) == 5);
    CHECK(hamming_distance(a, SpinConfig::parse("+--+-")) == 1);
    CHECK_THROWS_AS(hamming_distance(a, SpinConfig::parse("+++")), Error);
}

TEST_CASE("global flip swaps orientation and keeps edges") {
    for (std::uint64_t idx = 0; idx < 512; ++idx) {
        const auto c = SpinConfig::from_index(idx, 9);
        const auto a = detect_walls(c);
        const auto b = detect_walls(global_flip(c));
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].edge == b[i].edge);
            CHECK(a[i].orientation != b[i].orientation);
        }
    }
}

TEST_CASE("rotation moves walls by the same offset") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 11;
        const auto c = SpinConfig::from_index(rng() & ((1u << n) - 1), n);
        const int k = static_cast<int>(rng() % n);
        std::vector<int> expect;
        for (const auto& w : detect_walls(c)) expect.push_back((w.edge + k) % n);
        std::sort(expect.begin(), expect.end());
        std::vector<int> got;
        for (const auto& w : detect_walls(rotate(c, k))) got.push_back(w.edge);
        CHECK(got == expect);
    }
}

TEST_CASE("spin text and index round trips") {
    const auto c = SpinConfig::parse("+-++-");
    CHECK(c.to_string() == "+-++-");
    CHECK(SpinConfig::from_index(c.to_index(), 5) == c);
    CHECK(SpinConfig::from_index(0, 3).to_string() == "+++");
    CHECK(SpinConfig::from_index(1, 3).to_string() == "-++");
    CHECK_THROWS_AS(SpinConfig::parse("+x-"), Error);
}
