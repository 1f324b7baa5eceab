#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wallmem/random.hpp"

namespace wallmem {

/// Odd antiferromagnetic ring. Edge e joins sites e and (e+1) mod n; the
/// coupling term is +(B J / 2) sz sz, so an edge is frustrated (a domain wall)
/// when its two spins are aligned.
struct RingSpec {
    int n = 11;
    double j_programmed = 1.0;
    int initial_wall_edge = 0;
    std::vector<int> faulty_sites;  // sorted, unique
};

/// Throws ConfigError unless n is odd and >= 3, J in (0, 1], and the wall
/// edge and faulty sites lie in [0, n). Sorts and dedupes faulty_sites.
RingSpec validated(RingSpec spec);

/// Z-basis configuration, entries are +1 or -1.
class SpinConfig {
public:
    SpinConfig() = default;
    explicit SpinConfig(std::vector<std::int8_t> spins);

    /// `+`/`-` text form.
    static SpinConfig parse(std::string_view text);
    /// Bit i of `index` set means spin i is down.
    static SpinConfig from_index(std::uint64_t index, int n);

    std::string to_string() const;
    std::uint64_t to_index() const;

    int size() const { return static_cast<int>(spins_.size()); }
    std::int8_t operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
    void set(int i, std::int8_t v);
    const std::vector<std::int8_t>& spins() const { return spins_; }

    bool operator==(const SpinConfig&) const = default;

private:
    std::vector<std::int8_t> spins_;
};

enum class WallOrientation : std::uint8_t { up, down };

struct Wall {
    int edge;
    WallOrientation orientation;
    bool operator==(const Wall&) const = default;
};

using WallSet = std::vector<Wall>;

WallSet detect_walls(const SpinConfig& cfg);
int wall_count(const SpinConfig& cfg);

/// Alternating configuration with a single up-up wall on spec.initial_wall_edge.
SpinConfig initial_state(const RingSpec& spec);

/// Replaces every faulty site with an independent fair +-1 draw.
SpinConfig apply_faults(const SpinConfig& cfg, const RingSpec& spec, Rng& rng);

int hamming_distance(const SpinConfig& a, const SpinConfig& b);

SpinConfig global_flip(const SpinConfig& cfg);
/// Site i of the result is site (i - k) mod n of the input.
SpinConfig rotate(const SpinConfig& cfg, int k);

}  // namespace wallmem
