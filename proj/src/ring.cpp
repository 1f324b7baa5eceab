#include "wallmem/ring.hpp"

#include <algorithm>

#include "wallmem/error.hpp"

namespace wallmem {

RingSpec validated(RingSpec spec) {
    if (spec.n < 3 || spec.n % 2 == 0) {
        throw ConfigError("ring size n must be odd and >= 3, got " + std::to_string(spec.n));
    }
    if (!(spec.j_programmed > 0.0 && spec.j_programmed <= 1.0)) {
        throw ConfigError("j_programmed must lie in (0, 1]");
    }
    if (spec.initial_wall_edge < 0 || spec.initial_wall_edge >= spec.n) {
        throw ConfigError("initial_wall_edge " + std::to_string(spec.initial_wall_edge) +
                          " outside [0, n)");
    }
    auto& f = spec.faulty_sites;
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    if (!f.empty() && (f.front() < 0 || f.back() >= spec.n)) {
        throw ConfigError("faulty site index outside [0, n)");
    }
    return spec;
}

SpinConfig::SpinConfig(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto s : spins_) {
        if (s != 1 && s != -1) throw Error("spin values must be +1 or -1");
    }
}

SpinConfig SpinConfig::parse(std::string_view text) {
    std::vector<std::int8_t> spins;
    spins.reserve(text.size());
    for (char c : text) {
        if (c == '+') {
            spins.push_back(1);
        } else if (c == '-') {
            spins.push_back(-1);
        } else {
            throw Error(std::string("invalid spin character '") + c + "'");
        }
    }
    return SpinConfig(std::move(spins));
}

SpinConfig SpinConfig::from_index(std::uint64_t index, int n) {
    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) spins[static_cast<std::size_t>(i)] = ((index >> i) & 1U) ? -1 : 1;
    SpinConfig c;
    c.spins_ = std::move(spins);
    return c;
}

std::string SpinConfig::to_string() const {
    std::string out(spins_.size(), '+');
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        if (spins_[i] < 0) out[i] = '-';
    }
    return out;
}

std::uint64_t SpinConfig::to_index() const {
    if (spins_.size() > 64) throw Error("configuration too long for a basis index");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        if (spins_[i] < 0) idx |= (std::uint64_t{1} << i);
    }
    return idx;
}

void SpinConfig::set(int i, std::int8_t v) {
    if (v != 1 && v != -1) throw Error("spin values must be +1 or -1");
    spins_.at(static_cast<std::size_t>(i)) = v;
}

WallSet detect_walls(const SpinConfig& cfg) {
    WallSet walls;
    const int n = cfg.size();
    for (int e = 0; e < n; ++e) {
        const auto a = cfg[e];
        if (a == cfg[(e + 1) % n]) {
            walls.push_back({e, a > 0 ? WallOrientation::up : WallOrientation::down});
        }
    }
    return walls;
}

int wall_count(const SpinConfig& cfg) {
    const int n = cfg.size();
    int count = 0;
    for (int e = 0; e < n; ++e) count += (cfg[e] == cfg[(e + 1) % n]);
    return count;
}

SpinConfig initial_state(const RingSpec& spec) {
    const int n = spec.n;
    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    // Walk around the ring from the site after the wall; n odd puts the last
    // site (the wall's left end) back on +1.
    for (int k = 0; k < n; ++k) {
        const int site = (spec.initial_wall_edge + 1 + k) % n;
        spins[static_cast<std::size_t>(site)] = (k % 2 == 0) ? 1 : -1;
    }
    return SpinConfig(std::move(spins));
}

SpinConfig apply_faults(const SpinConfig& cfg, const RingSpec& spec, Rng& rng) {
    if (spec.faulty_sites.empty()) return cfg;
    SpinConfig out = cfg;
    for (int site : spec.faulty_sites) out.set(site, fair_coin(rng) ? 1 : -1);
    return out;
}

int hamming_distance(const SpinConfig& a, const SpinConfig& b) {
    if (a.size() != b.size()) {
        throw Error("hamming_distance: length mismatch " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
    }
    int d = 0;
    for (int i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

SpinConfig global_flip(const SpinConfig& cfg) {
    auto spins = cfg.spins();
    for (auto& s : spins) s = static_cast<std::int8_t>(-s);
    return SpinConfig(std::move(spins));
}

SpinConfig rotate(const SpinConfig& cfg, int k) {
    const int n = cfg.size();
    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    const int shift = ((k % n) + n) % n;
    for (int i = 0; i < n; ++i) spins[static_cast<std::size_t>((i + shift) % n)] = cfg[i];
    return SpinConfig(std::move(spins));
}

}  // namespace wallmem
