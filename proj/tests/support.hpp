#pragma once

#include <filesystem>
#include <string>

// Fresh scratch directory per test case, under the build tree.
inline std::string scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(WALLMEM_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "wallmem/embed.hpp"
#include "wallmem/random.hpp"

// Random d-regular simple graph: stubs are paired at random, skipping pairs
// that would form a loop or a double edge, restarting when stuck.
inline wallmem::HardwareGraph random_regular_graph(int vertices, int degree, std::uint64_t seed) {
    wallmem::Rng rng(seed);
    for (;;) {
        std::vector<int> stubs;
        for (int v = 0; v < vertices; ++v)
            for (int k = 0; k < degree; ++k) stubs.push_back(v);
        std::set<std::pair<int, int>> edges;
        int failures = 0;
        while (!stubs.empty() && failures < 1000) {
            const auto i = static_cast<std::size_t>(rng() % stubs.size());
            const auto j = static_cast<std::size_t>(rng() % stubs.size());
            const int a = std::min(stubs[i], stubs[j]);
            const int b = std::max(stubs[i], stubs[j]);
            if (i == j || a == b || edges.count({a, b})) {
                ++failures;
                continue;
            }
            edges.emplace(a, b);
            for (const auto k : {std::max(i, j), std::min(i, j)}) {
                stubs[k] = stubs.back();
                stubs.pop_back();
            }
        }
        if (stubs.empty()) return wallmem::make_graph(vertices, {edges.begin(), edges.end()}, "random-regular");
    }
}
