#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace wallmem {

/// Undirected simple graph on vertices 0 .. V-1.
struct HardwareGraph {
    std::string name = "graph";
    std::vector<std::vector<int>> adjacency;  // sorted neighbour lists
    std::size_t edge_count = 0;
    std::vector<std::string> warnings;

    int vertex_count() const { return static_cast<int>(adjacency.size()); }
    bool has_edge(int u, int v) const;
};

/// Builds a graph from an edge list. Throws on self-loops and negative ids;
/// duplicate edges are dropped with a warning.
HardwareGraph make_graph(int vertex_count, const std::vector<std::pair<int, int>>& edges,
                         std::string name = "graph");

/// `u v` per line; `#` starts a comment. V is one more than the largest id.
HardwareGraph load_graph(std::string_view content, std::string name = "graph");
HardwareGraph load_graph_file(const std::string& path);

struct CycleEmbedding {
    std::vector<int> cycle;
    int length() const { return static_cast<int>(cycle.size()); }
};

struct EmbeddingCheck {
    bool ok = false;
    std::string reason;
};

/// Consecutive vertices adjacent (wrapping around), all distinct, odd length >= 3.
EmbeddingCheck validate_embedding(const HardwareGraph& graph, const std::vector<int>& cycle);

bool is_bipartite(const HardwareGraph& graph);

struct CycleSearchOptions {
    int min_length = 3;
    /// Total path moves (extensions and rotations) across all restarts.
    long long iterations = 2'000'000;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Longest odd cycle found by randomized path growth with Posa rotations,
/// restarted from fresh random vertices. Each restart has its own derived
/// seed and a fixed share of the budget, so the result depends only on the
/// seed and the budget, not on the worker count. Best result is the longest,
/// ties broken by the lexicographically smallest canonical vertex list.
std::optional<CycleEmbedding> find_odd_cycle(const HardwareGraph& graph, const CycleSearchOptions& options);

/// Same search bounded by wall-clock time instead of iterations. Results vary
/// with machine speed.
std::optional<CycleEmbedding> find_odd_cycle_timed(const HardwareGraph& graph, int min_length,
                                                   double time_budget_ms, std::uint64_t seed, int workers = 1);

/// Rotation and direction with the smallest vertex first and the smaller of
/// its two neighbours second.
std::vector<int> canonical_cycle(std::vector<int> cycle);

nlohmann::ordered_json embedding_json(const HardwareGraph& graph, const std::optional<CycleEmbedding>& found);

}  // namespace wallmem
