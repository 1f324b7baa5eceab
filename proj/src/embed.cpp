#include "wallmem/embed.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include "wallmem/error.hpp"
#include "wallmem/random.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

std::size_t index_below(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

bool better(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

/// One restart: grow a path from a random vertex, extending at the tail where
/// possible (preferring neighbours with few free neighbours) and otherwise
/// rotating the tail through an on-path neighbour. Every tail neighbour on the
/// path closes a cycle; odd ones are candidates.
std::vector<int> search_once(const HardwareGraph& g, const std::vector<int>& starts, std::uint64_t seed,
                             long long budget) {
    const int v = g.vertex_count();
    Rng rng(seed);
    std::vector<int> path;
    std::vector<int> pos(static_cast<std::size_t>(v), -1);
    std::vector<int> free_degree(static_cast<std::size_t>(v));
    for (int u = 0; u < v; ++u) free_degree[static_cast<std::size_t>(u)] = static_cast<int>(g.adjacency[static_cast<std::size_t>(u)].size());

    const auto push = [&](int u) {
        pos[static_cast<std::size_t>(u)] = static_cast<int>(path.size());
        path.push_back(u);
        for (int w : g.adjacency[static_cast<std::size_t>(u)]) --free_degree[static_cast<std::size_t>(w)];
    };

    int best_len = 0;
    std::vector<int> best;
    const auto record_cycles = [&] {
        const int tail = path.back();
        const int k = static_cast<int>(path.size()) - 1;
        for (int w : g.adjacency[static_cast<std::size_t>(tail)]) {
            const int i = pos[static_cast<std::size_t>(w)];
            if (i < 0) continue;
            const int len = k - i + 1;
            if (len >= 3 && len % 2 == 1 && len > best_len) {
                best_len = len;
                best.assign(path.begin() + i, path.end());
            }
        }
    };

    push(starts[index_below(rng, starts.size())]);
    int stuck = 0;
    bool reversed = false;
    const int stuck_limit = std::max(50, v / 2);
    std::vector<int> choices;
    for (long long it = 0; it < budget; ++it) {
        const int tail = path.back();
        choices.clear();
        int fewest = 1 << 30;
        for (int w : g.adjacency[static_cast<std::size_t>(tail)]) {
            if (pos[static_cast<std::size_t>(w)] >= 0) continue;
            const int f = free_degree[static_cast<std::size_t>(w)];
            if (f < fewest) {
                fewest = f;
                choices.clear();
            }
            if (f == fewest) choices.push_back(w);
        }
        if (!choices.empty()) {
            push(choices[index_below(rng, choices.size())]);
            record_cycles();
            stuck = 0;
            reversed = false;
            continue;
        }
        // Rotation: tail t adjacent to path[i] turns path[0..i] path[k..i+1]
        // into a path ending at path[i+1].
        const int k = static_cast<int>(path.size()) - 1;
        choices.clear();
        for (int w : g.adjacency[static_cast<std::size_t>(tail)]) {
            const int i = pos[static_cast<std::size_t>(w)];
            if (i >= 0 && i < k - 1) choices.push_back(i);
        }
        if (choices.empty()) {
            if (reversed || path.size() <= 1) break;
            std::reverse(path.begin(), path.end());  // try growing from the other end
            for (int j = 0; j <= k; ++j) pos[static_cast<std::size_t>(path[static_cast<std::size_t>(j)])] = j;
            reversed = true;
            continue;
        }
        if (++stuck > stuck_limit) break;
        reversed = false;
        const int i = choices[index_below(rng, choices.size())];
        std::reverse(path.begin() + i + 1, path.end());
        for (int j = i + 1; j <= k; ++j) pos[static_cast<std::size_t>(path[static_cast<std::size_t>(j)])] = j;
        record_cycles();
    }
    return best;
}

std::vector<int> reduce(std::vector<std::vector<int>>& results) {
    std::vector<int> best;
    for (auto& c : results) {
        if (c.empty()) continue;
        c = canonical_cycle(std::move(c));
        if (best.empty() || better(c, best)) best = c;
    }
    return best;
}

/// Vertices of components that contain an odd cycle, plus one odd cycle found
/// from a BFS colouring conflict (walk both ends up the tree to their meeting
/// point). Path growth started elsewhere can never close an odd cycle.
struct OddStructure {
    std::vector<int> starts;
    std::vector<int> witness;
};

OddStructure odd_structure(const HardwareGraph& g) {
    const auto v = static_cast<std::size_t>(g.vertex_count());
    std::vector<int> colour(v, -1), parent(v, -1), depth(v, 0);
    OddStructure out;
    for (int s = 0; s < g.vertex_count(); ++s) {
        if (colour[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> component{s};
        bool odd = false;
        colour[static_cast<std::size_t>(s)] = 0;
        for (std::size_t head = 0; head < component.size(); ++head) {
            const int u = component[head];
            for (int w : g.adjacency[static_cast<std::size_t>(u)]) {
                const auto wi = static_cast<std::size_t>(w);
                if (colour[wi] < 0) {
                    colour[wi] = 1 - colour[static_cast<std::size_t>(u)];
                    parent[wi] = u;
                    depth[wi] = depth[static_cast<std::size_t>(u)] + 1;
                    component.push_back(w);
                } else if (colour[wi] == colour[static_cast<std::size_t>(u)]) {
                    odd = true;
                    if (out.witness.empty()) {
                        std::vector<int> left{u}, right{w};
                        while (left.back() != right.back()) {
                            const auto l = static_cast<std::size_t>(left.back());
                            const auto r = static_cast<std::size_t>(right.back());
                            if (depth[l] >= depth[r]) left.push_back(parent[l]);
                            else right.push_back(parent[r]);
                        }
                        right.pop_back();
                        out.witness.assign(left.rbegin(), left.rend());
                        out.witness.insert(out.witness.end(), right.begin(), right.end());
                    }
                }
            }
        }
        if (odd) out.starts.insert(out.starts.end(), component.begin(), component.end());
    }
    std::sort(out.starts.begin(), out.starts.end());
    return out;
}

long long restart_budget(const HardwareGraph& g) {
    return std::max<long long>(1000, 20LL * g.vertex_count());
}

}  // namespace

bool HardwareGraph::has_edge(int u, int v) const {
    if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return false;
    const auto& nb = adjacency[static_cast<std::size_t>(u)];
    return std::binary_search(nb.begin(), nb.end(), v);
}

HardwareGraph make_graph(int vertex_count, const std::vector<std::pair<int, int>>& edges, std::string name) {
    if (vertex_count < 0) throw Error("graph: negative vertex count");
    HardwareGraph g;
    g.name = std::move(name);
    g.adjacency.assign(static_cast<std::size_t>(vertex_count), {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count) {
            throw Error("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range");
        }
        if (u == v) throw Error("graph: self-loop at vertex " + std::to_string(u));
        const auto key = std::minmax(u, v);
        if (!seen.insert(key).second) {
            g.warnings.push_back("duplicate edge " + std::to_string(key.first) + " " + std::to_string(key.second) +
                                 " dropped");
            continue;
        }
        g.adjacency[static_cast<std::size_t>(u)].push_back(v);
        g.adjacency[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
    g.edge_count = seen.size();
    return g;
}

HardwareGraph load_graph(std::string_view content, std::string name) {
    std::vector<std::pair<int, int>> edges;
    int max_id = -1;
    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        for (auto f : split(line, ' ')) {
            for (auto t : split(f, '\t')) {
                if (!trim(t).empty()) fields.push_back(trim(t));
            }
        }
        const auto fail = [&](const std::string& why) {
            return ConfigError("graph line " + std::to_string(i + 1) + ": " + why);
        };
        if (fields.size() != 2) throw fail("expected 'u v'");
        const auto u = parse_int(fields[0]);
        const auto v = parse_int(fields[1]);
        if (!u || !v || *u < 0 || *v < 0 || *u > 100'000'000 || *v > 100'000'000) {
            throw fail("vertex ids must be non-negative integers");
        }
        if (*u == *v) throw fail("self-loop at vertex " + std::to_string(*u));
        edges.emplace_back(static_cast<int>(*u), static_cast<int>(*v));
        max_id = std::max({max_id, static_cast<int>(*u), static_cast<int>(*v)});
    }
    return make_graph(max_id + 1, edges, std::move(name));
}

HardwareGraph load_graph_file(const std::string& path) {
    std::string content;
    try {
        content = read_file(path);
    } catch (const Error&) {
        throw ConfigError("cannot read graph file: " + path);
    }
    return load_graph(content, path);
}

EmbeddingCheck validate_embedding(const HardwareGraph& graph, const std::vector<int>& cycle) {
    const auto n = cycle.size();
    if (n < 3) return {false, "too short"};
    std::vector<int> sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= graph.vertex_count()) return {false, "vertex out of range"};
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {false, "not simple"};
    if (n % 2 == 0) return {false, "even length"};
    for (std::size_t i = 0; i < n; ++i) {
        const int a = cycle[i];
        const int b = cycle[(i + 1) % n];
        if (!graph.has_edge(a, b)) {
            return {false, "missing edge " + std::to_string(a) + " " + std::to_string(b)};
        }
    }
    return {true, ""};
}

bool is_bipartite(const HardwareGraph& graph) {
    std::vector<int> colour(static_cast<std::size_t>(graph.vertex_count()), -1);
    std::deque<int> queue;
    for (int s = 0; s < graph.vertex_count(); ++s) {
        if (colour[static_cast<std::size_t>(s)] >= 0) continue;
        colour[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int w : graph.adjacency[static_cast<std::size_t>(u)]) {
                auto& cw = colour[static_cast<std::size_t>(w)];
                if (cw < 0) {
                    cw = 1 - colour[static_cast<std::size_t>(u)];
                    queue.push_back(w);
                } else if (cw == colour[static_cast<std::size_t>(u)]) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::vector<int> canonical_cycle(std::vector<int> cycle) {
    if (cycle.size() < 2) return cycle;
    const auto first = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), first, cycle.end());
    if (cycle.size() > 2 && cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
}

std::optional<CycleEmbedding> find_odd_cycle(const HardwareGraph& graph, const CycleSearchOptions& options) {
    const auto odd = odd_structure(graph);
    if (odd.starts.empty()) return std::nullopt;
    const long long per_restart = restart_budget(graph);
    const long long restarts = std::max<long long>(1, (options.iterations + per_restart - 1) / per_restart);

    std::vector<std::vector<int>> results(static_cast<std::size_t>(restarts));
    std::atomic<long long> next{0};
    const auto worker = [&] {
        for (long long r; (r = next.fetch_add(1)) < restarts;) {
            const long long budget = std::min(per_restart, options.iterations - r * per_restart);
            results[static_cast<std::size_t>(r)] =
                search_once(graph, odd.starts, derive_seed(options.seed, static_cast<std::uint64_t>(r)), std::max(1LL, budget));
        }
    };
    const int threads = std::max(1, std::min<int>(options.workers, static_cast<int>(restarts)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    results.push_back(odd.witness);
    auto best = reduce(results);
    if (static_cast<int>(best.size()) < std::max(3, options.min_length)) return std::nullopt;
    return CycleEmbedding{std::move(best)};
}

std::optional<CycleEmbedding> find_odd_cycle_timed(const HardwareGraph& graph, int min_length,
                                                   double time_budget_ms, std::uint64_t seed, int workers) {
    const auto odd = odd_structure(graph);
    if (odd.starts.empty()) return std::nullopt;
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double, std::milli>(time_budget_ms));
    const long long per_restart = restart_budget(graph);
    std::mutex mutex;
    std::vector<int> best = canonical_cycle(odd.witness);
    std::atomic<long long> next{0};
    const auto worker = [&] {
        do {
            const long long r = next.fetch_add(1);
            auto c = search_once(graph, odd.starts, derive_seed(seed, static_cast<std::uint64_t>(r)), per_restart);
            if (c.empty()) continue;
            c = canonical_cycle(std::move(c));
            std::lock_guard lock(mutex);
            if (best.empty() || better(c, best)) best = std::move(c);
        } while (clock::now() < deadline);
    };
    const int threads = std::max(1, workers);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (static_cast<int>(best.size()) < std::max(3, min_length)) return std::nullopt;
    return CycleEmbedding{std::move(best)};
}

nlohmann::ordered_json embedding_json(const HardwareGraph& graph, const std::optional<CycleEmbedding>& found) {
    nlohmann::ordered_json j;
    j["graph"] = graph.name;
    j["vertices"] = graph.vertex_count();
    j["edges"] = graph.edge_count;
    if (found) {
        j["length"] = found->length();
        j["coverage"] = graph.vertex_count() > 0 ? static_cast<double>(found->length()) / graph.vertex_count() : 0.0;
        j["cycle"] = found->cycle;
    } else {
        j["length"] = 0;
        j["cycle"] = nullptr;
    }
    return j;
}

}  // namespace wallmem
