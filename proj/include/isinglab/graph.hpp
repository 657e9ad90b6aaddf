#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isinglab {

using NodeId = int;

// Undirected simple graph. Edges are stored once, as (min, max) pairs in
// ascending order; adjacency lists are sorted. Immutable after build.
struct Graph {
    int n = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;  // canonical, sorted, unique
    std::vector<std::vector<NodeId>> adj;          // sorted neighbour lists

    bool has_edge(NodeId i, NodeId j) const {
        if (i == j) return false;
        const auto& a = adj[i];
        return std::binary_search(a.begin(), a.end(), j);
    }

    // index into edges for canonical pair (min,max); -1 when absent
    int edge_index(NodeId i, NodeId j) const {
        if (i > j) std::swap(i, j);
        auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
        if (it == edges.end() || *it != std::make_pair(i, j)) return -1;
        return int(it - edges.begin());
    }
};

inline Graph build_graph(int n, std::vector<std::pair<NodeId, NodeId>> edge_list) {
    if (n < 1) throw std::invalid_argument("graph needs at least one node");
    for (auto& [i, j] : edge_list) {
        if (i == j) throw std::invalid_argument("self-loop at node " + std::to_string(i));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (i > j) std::swap(i, j);
    }
    std::sort(edge_list.begin(), edge_list.end());
    edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());

    Graph g;
    g.n = n;
    g.edges = std::move(edge_list);
    g.adj.assign(n, {});
    for (auto [i, j] : g.edges) {
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
    return g;
}

// Maximal cliques in canonical order: each clique sorted ascending,
// cliques sorted lexicographically. Isolated nodes appear as singletons.
struct CliqueSet {
    std::vector<std::vector<NodeId>> cliques;
};

namespace detail {

inline std::vector<NodeId> intersect_sorted(const std::vector<NodeId>& a,
                                            const std::vector<NodeId>& b) {
    std::vector<NodeId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Bron-Kerbosch with pivoting. Worst case exponential, fast on the sparse
// graphs this library targets.
inline void bron_kerbosch(const Graph& g, std::vector<NodeId>& r, std::vector<NodeId> p,
                          std::vector<NodeId> x, std::vector<std::vector<NodeId>>& out) {
    if (p.empty() && x.empty()) {
        out.push_back(r);
        return;
    }
    // pivot: vertex of P u X with most neighbours in P
    NodeId pivot = -1;
    std::size_t best = 0;
    bool have_pivot = false;
    for (const auto* cand : {&p, &x}) {
        for (NodeId u : *cand) {
            std::size_t cnt = intersect_sorted(p, g.adj[u]).size();
            if (!have_pivot || cnt > best) {
                pivot = u;
                best = cnt;
                have_pivot = true;
            }
        }
    }
    std::vector<NodeId> candidates;
    for (NodeId v : p)
        if (!g.has_edge(pivot, v)) candidates.push_back(v);

    for (NodeId v : candidates) {
        r.push_back(v);
        bron_kerbosch(g, r, intersect_sorted(p, g.adj[v]), intersect_sorted(x, g.adj[v]), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.insert(std::lower_bound(x.begin(), x.end(), v), v);
    }
}

}  // namespace detail

inline CliqueSet maximal_cliques(const Graph& g) {
    std::vector<NodeId> all(g.n);
    for (int i = 0; i < g.n; ++i) all[i] = i;
    std::vector<std::vector<NodeId>> found;
    std::vector<NodeId> r;
    detail::bron_kerbosch(g, r, all, {}, found);
    for (auto& c : found) std::sort(c.begin(), c.end());
    std::sort(found.begin(), found.end());
    return CliqueSet{std::move(found)};
}

// Connected components of the induced subgraph on V \ removed, canonically
// ordered. Removing everything yields an empty list.
inline std::vector<std::vector<NodeId>> components_after_removal(const Graph& g,
                                                                 const std::vector<NodeId>& removed) {
    std::vector<char> gone(g.n, 0);
    for (NodeId v : removed) {
        if (v < 0 || v >= g.n) throw std::invalid_argument("removed node out of range");
        gone[v] = 1;
    }
    std::vector<char> seen(g.n, 0);
    std::vector<std::vector<NodeId>> comps;
    for (int s = 0; s < g.n; ++s) {
        if (gone[s] || seen[s]) continue;
        std::vector<NodeId> comp, stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (NodeId w : g.adj[v])
                if (!gone[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end());
    return comps;
}

// --- edge-list text format ---------------------------------------------
// First line "n <count>", then one "i j" pair per line, 0-based.
// '#' starts a comment; blank lines are skipped.

inline Graph parse_edge_list(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (n < 0) {
            std::string tag;
            if (!(ls >> tag)) continue;  // blank/comment before header
            if (tag != "n") throw std::invalid_argument("edge list must start with 'n <count>'");
            if (!(ls >> n) || n < 1) throw std::invalid_argument("bad node count");
            continue;
        }
        NodeId i, j;
        if (!(ls >> i)) continue;
        if (!(ls >> j)) throw std::invalid_argument("dangling edge endpoint");
        edges.emplace_back(i, j);
    }
    if (n < 0) throw std::invalid_argument("missing 'n <count>' header");
    return build_graph(n, std::move(edges));
}

inline Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    out << "n " << g.n << "\n";
    for (auto [i, j] : g.edges) out << i << " " << j << "\n";
}

}  // namespace isinglab
