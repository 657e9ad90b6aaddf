#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "isinglab/graph.hpp"
#include "isinglab/numeric.hpp"

#include <json.hpp>

namespace isinglab {

// Binary graphical model with node thresholds theta_i and pairwise edge
// weights theta_ij, states in {0,1}. Unnormalized mass of configuration x is
//   exp( sum_i theta_i x_i + sum_{(i,j) in E} theta_ij x_i x_j ).
struct IsingModel {
    Graph graph;
    std::vector<double> thresholds;    // one per node
    std::vector<double> edge_weights;  // parallel to graph.edges

    double weight(NodeId i, NodeId j) const {
        int idx = graph.edge_index(i, j);
        if (idx < 0) throw std::invalid_argument("no such edge");
        return edge_weights[idx];
    }
};

inline IsingModel make_model(Graph g, std::vector<double> thresholds,
                             std::vector<double> edge_weights) {
    if (int(thresholds.size()) != g.n)
        throw std::invalid_argument("need one threshold per node");
    if (edge_weights.size() != g.edges.size())
        throw std::invalid_argument("need one weight per edge");
    return IsingModel{std::move(g), std::move(thresholds), std::move(edge_weights)};
}

// Configuration x in {0,1}^n, bit-packed; node 0 is the least significant
// bit of word 0. Enumeration order used in tests is the natural unsigned
// order of the bit pattern.
class Configuration {
public:
    explicit Configuration(int n) : n_(n), words_((n + 63) / 64, 0) {
        if (n < 0) throw std::invalid_argument("negative configuration size");
    }

    static Configuration from_word(std::uint64_t bits, int n) {
        Configuration c(n);
        if (n < 64 && (bits >> n) != 0)
            throw std::invalid_argument("bit pattern wider than n");
        if (n > 0) c.words_[0] = bits;
        return c;
    }

    static Configuration from_bits(const std::vector<int>& bits) {
        Configuration c(int(bits.size()));
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("bit must be 0 or 1");
            c.set(int(i), bits[i] != 0);
        }
        return c;
    }

    int size() const { return n_; }

    bool bit(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(int i, bool v) {
        std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

private:
    int n_;
    std::vector<std::uint64_t> words_;
};

// log of the unnormalized mass (Ising energy with + sign convention)
inline double log_weight(const IsingModel& m, const Configuration& x) {
    if (x.size() != m.graph.n) throw std::invalid_argument("configuration length mismatch");
    double lw = 0.0;
    for (int i = 0; i < m.graph.n; ++i)
        if (x.bit(i)) lw += m.thresholds[i];
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) {
        auto [i, j] = m.graph.edges[e];
        if (x.bit(i) && x.bit(j)) lw += m.edge_weights[e];
    }
    return lw;
}

// --- clique potential attribution ----------------------------------------
//
// Splitting the joint weight into per-clique factors psi_C needs every node
// term and every edge term to be owned by exactly one maximal clique (edges
// can lie in several maximal cliques when cliques overlap). Ownership goes
// to the lexicographically first clique containing the node / both
// endpoints, so sum_C log psi_C == log_weight holds exactly on every graph.

struct CliqueAssignment {
    std::vector<int> node_owner;  // node -> clique index
    std::vector<int> edge_owner;  // edge (canonical order) -> clique index
};

inline CliqueAssignment make_assignment(const Graph& g, const CliqueSet& cliques) {
    CliqueAssignment a;
    a.node_owner.assign(g.n, -1);
    a.edge_owner.assign(g.edges.size(), -1);
    for (std::size_t c = 0; c < cliques.cliques.size(); ++c) {
        for (NodeId v : cliques.cliques[c])
            if (a.node_owner[v] < 0) a.node_owner[v] = int(c);
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [i, j] = g.edges[e];
        for (std::size_t c = 0; c < cliques.cliques.size() && a.edge_owner[e] < 0; ++c) {
            const auto& cl = cliques.cliques[c];
            bool has_i = std::binary_search(cl.begin(), cl.end(), i);
            bool has_j = std::binary_search(cl.begin(), cl.end(), j);
            if (has_i && has_j) a.edge_owner[e] = int(c);
        }
        if (a.edge_owner[e] < 0)
            throw std::invalid_argument("edge not covered by any clique");
    }
    for (int v = 0; v < g.n; ++v)
        if (a.node_owner[v] < 0) throw std::invalid_argument("node not covered by any clique");
    return a;
}

// Partial configuration: values for a subset of nodes.
using PartialConfig = std::map<NodeId, int>;

// log psi_C(x_C): owned node potentials plus owned intra-clique edge terms.
// Summing over all cliques of a CliqueSet reproduces log_weight exactly.
inline double clique_log_weight(const IsingModel& m, const std::vector<NodeId>& clique,
                                int clique_index, const CliqueAssignment& assignment,
                                const PartialConfig& x_c) {
    auto value = [&](NodeId v) {
        auto it = x_c.find(v);
        if (it == x_c.end())
            throw std::invalid_argument("clique node " + std::to_string(v) +
                                        " missing from partial configuration");
        return it->second;
    };
    double lw = 0.0;
    for (NodeId v : clique)
        if (assignment.node_owner[v] == clique_index && value(v)) lw += m.thresholds[v];
    for (std::size_t a = 0; a < clique.size(); ++a)
        for (std::size_t b = a + 1; b < clique.size(); ++b) {
            int e = m.graph.edge_index(clique[a], clique[b]);
            if (e < 0 || assignment.edge_owner[e] != clique_index) continue;
            if (value(clique[a]) && value(clique[b])) lw += m.edge_weights[e];
        }
    return lw;
}

// normalized probability given a partition value z > 0
inline double probability(const IsingModel& m, const Configuration& x, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("partition value must be positive");
    return std::exp(log_weight(m, x) - std::log(z));
}

// --- model file format ----------------------------------------------------
// { "n": int, "thresholds": [real; n], "edges": [{"i": int, "j": int, "w": real}] }
// "thresholds" may be omitted (defaults to all zeros).

inline IsingModel parse_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("model needs an integer field \"n\"");
    int n = j["n"].get<int>();
    if (n < 1) throw std::invalid_argument("model needs n >= 1");

    std::vector<double> thresholds(n, 0.0);
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        if (!t.is_array() || int(t.size()) != n)
            throw std::invalid_argument("\"thresholds\" must be an array of length n");
        for (int i = 0; i < n; ++i) thresholds[i] = t[i].get<double>();
    }

    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<double> weights;
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            if (!e.contains("i") || !e.contains("j") || !e.contains("w"))
                throw std::invalid_argument("each edge needs fields i, j, w");
            pairs.emplace_back(e["i"].get<int>(), e["j"].get<int>());
            weights.push_back(e["w"].get<double>());
        }
    }
    // canonicalize and reject conflicting duplicates
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (auto& [i, j2] : pairs) {
        if (i == j2) throw std::invalid_argument("self-loop in model edges");
        if (i < 0 || j2 < 0 || i >= n || j2 >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (i > j2) std::swap(i, j2);
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });
    std::vector<std::pair<NodeId, NodeId>> upairs;
    std::vector<double> uweights;
    for (std::size_t idx : order) {
        if (!upairs.empty() && upairs.back() == pairs[idx])
            throw std::invalid_argument("duplicate edge in model file");
        upairs.push_back(pairs[idx]);
        uweights.push_back(weights[idx]);
    }
    return make_model(build_graph(n, upairs), std::move(thresholds), std::move(uweights));
}

inline std::string write_model(const IsingModel& m) {
    nlohmann::json j;
    j["n"] = m.graph.n;
    j["thresholds"] = m.thresholds;
    j["edges"] = nlohmann::json::array();
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) {
        j["edges"].push_back({{"i", m.graph.edges[e].first},
                              {"j", m.graph.edges[e].second},
                              {"w", m.edge_weights[e]}});
    }
    return j.dump(2);
}

}  // namespace isinglab
