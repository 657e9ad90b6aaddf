#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "isinglab/model.hpp"
#include "isinglab/partition.hpp"

namespace isinglab {

// Model over the free nodes V \ A after clamping x_A = x_A*. Weights from
// clamped-to-1 neighbours are absorbed into the free thresholds; terms
// entirely inside A become the constant log_offset, so
//   reduced log weight + log_offset == original log weight at the clamped x
// holds exactly for every free configuration.
struct ReducedModel {
    IsingModel model;                 // nodes re-indexed 0..|free|-1
    std::vector<NodeId> free_nodes;   // reduced index -> original id, ascending
    double log_offset = 0.0;

    int reduced_index(NodeId original) const {
        auto it = std::lower_bound(free_nodes.begin(), free_nodes.end(), original);
        if (it == free_nodes.end() || *it != original)
            throw std::invalid_argument("node is not free in the reduced model");
        return int(it - free_nodes.begin());
    }
};

// Intervention by replacement == conditioning: the graph keeps its structure,
// the clamped values are substituted, and the result is renormalized.
inline ReducedModel apply_intervention(const IsingModel& m, const InterventionSpec& iv) {
    for (const auto& [node, value] : iv.assignments) {
        (void)value;
        if (node < 0 || node >= m.graph.n)
            throw std::invalid_argument("intervention node out of range");
    }
    ReducedModel out;
    std::vector<int> new_index(m.graph.n, -1);
    for (int v = 0; v < m.graph.n; ++v)
        if (!iv.contains(v)) {
            new_index[v] = int(out.free_nodes.size());
            out.free_nodes.push_back(v);
        }

    std::vector<double> thresholds;
    for (NodeId v : out.free_nodes) thresholds.push_back(m.thresholds[v]);
    for (const auto& [a, value] : iv.assignments)
        if (value == 1) out.log_offset += m.thresholds[a];

    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<double> weights;
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) {
        auto [i, j] = m.graph.edges[e];
        const double w = m.edge_weights[e];
        const bool ci = iv.contains(i), cj = iv.contains(j);
        if (!ci && !cj) {
            edges.emplace_back(new_index[i], new_index[j]);
            weights.push_back(w);
        } else if (ci && cj) {
            if (iv.value_of(i) == 1 && iv.value_of(j) == 1) out.log_offset += w;
        } else {
            NodeId freev = ci ? j : i;
            NodeId clamped = ci ? i : j;
            if (iv.value_of(clamped) == 1) thresholds[new_index[freev]] += w;
        }
    }

    int nf = int(out.free_nodes.size());
    if (nf == 0) {
        out.model = IsingModel{};  // n = 0: the single empty configuration
        return out;
    }
    out.model = make_model(build_graph(nf, std::move(edges)), std::move(thresholds),
                           std::move(weights));
    return out;
}

// Conditional probability of one free configuration under the intervention,
// normalized exactly over {0,1}^{V \ A}.
inline double conditional_probability(const IsingModel& m, const InterventionSpec& iv,
                                      const Configuration& x_free,
                                      int cap = kDefaultEnumerationCap, int threads = 1) {
    ReducedModel rm = apply_intervention(m, iv);
    if (x_free.size() != rm.model.graph.n)
        throw std::invalid_argument("free configuration length mismatch");
    if (rm.model.graph.n == 0) return 1.0;  // single empty outcome
    PartitionEstimate z = exact_partition(rm.model, cap, threads);
    return std::exp(log_weight(rm.model, x_free) - z.log_value);
}

enum class MarginalMethod { exact, curie_weiss_clique_product };

struct MarginalTable {
    std::vector<std::pair<NodeId, double>> p_one;  // original node id -> P(x_i = 1)
    MarginalMethod method;

    double at(NodeId v) const {
        for (const auto& [node, p] : p_one)
            if (node == v) return p;
        throw std::invalid_argument("node has no marginal (clamped or out of range)");
    }
};

// P(x_i = 1 | x_A = x_A*) for every free node. Exact mode enumerates each
// connected component of the reduced graph (components are independent, so
// this reaches further than one global enumeration). The approximate mode
// estimates P(x_i=1) = Z(A u {i=1}) / Z(A) with per-clique Curie-Weiss
// normalizers, scoped to the component containing i.
inline MarginalTable marginals(const IsingModel& m, const InterventionSpec& iv,
                               MarginalMethod method, int cap = kDefaultEnumerationCap) {
    ReducedModel rm = apply_intervention(m, iv);
    MarginalTable table;
    table.method = method;
    if (rm.model.graph.n == 0) return table;

    if (method == MarginalMethod::exact) {
        auto comps = components_after_removal(rm.model.graph, {});
        std::vector<double> p(rm.model.graph.n, 0.0);
        detail::DenseModel dm(rm.model);
        for (const auto& comp : comps) {
            detail::check_cap(int(comp.size()), cap, "marginals");
            LogSumExp z;
            std::vector<LogSumExp> ones(comp.size());
            for (std::uint64_t sub = 0; sub < (std::uint64_t(1) << comp.size()); ++sub) {
                std::uint64_t x = 0;
                for (std::size_t b = 0; b < comp.size(); ++b)
                    if ((sub >> b) & 1) x |= std::uint64_t(1) << comp[b];
                double lw = dm.log_weight_mask(x);
                z.add(lw);
                for (std::size_t b = 0; b < comp.size(); ++b)
                    if ((sub >> b) & 1) ones[b].add(lw);
            }
            for (std::size_t b = 0; b < comp.size(); ++b)
                p[comp[b]] = std::exp(ones[b].log() - z.log());
        }
        for (int i = 0; i < rm.model.graph.n; ++i)
            table.p_one.emplace_back(rm.free_nodes[i], p[i]);
        return table;
    }

    // Curie-Weiss clique-product mode, on the original model's clique set.
    CliqueSet cliques = maximal_cliques(m.graph);
    CliqueAssignment assignment = make_assignment(m.graph, cliques);
    auto comps = components_after_removal(rm.model.graph, {});
    std::vector<int> comp_of(rm.model.graph.n, -1);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (NodeId v : comps[c]) comp_of[v] = int(c);

    auto base = clique_normalizers(m, cliques, assignment, iv, PerCliqueMethod::curie_weiss, cap);

    // map each clique with free nodes to the component those free nodes lie in
    std::vector<int> clique_comp(cliques.cliques.size(), -1);
    for (std::size_t c = 0; c < cliques.cliques.size(); ++c)
        for (NodeId v : cliques.cliques[c])
            if (!iv.contains(v)) {
                clique_comp[c] = comp_of[rm.reduced_index(v)];
                break;
            }

    for (int i = 0; i < rm.model.graph.n; ++i) {
        NodeId orig = rm.free_nodes[i];
        InterventionSpec iv_plus = iv;
        iv_plus.assignments[orig] = 1;
        auto num = clique_normalizers(m, cliques, assignment, iv_plus,
                                      PerCliqueMethod::curie_weiss, cap);
        double log_ratio = 0.0;
        for (std::size_t c = 0; c < cliques.cliques.size(); ++c)
            if (clique_comp[c] == comp_of[i])
                log_ratio += num[c].log_value - base[c].log_value;
        double p = std::exp(log_ratio);
        table.p_one.emplace_back(orig, std::clamp(p, 0.0, 1.0));
    }
    return table;
}

enum class ImpactMetric { l1_marginal_shift, expected_sum_shift };

struct InterventionRanking {
    struct Entry {
        NodeId node;
        int value;
        double impact;
    };
    std::vector<Entry> entries;  // impact descending, ties by ascending node id
    ImpactMetric metric;
};

// Scores every single-node intervention do(x_j = value) against the
// unintervened baseline. The metrics aggregate the shift of the other
// nodes' marginals.
inline InterventionRanking rank_interventions(const IsingModel& m, int value, ImpactMetric metric,
                                              MarginalMethod method,
                                              int cap = kDefaultEnumerationCap, int threads = 1) {
    if (value != 0 && value != 1) throw std::invalid_argument("intervention value must be 0 or 1");
    MarginalTable base = marginals(m, InterventionSpec{}, method, cap);

    InterventionRanking ranking;
    ranking.metric = metric;
    ranking.entries.resize(m.graph.n);
    // candidates are independent; results land in fixed slots
    detail::parallel_for(std::uint64_t(m.graph.n), threads, [&](std::uint64_t cand) {
        int j = int(cand);
        InterventionSpec iv;
        iv.assignments[j] = value;
        MarginalTable after = marginals(m, iv, method, cap);
        double impact = 0.0;
        if (metric == ImpactMetric::l1_marginal_shift) {
            for (const auto& [node, p] : after.p_one) impact += std::abs(p - base.at(node));
        } else {
            double sum_after = 0.0, sum_base = 0.0;
            for (const auto& [node, p] : after.p_one) {
                sum_after += p;
                sum_base += base.at(node);
            }
            impact = std::abs(sum_after - sum_base);
        }
        ranking.entries[j] = {j, value, impact};
    });
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) {
                         if (a.impact != b.impact) return a.impact > b.impact;
                         return a.node < b.node;
                     });
    return ranking;
}

}  // namespace isinglab
