#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "isinglab/intervention_spec.hpp"
#include "isinglab/model.hpp"
#include "isinglab/numeric.hpp"

namespace isinglab {

enum class Method { exact, inner, pairwise, curie_weiss, clique_product };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::inner: return "inner";
        case Method::pairwise: return "pairwise";
        case Method::curie_weiss: return "curie_weiss";
        case Method::clique_product: return "clique_product";
    }
    return "?";
}

// Partition value, kept in the log domain; exp(log_value) can overflow a
// double for large models, log_value never does.
struct PartitionEstimate {
    double log_value;
    Method method;

    double value() const { return std::exp(log_value); }
};

// --- exact enumeration -----------------------------------------------------

namespace detail {

// Flat tables for fast repeated evaluation of log weights on bitmasks.
struct DenseModel {
    int n;
    std::vector<double> theta;
    std::vector<double> w;              // n*n, symmetric, 0 where no edge
    std::vector<std::uint64_t> nbr;     // adjacency masks

    explicit DenseModel(const IsingModel& m) : n(m.graph.n) {
        theta = m.thresholds;
        w.assign(std::size_t(n) * n, 0.0);
        nbr.assign(n, 0);
        for (std::size_t e = 0; e < m.graph.edges.size(); ++e) {
            auto [i, j] = m.graph.edges[e];
            w[std::size_t(i) * n + j] = m.edge_weights[e];
            w[std::size_t(j) * n + i] = m.edge_weights[e];
            nbr[i] |= std::uint64_t(1) << j;
            nbr[j] |= std::uint64_t(1) << i;
        }
    }

    double log_weight_mask(std::uint64_t x) const {
        double lw = 0.0;
        std::uint64_t rem = x;
        while (rem) {
            int i = std::countr_zero(rem);
            rem &= rem - 1;
            lw += theta[i];
            // edges counted once: partner index below i
            std::uint64_t lower = x & nbr[i] & ((std::uint64_t(1) << i) - 1);
            while (lower) {
                int j = std::countr_zero(lower);
                lower &= lower - 1;
                lw += w[std::size_t(i) * n + j];
            }
        }
        return lw;
    }
};

// Sums exp(log weight) over all configurations that agree with the clamped
// bits, i.e. over the 2^|free| completions. The index range is cut into
// fixed blocks summed independently and merged in block order, so the
// result is bit-identical for every thread count.
inline LogSumExp enumerate_clamped(const DenseModel& dm, const std::vector<int>& free_nodes,
                                   std::uint64_t clamp_bits, int threads) {
    const int f = int(free_nodes.size());
    const std::uint64_t total = std::uint64_t(1) << f;
    constexpr int kBlockBits = 16;
    const std::uint64_t block = std::uint64_t(1) << kBlockBits;
    const std::uint64_t nblocks = (total + block - 1) / block;

    auto sum_block = [&](std::uint64_t begin, std::uint64_t end) {
        LogSumExp acc;
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            std::uint64_t x = clamp_bits;
            std::uint64_t rem = idx;
            while (rem) {
                int b = std::countr_zero(rem);
                rem &= rem - 1;
                x |= std::uint64_t(1) << free_nodes[b];
            }
            acc.add(dm.log_weight_mask(x));
        }
        return acc;
    };

    std::vector<LogSumExp> parts(nblocks);
    if (threads <= 1 || nblocks == 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b)
            parts[b] = sum_block(b * block, std::min(total, (b + 1) * block));
    } else {
        std::atomic<std::uint64_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::uint64_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                parts[b] = sum_block(b * block, std::min(total, (b + 1) * block));
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    LogSumExp acc;
    for (const auto& p : parts) acc.merge(p);
    return acc;
}

inline void check_cap(int free_count, int cap, const char* what) {
    if (free_count > cap)
        throw cap_exceeded(std::string(what) + ": " + std::to_string(free_count) +
                           " free nodes exceed enumeration cap " + std::to_string(cap));
    if (free_count > 62)
        throw cap_exceeded(std::string(what) + ": enumeration beyond 62 nodes is unsupported");
}

}  // namespace detail

// Brute-force log Z over {0,1}^n. Cost 2^n; refuses above the cap rather
// than silently approximating.
inline PartitionEstimate exact_partition(const IsingModel& m, int cap = kDefaultEnumerationCap,
                                         int threads = 1) {
    detail::check_cap(m.graph.n, cap, "exact_partition");
    detail::DenseModel dm(m);
    std::vector<int> free_nodes(m.graph.n);
    for (int i = 0; i < m.graph.n; ++i) free_nodes[i] = i;
    return {detail::enumerate_clamped(dm, free_nodes, 0, threads).log(), Method::exact};
}

// True conditional normalizer: sum over {0,1}^{V \ A} with x_A fixed at the
// intervention values (terms involving A enter as constants).
inline PartitionEstimate exact_conditional_partition(const IsingModel& m,
                                                     const InterventionSpec& iv,
                                                     int cap = kDefaultEnumerationCap,
                                                     int threads = 1) {
    if (m.graph.n > 62)
        throw cap_exceeded("exact_conditional_partition: models beyond 62 nodes are unsupported");
    std::uint64_t clamp_bits = 0;
    std::vector<int> free_nodes;
    for (const auto& [node, value] : iv.assignments) {
        if (node < 0 || node >= m.graph.n)
            throw std::invalid_argument("intervention node out of range");
        if (value) clamp_bits |= std::uint64_t(1) << node;
    }
    for (int i = 0; i < m.graph.n; ++i)
        if (!iv.contains(i)) free_nodes.push_back(i);
    detail::check_cap(int(free_nodes.size()), cap, "exact_conditional_partition");
    detail::DenseModel dm(m);
    return {detail::enumerate_clamped(dm, free_nodes, clamp_bits, threads).log(), Method::exact};
}

// --- closed-form approximations ---------------------------------------------

// Interactions dropped entirely: Z = prod_i (1 + exp(theta_i)).
// A lower bound whenever all edge weights are nonnegative.
inline PartitionEstimate inner_approximation(const IsingModel& m) {
    double lz = 0.0;
    for (double t : m.thresholds) lz += log1p_exp(t);
    return {lz, Method::inner};
}

// Tree-style product over edges, Z_ij = 1 + e^{ti} + e^{tj} + e^{ti+tj+tij},
// taken verbatim: node terms are double-counted at shared nodes, so this is
// exact only for node-disjoint edges.
inline PartitionEstimate pairwise_product(const IsingModel& m) {
    double lz = 0.0;
    for (std::size_t e = 0; e < m.graph.edges.size(); ++e) {
        auto [i, j] = m.graph.edges[e];
        LogSumExp z;
        z.add(0.0);
        z.add(m.thresholds[i]);
        z.add(m.thresholds[j]);
        z.add(m.thresholds[i] + m.thresholds[j] + m.edge_weights[e]);
        lz += z.log();
    }
    return {lz, Method::pairwise};
}

// --- Curie-Weiss per-clique scheme ------------------------------------------

// Reduced parameters of one clique after conditioning: k free nodes with a
// common threshold theta0 and common interaction theta1, nu neighbours each.
struct CurieWeissParams {
    int k = 0;
    double nu = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
};

// Z = sum_{r=0}^{k} C(k,r) exp(theta0 r + nu theta1 r(r-1) / (2(k-1))).
// O(k) instead of O(2^k); the r(r-1) term is defined as 0 for k <= 1, so the
// 1/(k-1) singularity never arises.
inline PartitionEstimate curie_weiss_partition(const CurieWeissParams& p) {
    if (p.k < 0) throw std::invalid_argument("curie_weiss_partition: negative clique size");
    LogSumExp z;
    for (int r = 0; r <= p.k; ++r) {
        double term = log_binomial(p.k, r) + p.theta0 * r;
        if (p.k > 1) term += p.nu * p.theta1 * double(r) * double(r - 1) / (2.0 * double(p.k - 1));
        z.add(term);
    }
    return {z.log(), Method::curie_weiss};
}

// How the reduced interaction theta1 is averaged. The free-edge average
// reproduces the worked conditional normalizers; the all-edge average keeps
// conditioned edges in the mean and is kept for comparison.
enum class Theta1Mode { free_edges, all_edges };

struct ReducedClique {
    CurieWeissParams params;
    // log of the constant factor contributed by fully conditioned terms
    // (clamped thresholds and edges internal to the conditioned set)
    double log_scale = 0.0;
};

// Reduction of one clique under conditioning: free nodes keep their owned
// thresholds plus absorbed weights from clamped-to-1 neighbours inside the
// clique; theta0/theta1 are the averages of those quantities; nu = k-1.
// Only terms owned by this clique (see CliqueAssignment) enter, so the
// product over all cliques accounts for every parameter exactly once.
inline ReducedClique reduce_clique(const IsingModel& m, const std::vector<NodeId>& clique,
                                   int clique_index, const CliqueAssignment& assignment,
                                   const InterventionSpec& iv,
                                   Theta1Mode mode = Theta1Mode::free_edges) {
    std::vector<NodeId> free_nodes, clamped;
    for (NodeId v : clique)
        (iv.contains(v) ? clamped : free_nodes).push_back(v);
    const int k = int(free_nodes.size());

    auto owned_edge = [&](NodeId a, NodeId b) {
        int e = m.graph.edge_index(a, b);
        return (e >= 0 && assignment.edge_owner[e] == clique_index) ? e : -1;
    };

    ReducedClique out;
    out.params.k = k;
    out.params.nu = k > 0 ? double(k - 1) : 0.0;

    // constant from the conditioned part of the clique
    for (std::size_t a = 0; a < clamped.size(); ++a) {
        NodeId v = clamped[a];
        if (assignment.node_owner[v] == clique_index && iv.value_of(v) == 1)
            out.log_scale += m.thresholds[v];
        for (std::size_t b = a + 1; b < clamped.size(); ++b) {
            int e = owned_edge(v, clamped[b]);
            if (e >= 0 && iv.value_of(v) == 1 && iv.value_of(clamped[b]) == 1)
                out.log_scale += m.edge_weights[e];
        }
    }
    if (k == 0) return out;

    // effective threshold per free node: owned threshold + absorbed weights
    double t_sum = 0.0;
    for (NodeId i : free_nodes) {
        double t = assignment.node_owner[i] == clique_index ? m.thresholds[i] : 0.0;
        for (NodeId j : clamped) {
            int e = owned_edge(i, j);
            if (e >= 0 && iv.value_of(j) == 1) t += m.edge_weights[e];
        }
        t_sum += t;
    }
    out.params.theta0 = t_sum / k;

    if (mode == Theta1Mode::free_edges) {
        if (k >= 2) {
            double w_sum = 0.0;
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b) {
                    int e = owned_edge(free_nodes[a], free_nodes[b]);
                    if (e >= 0) w_sum += m.edge_weights[e];
                }
            out.params.theta1 = w_sum / (double(k) * (k - 1) / 2.0);
        }
    } else {
        const int kc = int(clique.size());
        if (kc >= 2) {
            double w_sum = 0.0;
            for (int a = 0; a < kc; ++a)
                for (int b = a + 1; b < kc; ++b) {
                    int e = owned_edge(clique[a], clique[b]);
                    if (e >= 0) w_sum += m.edge_weights[e];
                }
            out.params.theta1 = w_sum / (double(kc) * (kc - 1) / 2.0);
        }
    }
    return out;
}

enum class PerCliqueMethod { exact, curie_weiss };

struct CliqueNormalizer {
    int clique_index;
    double log_value;  // conditional normalizer of psi_C, constants included
};

// Per-clique conditional normalizers, either by enumerating the free clique
// nodes or through the Curie-Weiss reduction.
inline std::vector<CliqueNormalizer> clique_normalizers(
    const IsingModel& m, const CliqueSet& cliques, const CliqueAssignment& assignment,
    const InterventionSpec& iv, PerCliqueMethod method, int cap = kDefaultEnumerationCap,
    Theta1Mode mode = Theta1Mode::free_edges) {
    std::vector<CliqueNormalizer> out;
    out.reserve(cliques.cliques.size());
    for (std::size_t c = 0; c < cliques.cliques.size(); ++c) {
        const auto& clique = cliques.cliques[c];
        if (method == PerCliqueMethod::curie_weiss) {
            ReducedClique rc = reduce_clique(m, clique, int(c), assignment, iv, mode);
            out.push_back({int(c), curie_weiss_partition(rc.params).log_value + rc.log_scale});
            continue;
        }
        std::vector<NodeId> free_nodes;
        PartialConfig x;
        for (NodeId v : clique) {
            if (iv.contains(v))
                x[v] = iv.value_of(v);
            else
                free_nodes.push_back(v);
        }
        detail::check_cap(int(free_nodes.size()), cap, "clique_normalizers");
        LogSumExp z;
        for (std::uint64_t sub = 0; sub < (std::uint64_t(1) << free_nodes.size()); ++sub) {
            for (std::size_t b = 0; b < free_nodes.size(); ++b)
                x[free_nodes[b]] = int((sub >> b) & 1);
            z.add(clique_log_weight(m, clique, int(c), assignment, x));
        }
        out.push_back({int(c), z.log()});
    }
    return out;
}

// Product of per-clique conditional normalizers. This treats cliques as
// independent even when they share free nodes, so it is NOT in general the
// true conditional normalizer; exact_conditional_partition is.
inline PartitionEstimate clique_product_partition(const IsingModel& m, const CliqueSet& cliques,
                                                  const CliqueAssignment& assignment,
                                                  const InterventionSpec& iv,
                                                  PerCliqueMethod method,
                                                  int cap = kDefaultEnumerationCap,
                                                  Theta1Mode mode = Theta1Mode::free_edges) {
    double lz = 0.0;
    for (const auto& cn : clique_normalizers(m, cliques, assignment, iv, method, cap, mode))
        lz += cn.log_value;
    return {lz, Method::clique_product};
}

}  // namespace isinglab
