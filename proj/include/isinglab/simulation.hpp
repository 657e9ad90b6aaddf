#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "isinglab/numeric.hpp"
#include "isinglab/partition.hpp"
#include "isinglab/rng.hpp"

namespace isinglab {

// Grid study of the clique normalizer approximation: per replication the
// clique parameters are sampled around (theta0, theta1), and the Curie-Weiss
// normalizer at the sampled averages is compared against a reference.
struct SimulationConfig {
    std::vector<int> clique_sizes = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<double> sigmas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int reps = 100;
    double theta0 = 0.0;
    double theta1 = 0.5;
    // Neighbour-count parameter of the Curie-Weiss family used by the study.
    // Must stay bounded in k for the error to shrink with clique size; the
    // interaction noise enters the exponent as nu * O(k^{-1/2}).
    double nu = 2.0;
    double delta = 0.05;
    std::uint64_t seed = 1;

    void validate() const {
        if (reps < 1) throw std::invalid_argument("reps must be >= 1");
        for (int k : clique_sizes)
            if (k < 2) throw std::invalid_argument("clique sizes must be >= 2");
        for (double s : sigmas)
            if (!(s >= 0.0)) throw std::invalid_argument("sigmas must be >= 0");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    }
};

struct ErrorRecord {
    int k = 0;
    double sigma = 0.0;
    int rep = 0;
    double zbar_log = 0.0;    // log of the approximate normalizer
    double z_log = 0.0;       // log of the reference normalizer
    double diff = 0.0;        // zbar - z, +-inf when not representable
    double ratio = 1.0;       // zbar / z
    double theta0_bar = 0.0;  // sampled threshold average
    double theta1_bar = 0.0;  // sampled interaction average

    double zbar() const { return std::exp(zbar_log); }
    double z() const { return std::exp(z_log); }
};

// Thresholds ~ N(theta0, (sigma/k)^2), one per node; interactions
// ~ N(theta1, (sigma/sqrt(k))^2), one per unordered pair.
struct SampledCliqueParams {
    std::vector<double> thresholds;  // k values
    std::vector<double> weights;     // k(k-1)/2 values, (i,j) with i<j row-major
};

inline SampledCliqueParams sample_clique_params(int k, double sigma, double theta0, double theta1,
                                                SplitMix64& rng) {
    if (k < 2) throw std::invalid_argument("sample_clique_params needs k >= 2");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    SampledCliqueParams out;
    out.thresholds.reserve(k);
    out.weights.reserve(std::size_t(k) * (k - 1) / 2);
    const double sd_t = sigma / double(k);
    const double sd_w = sigma / std::sqrt(double(k));
    for (int i = 0; i < k; ++i) out.thresholds.push_back(rng.next_gaussian(theta0, sd_t));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) out.weights.push_back(rng.next_gaussian(theta1, sd_w));
    return out;
}

namespace detail {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

// zbar - z from the log values, without leaving the log domain until the
// last step; returns +-inf when the true difference exceeds double range.
inline double signed_diff(double zbar_log, double z_log) {
    const double d = zbar_log - z_log;
    if (d == 0.0) return 0.0;
    const double log_abs = z_log + std::log(std::abs(std::expm1(d)));
    return d > 0 ? std::exp(log_abs) : -std::exp(log_abs);
}

}  // namespace detail

// One record per (clique size, sigma, rep): Z_bar uses the sampled averages,
// Z the true means, both through the same Curie-Weiss normalizer with the
// configured nu. Records are ordered by (k, sigma, rep) and each replication
// draws from its own substream, so results are reproducible bit for bit
// under any thread count.
inline std::vector<ErrorRecord> error_experiment(const SimulationConfig& cfg, int threads = 1) {
    cfg.validate();
    const std::size_t nk = cfg.clique_sizes.size();
    const std::size_t ns = cfg.sigmas.size();
    std::vector<ErrorRecord> records(nk * ns * std::size_t(cfg.reps));

    std::vector<double> z_log_ref(nk);
    for (std::size_t ki = 0; ki < nk; ++ki)
        z_log_ref[ki] = curie_weiss_partition(
                            {cfg.clique_sizes[ki], cfg.nu, cfg.theta0, cfg.theta1})
                            .log_value;

    detail::parallel_for(records.size(), threads, [&](std::uint64_t idx) {
        const std::size_t rep = idx % cfg.reps;
        const std::size_t si = (idx / cfg.reps) % ns;
        const std::size_t ki = idx / (cfg.reps * ns);
        const int k = cfg.clique_sizes[ki];
        SplitMix64 rng = substream(cfg.seed, ki, si, rep);
        SampledCliqueParams p =
            sample_clique_params(k, cfg.sigmas[si], cfg.theta0, cfg.theta1, rng);

        ErrorRecord r;
        r.k = k;
        r.sigma = cfg.sigmas[si];
        r.rep = int(rep);
        r.theta0_bar = detail::mean(p.thresholds);
        r.theta1_bar = detail::mean(p.weights);
        r.zbar_log = curie_weiss_partition({k, cfg.nu, r.theta0_bar, r.theta1_bar}).log_value;
        r.z_log = z_log_ref[ki];
        r.ratio = std::exp(r.zbar_log - r.z_log);
        r.diff = detail::signed_diff(r.zbar_log, r.z_log);
        records[idx] = r;
    });
    return records;
}

// Same sampling, but the reference Z is the exact partition value of the
// heterogeneous sampled clique (complete graph, individual parameters), so
// the records measure the genuine approximation error. Exponential in k,
// hence restricted to small cliques.
inline std::vector<ErrorRecord> small_k_exact_comparison(const SimulationConfig& cfg,
                                                         int threads = 1) {
    cfg.validate();
    for (int k : cfg.clique_sizes)
        if (k > 18) throw cap_exceeded("small_k_exact_comparison: clique size beyond 18");

    const std::size_t nk = cfg.clique_sizes.size();
    const std::size_t ns = cfg.sigmas.size();
    std::vector<ErrorRecord> records(nk * ns * std::size_t(cfg.reps));

    detail::parallel_for(records.size(), threads, [&](std::uint64_t idx) {
        const std::size_t rep = idx % cfg.reps;
        const std::size_t si = (idx / cfg.reps) % ns;
        const std::size_t ki = idx / (cfg.reps * ns);
        const int k = cfg.clique_sizes[ki];
        SplitMix64 rng = substream(cfg.seed, ki, si, rep);
        SampledCliqueParams p =
            sample_clique_params(k, cfg.sigmas[si], cfg.theta0, cfg.theta1, rng);

        // heterogeneous complete-graph model from the sampled parameters
        std::vector<std::pair<NodeId, NodeId>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        IsingModel clique = make_model(build_graph(k, pairs), p.thresholds, p.weights);

        ErrorRecord r;
        r.k = k;
        r.sigma = cfg.sigmas[si];
        r.rep = int(rep);
        r.theta0_bar = detail::mean(p.thresholds);
        r.theta1_bar = detail::mean(p.weights);
        // the clique is complete, so the within-clique reduction has nu = k-1
        r.zbar_log =
            curie_weiss_partition({k, double(k - 1), r.theta0_bar, r.theta1_bar}).log_value;
        r.z_log = exact_partition(clique, 18).log_value;
        r.ratio = std::exp(r.zbar_log - r.z_log);
        r.diff = detail::signed_diff(r.zbar_log, r.z_log);
        records[idx] = r;
    });
    return records;
}

// --- concentration check -----------------------------------------------------

struct HoeffdingReport {
    double t_bound = 0.0;
    double empirical_violation_rate = 0.0;
    double delta = 0.0;
    int n_reps = 0;

    // Monte Carlo slack on top of delta: 3 standard errors of a Bernoulli
    // rate estimated from n_reps draws.
    double slack() const { return 3.0 * std::sqrt(delta * (1.0 - delta) / double(n_reps)); }
    bool passes() const { return empirical_violation_rate <= delta + slack(); }
};

// Empirical coverage of the interaction-average deviation bound
//   t = sigma * sqrt( log(2/delta) / (2 k^2 (k-1)) ).
inline HoeffdingReport hoeffding_check(int k, double sigma, double delta, int reps,
                                       std::uint64_t seed, double theta1 = 0.0,
                                       int threads = 1) {
    if (reps < 100) throw std::invalid_argument("hoeffding_check needs reps >= 100");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    HoeffdingReport report;
    report.delta = delta;
    report.n_reps = reps;
    report.t_bound =
        sigma * std::sqrt(std::log(2.0 / delta) / (2.0 * double(k) * k * double(k - 1)));

    std::vector<char> violated(reps, 0);
    detail::parallel_for(std::uint64_t(reps), threads, [&](std::uint64_t rep) {
        SplitMix64 rng = substream(seed, 0, 0, rep);
        SampledCliqueParams p = sample_clique_params(k, sigma, 0.0, theta1, rng);
        double bar = detail::mean(p.weights);
        violated[rep] = std::abs(bar - theta1) > report.t_bound ? 1 : 0;
    });
    int count = 0;
    for (char v : violated) count += v;
    report.empirical_violation_rate = double(count) / double(reps);
    return report;
}

// --- aggregation and CSV output -----------------------------------------------

// per-cell summary of the signed error, the plotting-ready view of a run
struct ErrorCell {
    int k = 0;
    double sigma = 0.0;
    int reps = 0;
    double mean_diff = 0.0;
    double sd_diff = 0.0;
};

inline std::vector<ErrorCell> aggregate_error_records(const std::vector<ErrorRecord>& records) {
    std::vector<ErrorCell> cells;
    for (const auto& r : records) {
        if (cells.empty() || cells.back().k != r.k || cells.back().sigma != r.sigma) {
            cells.push_back({r.k, r.sigma, 0, 0.0, 0.0});
        }
        cells.back().reps += 1;
        cells.back().mean_diff += r.diff;  // summed here, divided below
    }
    std::size_t start = 0;
    for (auto& cell : cells) {
        cell.mean_diff /= double(cell.reps);
        double var = 0.0;
        for (int i = 0; i < cell.reps; ++i) {
            double d = records[start + i].diff - cell.mean_diff;
            var += d * d;
        }
        cell.sd_diff = cell.reps > 1 ? std::sqrt(var / double(cell.reps - 1)) : 0.0;
        start += cell.reps;
    }
    return cells;
}

inline void write_summary_csv(std::ostream& out, const std::vector<ErrorCell>& cells) {
    out << "k,sigma,reps,mean_diff,sd_diff\n";
    for (const auto& c : cells)
        out << c.k << ',' << format_double(c.sigma) << ',' << c.reps << ','
            << format_double(c.mean_diff) << ',' << format_double(c.sd_diff) << "\n";
}

inline const char* error_csv_header() {
    return "k,sigma,rep,zbar_log,z_log,diff,ratio,theta0_bar,theta1_bar";
}

// One line per record, shortest round-trip formatting, '.' decimal separator.
inline void write_error_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
    out << error_csv_header() << "\n";
    for (const auto& r : records) {
        out << r.k << ',' << format_double(r.sigma) << ',' << r.rep << ','
            << format_double(r.zbar_log) << ',' << format_double(r.z_log) << ','
            << format_double(r.diff) << ',' << format_double(r.ratio) << ','
            << format_double(r.theta0_bar) << ',' << format_double(r.theta1_bar) << "\n";
    }
}

}  // namespace isinglab
