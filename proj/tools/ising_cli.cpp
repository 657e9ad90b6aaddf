// Command-line front end: model I/O, partition computation, intervention
// queries, intervention ranking, and the approximation-error study.
//
// Exit codes: 0 success, 2 input error, 3 enumeration cap exceeded,
// 4 output I/O error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isinglab/intervention.hpp"
#include "isinglab/model.hpp"
#include "isinglab/partition.hpp"
#include "isinglab/simulation.hpp"

namespace {

using namespace isinglab;

struct output_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

IsingModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

// grid syntax a[:b[:step]], ends inclusive when step divides the range
template <typename T>
std::vector<T> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("bad grid component '" + item + "' in '" + text + "'");
        }
    }
    if (parts.empty() || parts.size() > 3)
        throw std::invalid_argument("grid must be a, a:b or a:b:step");
    double a = parts[0];
    double b = parts.size() > 1 ? parts[1] : a;
    double step = parts.size() > 2 ? parts[2] : 1.0;
    if (step <= 0) throw std::invalid_argument("grid step must be positive");
    if (b < a) throw std::invalid_argument("grid end below start");
    std::vector<T> out;
    for (double v = a; v <= b + 1e-9 * step; v += step) out.push_back(T(v));
    return out;
}

std::string result_line(const std::string& tag, double log_z) {
    return "method=" + tag + " logZ=" + format_double(log_z) + " Z=" + format_double(std::exp(log_z));
}

std::string clique_label(const std::vector<NodeId>& clique) {
    std::string s;
    for (NodeId v : clique) {
        if (!s.empty()) s += ',';
        s += std::to_string(v);
    }
    return s;
}

void print_marginals(const MarginalTable& table) {
    for (const auto& [node, p] : table.p_one)
        std::cout << "marginal node=" << node << " p=" << format_double(p) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"intervention analysis for binary Ising models"};
    app.require_subcommand(1);

    std::string model_path, set_text, out_path, summary_path;
    std::string method = "exact", metric = "l1";
    std::string k_grid = "10:100:10", sigma_grid = "1:10:1";
    int cap = kDefaultEnumerationCap, threads = 1, value = 1, reps = 100;
    std::uint64_t seed = 1;
    double theta0 = 0.0, theta1 = 0.5, nu = 2.0;
    bool want_marginals = false;

    auto* c_part = app.add_subcommand("partition", "compute log Z and Z of a model");
    c_part->add_option("model", model_path, "model file (JSON)")->required();
    c_part->add_option("--method", method, "exact|inner|pairwise|curie-weiss")
        ->check(CLI::IsMember({"exact", "inner", "pairwise", "curie-weiss"}));
    c_part->add_option("--cap", cap, "exact enumeration cap (free nodes)");
    c_part->add_option("--threads", threads, "worker threads for enumeration");

    auto* c_int = app.add_subcommand("intervene", "conditional normalizer under do(x_A = x_A*)");
    c_int->add_option("model", model_path, "model file (JSON)")->required();
    c_int->add_option("--set", set_text, "intervention, e.g. \"2=1,7=0\" (empty: none)");
    c_int->add_option("--method", method, "exact|cw")->check(CLI::IsMember({"exact", "cw"}));
    c_int->add_flag("--marginals", want_marginals, "also print per-node P(x_i=1)");
    c_int->add_option("--cap", cap, "exact enumeration cap (free nodes)");
    c_int->add_option("--threads", threads, "worker threads for enumeration");

    auto* c_rank = app.add_subcommand("rank", "rank single-node interventions by impact");
    c_rank->add_option("model", model_path, "model file (JSON)")->required();
    c_rank->add_option("--value", value, "intervention value (0 or 1)")
        ->check(CLI::IsMember({0, 1}));
    c_rank->add_option("--metric", metric, "l1|esum")->check(CLI::IsMember({"l1", "esum"}));
    c_rank->add_option("--method", method, "exact|cw")->check(CLI::IsMember({"exact", "cw"}));
    c_rank->add_option("--cap", cap, "exact enumeration cap (free nodes)");
    c_rank->add_option("--threads", threads, "worker threads for enumeration");

    auto* c_sim = app.add_subcommand("simulate", "approximation-error study, CSV output");
    c_sim->add_option("--k-grid", k_grid, "clique sizes a:b:step");
    c_sim->add_option("--sigma-grid", sigma_grid, "noise scales a:b:step");
    c_sim->add_option("--reps", reps, "replications per grid cell");
    c_sim->add_option("--seed", seed, "random seed");
    c_sim->add_option("--theta0", theta0, "threshold mean");
    c_sim->add_option("--theta1", theta1, "interaction mean");
    c_sim->add_option("--nu", nu, "neighbour-count parameter of the comparison");
    c_sim->add_option("--out", out_path, "output CSV path (default: stdout)");
    c_sim->add_option("--summary", summary_path, "also write per-cell mean/sd of diff as CSV");
    c_sim->add_option("--threads", threads, "worker threads over replications");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (c_part->parsed()) {
        IsingModel m = load_model(model_path);
        if (method == "exact") {
            std::cout << result_line(method, exact_partition(m, cap, threads).log_value) << "\n";
        } else if (method == "inner") {
            std::cout << result_line(method, inner_approximation(m).log_value) << "\n";
        } else if (method == "pairwise") {
            std::cout << result_line(method, pairwise_product(m).log_value) << "\n";
        } else {
            CliqueSet cliques = maximal_cliques(m.graph);
            CliqueAssignment assignment = make_assignment(m.graph, cliques);
            auto est = clique_product_partition(m, cliques, assignment, InterventionSpec{},
                                                PerCliqueMethod::curie_weiss, cap);
            std::cout << result_line(method, est.log_value) << "\n";
        }
        return 0;
    }

    if (c_int->parsed()) {
        IsingModel m = load_model(model_path);
        InterventionSpec iv = InterventionSpec::parse(set_text);
        for (const auto& [node, v] : iv.assignments) {
            (void)v;
            if (node >= m.graph.n)
                throw std::invalid_argument("intervention node out of range");
        }
        if (method == "exact") {
            auto est = exact_conditional_partition(m, iv, cap, threads);
            std::cout << result_line(method, est.log_value) << "\n";
            if (want_marginals)
                print_marginals(marginals(m, iv, MarginalMethod::exact, cap));
        } else {
            CliqueSet cliques = maximal_cliques(m.graph);
            CliqueAssignment assignment = make_assignment(m.graph, cliques);
            auto per_clique = clique_normalizers(m, cliques, assignment, iv,
                                                 PerCliqueMethod::curie_weiss, cap);
            double total = 0.0;
            for (const auto& cn : per_clique) {
                total += cn.log_value;
                std::cout << "clique=" << clique_label(cliques.cliques[cn.clique_index])
                          << " logZ=" << format_double(cn.log_value)
                          << " Z=" << format_double(std::exp(cn.log_value)) << "\n";
            }
            std::cout << result_line(method, total) << "\n";
            if (want_marginals)
                print_marginals(
                    marginals(m, iv, MarginalMethod::curie_weiss_clique_product, cap));
        }
        return 0;
    }

    if (c_rank->parsed()) {
        IsingModel m = load_model(model_path);
        ImpactMetric im =
            metric == "l1" ? ImpactMetric::l1_marginal_shift : ImpactMetric::expected_sum_shift;
        MarginalMethod mm = method == "exact" ? MarginalMethod::exact
                                              : MarginalMethod::curie_weiss_clique_product;
        InterventionRanking ranking = rank_interventions(m, value, im, mm, cap, threads);
        int pos = 1;
        for (const auto& e : ranking.entries)
            std::cout << "rank=" << pos++ << " node=" << e.node << " value=" << e.value
                      << " impact=" << format_double(e.impact) << "\n";
        return 0;
    }

    // simulate
    SimulationConfig cfg;
    cfg.clique_sizes = parse_grid<int>(k_grid);
    cfg.sigmas = parse_grid<double>(sigma_grid);
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.theta0 = theta0;
    cfg.theta1 = theta1;
    cfg.nu = nu;
    auto records = error_experiment(cfg, threads);
    if (out_path.empty()) {
        write_error_csv(std::cout, records);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw output_error("cannot open output file: " + out_path);
        write_error_csv(out, records);
        out.flush();
        if (!out) throw output_error("failed writing output file: " + out_path);
    }
    if (!summary_path.empty()) {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw output_error("cannot open summary file: " + summary_path);
        write_summary_csv(out, aggregate_error_records(records));
        out.flush();
        if (!out) throw output_error("failed writing summary file: " + summary_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cap_exceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const output_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
