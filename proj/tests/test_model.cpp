#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isinglab/model.hpp"
#include "isinglab/partition.hpp"
#include "isinglab/rng.hpp"

using namespace isinglab;
using Catch::Approx;

namespace {

IsingModel five_node_model(double w = 1.0) {
    Graph g = build_graph(5, {{0, 4}, {0, 1}, {1, 2}, {1, 3}, {2, 3}});
    return make_model(g, std::vector<double>(5, 0.0), std::vector<double>(g.edges.size(), w));
}

IsingModel random_model(SplitMix64& rng, int n, double p) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_unit() < p) edges.emplace_back(i, j);
    Graph g = build_graph(n, edges);
    std::vector<double> th(n), w(g.edges.size());
    for (auto& t : th) t = rng.next_symmetric(2.0);
    for (auto& x : w) x = rng.next_symmetric(2.0);
    return make_model(std::move(g), std::move(th), std::move(w));
}

}  // namespace

TEST_CASE("log_weight basics") {
    IsingModel m = five_node_model();
    REQUIRE(log_weight(m, Configuration(5)) == 0.0);
    REQUIRE(log_weight(m, Configuration::from_word(0b11111, 5)) == Approx(5.0));

    IsingModel single = make_model(build_graph(1, {}), {1.7}, {});
    REQUIRE(log_weight(single, Configuration::from_word(1, 1)) == Approx(1.7));

    REQUIRE_THROWS_AS(log_weight(m, Configuration(4)), std::invalid_argument);
}

TEST_CASE("configuration encoding") {
    Configuration c = Configuration::from_bits({1, 0, 1});
    REQUIRE(c.size() == 3);
    REQUIRE(c.bit(0));
    REQUIRE_FALSE(c.bit(1));
    REQUIRE(c.bit(2));
    c.set(1, true);
    c.set(0, false);
    REQUIRE_FALSE(c.bit(0));
    REQUIRE(c.bit(1));

    REQUIRE_THROWS_AS(Configuration::from_word(0b100, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(Configuration::from_bits({0, 2}), std::invalid_argument);

    Configuration wide(100);  // multi-word
    wide.set(99, true);
    REQUIRE(wide.bit(99));
    REQUIRE_FALSE(wide.bit(63));
}

TEST_CASE("clique log weight on the five-node example") {
    IsingModel m = five_node_model();
    CliqueSet cs = maximal_cliques(m.graph);
    CliqueAssignment a = make_assignment(m.graph, cs);
    REQUIRE(cs.cliques == std::vector<std::vector<NodeId>>{{0, 1}, {0, 4}, {1, 2, 3}});

    PartialConfig ones{{1, 1}, {2, 1}, {3, 1}};
    REQUIRE(clique_log_weight(m, cs.cliques[2], 2, a, ones) == Approx(3.0));

    PartialConfig zeros{{1, 0}, {2, 0}, {3, 0}};
    REQUIRE(clique_log_weight(m, cs.cliques[2], 2, a, zeros) == 0.0);

    PartialConfig pair{{0, 1}, {1, 1}};
    REQUIRE(clique_log_weight(m, cs.cliques[0], 0, a, pair) == Approx(1.0));

    PartialConfig missing{{1, 1}, {2, 1}};
    REQUIRE_THROWS_AS(clique_log_weight(m, cs.cliques[2], 2, a, missing),
                      std::invalid_argument);
}

TEST_CASE("clique factors sum to the full log weight on every graph") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + int(rng.next_below(8));
        IsingModel m = random_model(rng, n, 0.5);
        CliqueSet cs = maximal_cliques(m.graph);
        CliqueAssignment a = make_assignment(m.graph, cs);
        for (std::uint64_t word = 0; word < (std::uint64_t(1) << n); ++word) {
            Configuration x = Configuration::from_word(word, n);
            PartialConfig full;
            for (int i = 0; i < n; ++i) full[i] = x.bit(i) ? 1 : 0;
            double sum = 0.0;
            for (std::size_t c = 0; c < cs.cliques.size(); ++c)
                sum += clique_log_weight(m, cs.cliques[c], int(c), a, full);
            REQUIRE(sum == Approx(log_weight(m, x)).margin(1e-12));
        }
    }

    // two triangles sharing an edge: the shared edge must be counted once
    IsingModel shared = make_model(build_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}}),
                                   {0.5, -0.25, 1.0, 2.0}, {1, 1, 1, 1, 1});
    CliqueSet cs = maximal_cliques(shared.graph);
    REQUIRE(cs.cliques.size() == 2);
    CliqueAssignment a = make_assignment(shared.graph, cs);
    PartialConfig all_on{{0, 1}, {1, 1}, {2, 1}, {3, 1}};
    double sum = 0.0;
    for (std::size_t c = 0; c < cs.cliques.size(); ++c)
        sum += clique_log_weight(shared, cs.cliques[c], int(c), a, all_on);
    REQUIRE(sum == Approx(log_weight(shared, Configuration::from_word(0b1111, 4))));
}

TEST_CASE("log weight is monotone in an edge weight exactly when both ends are on") {
    SplitMix64 rng(13);
    IsingModel m = random_model(rng, 6, 0.6);
    if (m.graph.edges.empty()) return;
    for (std::uint64_t word = 0; word < 64; ++word) {
        Configuration x = Configuration::from_word(word, 6);
        IsingModel bumped = m;
        bumped.edge_weights[0] += 0.75;
        auto [i, j] = m.graph.edges[0];
        double before = log_weight(m, x), after = log_weight(bumped, x);
        if (x.bit(i) && x.bit(j))
            REQUIRE(after == Approx(before + 0.75));
        else
            REQUIRE(after == before);
    }
}

TEST_CASE("probability normalizes against the exact partition value") {
    IsingModel single = make_model(build_graph(1, {}), {0.0}, {});
    REQUIRE(probability(single, Configuration::from_word(1, 1), 2.0) == Approx(0.5));

    IsingModel edge = make_model(build_graph(2, {{0, 1}}), {0.0, 0.0}, {1.0});
    double z = 3.0 + std::exp(1.0);
    REQUIRE(probability(edge, Configuration::from_word(0b11, 2), z) ==
            Approx(std::exp(1.0) / z));

    REQUIRE_THROWS_AS(probability(edge, Configuration(2), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(probability(edge, Configuration(2), -1.0), std::invalid_argument);

    SplitMix64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + int(rng.next_below(8));
        IsingModel m = random_model(rng, n, 0.4);
        double zx = exact_partition(m).value();
        double total = 0.0;
        for (std::uint64_t w = 0; w < (std::uint64_t(1) << n); ++w)
            total += probability(m, Configuration::from_word(w, n), zx);
        REQUIRE(total == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("model JSON round trip") {
    std::string text = R"({
        "n": 3,
        "thresholds": [0.5, 0.0, -1.0],
        "edges": [{"i": 0, "j": 1, "w": 1.5}, {"i": 2, "j": 1, "w": -0.5}]
    })";
    IsingModel m = parse_model(text);
    REQUIRE(m.graph.n == 3);
    REQUIRE(m.thresholds == std::vector<double>{0.5, 0.0, -1.0});
    REQUIRE(m.weight(1, 2) == Approx(-0.5));
    REQUIRE(m.weight(0, 1) == Approx(1.5));

    IsingModel again = parse_model(write_model(m));
    REQUIRE(again.graph.edges == m.graph.edges);
    REQUIRE(again.thresholds == m.thresholds);
    REQUIRE(again.edge_weights == m.edge_weights);
}

TEST_CASE("model JSON defaults and errors") {
    IsingModel no_thresholds = parse_model(R"({"n": 2, "edges": [{"i":0,"j":1,"w":2.0}]})");
    REQUIRE(no_thresholds.thresholds == std::vector<double>{0.0, 0.0});

    REQUIRE_THROWS_AS(parse_model("not json"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"edges": []})"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"n": 0})"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"n": 2, "thresholds": [1.0]})"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"n": 2, "edges": [{"i":0,"j":0,"w":1}]})"),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"n": 2, "edges": [{"i":0,"j":2,"w":1}]})"),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        parse_model(R"({"n": 2, "edges": [{"i":0,"j":1,"w":1},{"i":1,"j":0,"w":2}]})"),
        std::invalid_argument);
    REQUIRE_THROWS_AS(parse_model(R"({"n": 2, "edges": [{"i":0,"w":1}]})"),
                      std::invalid_argument);
}
