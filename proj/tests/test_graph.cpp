#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "rankshift/graph.hpp"

using namespace rankshift;

namespace {

bool has_edge(const TemporalLayer& l, const std::string& s, const std::string& d) {
    const auto& n = *l.nodes();
    return l.weight(n.index_of(s), n.index_of(d)) > 0;
}

int ring_of(const Subnetwork& sub, const NodeSet& nodes, const std::string& id) {
    const auto i = nodes.index_of(id);
    for (std::size_t k = 0; k < sub.members.size(); ++k) {
        if (sub.members[k] == i) {
            return sub.ring[k];
        }
    }
    return -1;
}

}  // namespace

TEST_CASE("node ids order numerically when all digits") {
    CHECK(id_less("2", "10"));
    CHECK_FALSE(id_less("10", "2"));
    CHECK(id_less("10", "9a"));  // bytewise once a non-digit appears
    const auto nodes = make_node_set({"10", "2", "1", "2"});
    CHECK(nodes->ids() == std::vector<std::string>{"1", "2", "10"});
    CHECK(nodes->index_of("10") == 2);
    CHECK_FALSE(nodes->find("3"));
    CHECK_THROWS_AS(nodes->index_of("3"), ArgumentError);
}

TEST_CASE("layer construction merges parallel edges and keeps adjacency consistent") {
    const auto l = make_layer("T", {{"a", "b", 1}, {"a", "b", 2}, {"b", "c", 4}, {"c", "a", 1}, {"a", "a", 1}});
    CHECK(l.edge_count() == 4);
    const auto& n = *l.nodes();
    const auto a = n.index_of("a");
    const auto b = n.index_of("b");
    CHECK(l.weight(a, b) == 3.0);
    CHECK(l.weight(b, a) == 0.0);
    CHECK(l.out_degree(a) == 2);  // self-loop kept
    CHECK(l.in_strength(b) == 3.0);
    double out = 0, in = 0;
    for (NodeIndex i = 0; i < n.size(); ++i) {
        out += l.out_strength(i);
        in += l.in_strength(i);
        for (const auto& nb : l.out_neighbors(i)) {
            const auto back = l.in_neighbors(nb.node);
            CHECK(std::any_of(back.begin(), back.end(),
                              [&](const Neighbor& x) { return x.node == i && x.weight == nb.weight; }));
        }
    }
    CHECK(out == l.total_weight());
    CHECK(in == l.total_weight());
    CHECK_THROWS_AS(make_layer("T", {{"a", "b", 0.0}}), ArgumentError);
    CHECK_THROWS_AS(make_layer("T", {{"a", "b", -1.0}}), ArgumentError);
}

TEST_CASE("stats: complete directed triangle") {
    const auto l = make_layer("T", {{"a", "b"}, {"b", "a"}, {"a", "c"}, {"c", "a"}, {"b", "c"}, {"c", "b"}});
    const auto s = layer_stats(l);
    CHECK(s.density == 1.0);
    CHECK(s.diameter == 1);
    CHECK(s.avg_path_length == 1.0);
    CHECK(s.avg_clustering == 1.0);
    CHECK(s.avg_degree == 4.0);
}

TEST_CASE("stats: directed path a->b->c") {
    const auto s = layer_stats(make_layer("T", {{"a", "b"}, {"b", "c"}}));
    CHECK(s.diameter == 2);
    CHECK(s.avg_path_length == doctest::Approx(4.0 / 3.0));
    CHECK(s.density == doctest::Approx(2.0 / 6.0));
    CHECK(s.avg_clustering == 0.0);
}

TEST_CASE("stats: triangle plus an isolated node") {
    const auto s = layer_stats(make_layer("T", {{"a", "b"}, {"b", "c"}, {"c", "a"}}, {"d"}));
    CHECK(s.avg_clustering == doctest::Approx(0.75));
    CHECK(s.nodes == 4);
    CHECK(s.largest_component == 3);
    CHECK(s.density == doctest::Approx(3.0 / 12.0));
    CHECK(s.avg_degree == doctest::Approx(1.5));
    CHECK(s.avg_strength == doctest::Approx(1.5));
}

TEST_CASE("stats need two nodes") {
    CHECK_THROWS_AS(layer_stats(make_layer("T", {}, {"a"})), ArgumentError);
}

TEST_CASE("stats are invariant under relabeling, and diameter >= average path length") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto layers = fixture::random_layers(12, 1, 0.15, 100 + trial);
        const auto& l = layers[0];
        std::vector<std::string> perm(l.node_count());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            perm[i] = "n" + std::to_string(i);
        }
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<NamedEdge> edges;
        for (const auto& e : l.edges()) {
            edges.push_back({perm[e.src], perm[e.dst], e.weight});
        }
        const auto relabeled = make_layer("T", edges, perm);
        const auto a = layer_stats(l);
        const auto b = layer_stats(relabeled, 2);
        CHECK(a.edges == b.edges);
        CHECK(a.density == b.density);
        CHECK(a.avg_clustering == doctest::Approx(b.avg_clustering).epsilon(1e-12));
        CHECK(a.diameter == b.diameter);
        CHECK(a.avg_path_length == doctest::Approx(b.avg_path_length).epsilon(1e-12));
        CHECK(static_cast<double>(a.diameter) >= a.avg_path_length);
    }
}

TEST_CASE("expansion of a chain stops after the second ring") {
    const auto l = make_layer("T", {{"s", "a"}, {"a", "b"}, {"b", "c"}});
    const auto& nodes = *l.nodes();
    const NodeIndex seed = nodes.index_of("s");
    const auto sub = expand_subnetwork(l, std::span<const NodeIndex>(&seed, 1));
    CHECK(sub.members.size() == 3);
    CHECK(ring_of(sub, nodes, "s") == 0);
    CHECK(ring_of(sub, nodes, "a") == 1);
    CHECK(ring_of(sub, nodes, "b") == 2);
    CHECK(ring_of(sub, nodes, "c") == -1);
    CHECK(has_edge(sub.layer, "s", "a"));
    CHECK(has_edge(sub.layer, "a", "b"));
    CHECK_FALSE(has_edge(sub.layer, "b", "c"));
    CHECK(sub.layer.node_count() == l.node_count());
}

TEST_CASE("expansion: isolated seed, internal-only edge, ring-1 and ring-2 edges") {
    const auto l = make_layer("T", {{"x", "y"}, {"s1", "s2"}, {"s1", "a"}, {"b", "s2"}, {"a", "b"}, {"a", "c"},
                                    {"c", "d"}, {"d", "c"}, {"e", "f"}});
    const auto& n = *l.nodes();
    {
        const auto lonely = make_layer("T", {{"p", "q"}}, {"z"});
        const NodeIndex z = lonely.nodes()->index_of("z");
        const auto sub = expand_subnetwork(lonely, std::span<const NodeIndex>(&z, 1));
        CHECK(sub.members.size() == 1);
        CHECK(sub.layer.edge_count() == 0);
    }
    {
        const auto only = make_layer("T", {{"s1", "s2"}, {"p", "q"}});
        const std::vector<NodeIndex> seeds = {only.nodes()->index_of("s1"), only.nodes()->index_of("s2")};
        const auto sub = expand_subnetwork(only, seeds);
        CHECK(sub.layer.edge_count() == 1);
        CHECK(has_edge(sub.layer, "s1", "s2"));
    }
    const std::vector<NodeIndex> seeds = {n.index_of("s1"), n.index_of("s2")};
    const auto sub = expand_subnetwork(l, seeds);
    CHECK(ring_of(sub, n, "a") == 1);
    CHECK(ring_of(sub, n, "b") == 1);
    CHECK(ring_of(sub, n, "c") == 2);
    CHECK(ring_of(sub, n, "d") == -1);
    CHECK(has_edge(sub.layer, "a", "b"));   // among ring-1 nodes
    CHECK(has_edge(sub.layer, "a", "c"));   // ring 1 -> ring 2
    CHECK_FALSE(has_edge(sub.layer, "c", "d"));
    CHECK_THROWS_AS(expand_subnetwork(l, {}), ArgumentError);
}

TEST_CASE("expansion is monotone in the seed set") {
    auto layers = fixture::random_layers(30, 1, 0.04, 9);
    const auto& l = layers[0];
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<NodeIndex> small, big;
        for (NodeIndex i = 0; i < 30; ++i) {
            const auto r = rng() % 10;
            if (r == 0) {
                small.push_back(i);
            }
            if (r <= 1) {
                big.push_back(i);
            }
        }
        if (small.empty()) {
            continue;
        }
        const auto a = expand_subnetwork(l, small);
        const auto b = expand_subnetwork(l, big);
        CHECK(std::includes(b.members.begin(), b.members.end(), a.members.begin(), a.members.end()));
    }
}

TEST_CASE("edge list round trip") {
    const auto layers = fixture::toy_layers();
    std::stringstream ss;
    write_edge_list(ss, layers);
    const std::string text = ss.str();
    CHECK(text.rfind("interval,src,dst,weight\n", 0) == 0);
    const auto back = read_edge_list(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].label() == "T0");
    CHECK(back[1].label() == "T1");
    CHECK(back[0].node_count() == 5);
    for (std::size_t k = 0; k < 2; ++k) {
        REQUIRE(back[k].edge_count() == layers[k].edge_count());
        for (std::size_t e = 0; e < layers[k].edge_count(); ++e) {
            CHECK(back[k].edges()[e] == layers[k].edges()[e]);
        }
    }
    std::istringstream bad("interval,src,dst,weight\nT,a,b,x\n");
    CHECK_THROWS_AS(read_edge_list(bad), InputError);
}
