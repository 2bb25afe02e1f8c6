#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rankshift/ingest.hpp"
#include "rankshift/synth.hpp"

using namespace rankshift;

namespace {

std::set<std::pair<NodeIndex, NodeIndex>> pairs(const TemporalLayer& l) {
    std::set<std::pair<NodeIndex, NodeIndex>> out;
    for (const auto& e : l.edges()) {
        out.insert({e.src, e.dst});
    }
    return out;
}

std::vector<Edge> edges_of(const TemporalLayer& l) { return {l.edges().begin(), l.edges().end()}; }

SynthProfile small_profile() {
    SynthProfile p;
    p.nodes = 60;
    p.months = 3;
    p.countries = 10;
    return p;
}

}  // namespace

TEST_CASE("preferential attachment edge counts") {
    const auto l = barabasi_albert(10, 2, 1);
    CHECK(l.node_count() == 10);
    CHECK(l.edge_count() == 2 * 8 + 1);  // growth edges plus the seed clique
    for (const auto& e : l.edges()) {
        CHECK(e.src > e.dst);  // every edge points to an older node
        CHECK(e.weight == 1.0);
    }
    const auto clique = barabasi_albert(4, 3, 1);
    CHECK(clique.edge_count() == 3 * 1 + 3);
    CHECK(barabasi_albert(5000, 5, 1).edge_count() == 5 * 4995 + 10);
    CHECK_THROWS_AS(barabasi_albert(3, 3, 1), ArgumentError);
    CHECK_THROWS_AS(barabasi_albert(10, 0, 1), ArgumentError);
}

TEST_CASE("preferential attachment is deterministic and heavy-tailed") {
    const auto a = barabasi_albert(300, 3, 9);
    const auto b = barabasi_albert(300, 3, 9);
    const auto c = barabasi_albert(300, 3, 10);
    CHECK(edges_of(a) == edges_of(b));
    CHECK(edges_of(a) != edges_of(c));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto l = barabasi_albert(5000, 5, seed);
        std::size_t max_in = 0;
        for (NodeIndex i = 0; i < l.node_count(); ++i) {
            max_in = std::max(max_in, l.in_degree(i));
        }
        CHECK(max_in > 20 * 5);
    }
}

TEST_CASE("reshuffling rewires exactly the requested share") {
    const auto l = barabasi_albert(500, 4, 3);
    const auto m = l.edge_count();
    for (double f : {0.1, 0.37, 1.0}) {
        const auto r = reshuffle_edges(l, f, 5);
        CHECK(r.edge_count() == m);
        CHECK(r.label() == l.label());
        const auto before = pairs(l);
        const auto after = pairs(r);
        std::size_t kept = 0;
        for (const auto& p : after) {
            kept += before.count(p);
            CHECK(p.first != p.second);
        }
        CHECK(m - kept == static_cast<std::size_t>(std::floor(f * static_cast<double>(m))));
    }
    CHECK(edges_of(reshuffle_edges(l, 0.2, 8, "T1")) == edges_of(reshuffle_edges(l, 0.2, 8, "T1")));
    CHECK(reshuffle_edges(l, 0.2, 8, "T1").label() == "T1");
    CHECK_THROWS_AS(reshuffle_edges(l, 0.0, 8), ArgumentError);
    CHECK_THROWS_AS(reshuffle_edges(l, 1.5, 8), ArgumentError);
}

TEST_CASE("transactions without injections") {
    auto p = small_profile();
    const auto d = synth_transactions(p, 4);
    CHECK(d.truth.empty());
    CHECK(d.node_ids.size() == 60);
    CHECK(d.intended.size() == 3);
    CHECK_FALSE(d.transactions.empty());
    std::ostringstream gt;
    write_ground_truth(gt, d.truth);
    CHECK(gt.str() == "node_id,month,anomaly_kind\n");
}

TEST_CASE("injections are recorded and visible in the intended volumes") {
    auto p = small_profile();
    const auto base = synth_transactions(p, 4);
    p.injections = {{7, 2, AnomalyKind::VolumeSpike, 25.0}, {11, 2, AnomalyKind::CounterpartyShift, 25.0}};
    const auto d = synth_transactions(p, 4);
    REQUIRE(d.truth.size() == 2);
    CHECK(d.truth[0].node_id == d.node_ids[7]);
    CHECK(d.truth[0].month == "2022-03");
    CHECK(d.truth[0].kind == AnomalyKind::VolumeSpike);
    CHECK(d.truth[1].kind == AnomalyKind::CounterpartyShift);

    auto volume = [](const SynthData& s, const std::string& month, const std::string& id) {
        std::int64_t v = 0;
        for (const auto& [pair, cents] : s.intended.at(month)) {
            if (pair.first == id || pair.second == id) {
                v += cents;
            }
        }
        return v;
    };
    const auto& spiked = d.node_ids[7];
    CHECK(volume(d, "2022-03", spiked) > 10 * volume(base, "2022-03", spiked));
    CHECK(volume(d, "2022-02", spiked) == volume(base, "2022-02", spiked));

    // After a counterparty shift every outgoing partner of the node is high risk.
    const auto& shifted = d.node_ids[11];
    std::size_t outgoing = 0;
    for (const auto& [pair, cents] : d.intended.at("2022-03")) {
        if (pair.first == shifted && pair.second != shifted) {
            ++outgoing;
            const auto country = pair.second.substr(pair.second.size() - 2);
            CHECK(d.risk.lookup(country) == RiskLevel::High);
        }
    }
    CHECK(outgoing > 0);

    const auto rnd = random_injections(p, 5, 1);
    REQUIRE(rnd.size() == 5);
    std::set<std::size_t> distinct;
    for (std::size_t i = 0; i < rnd.size(); ++i) {
        distinct.insert(rnd[i].node);
        CHECK(rnd[i].month == p.months - 1);
        CHECK(rnd[i].kind == (i % 2 == 0 ? AnomalyKind::VolumeSpike : AnomalyKind::CounterpartyShift));
    }
    CHECK(distinct.size() == 5);
}

TEST_CASE("output is byte-identical per seed") {
    auto p = small_profile();
    p.injections = random_injections(p, 3, 2);
    auto dump = [&](std::uint64_t seed) {
        const auto d = synth_transactions(p, seed);
        std::ostringstream out;
        write_transactions(out, d.transactions);
        write_ground_truth(out, d.truth);
        write_risk_table(out, d.risk);
        return out.str();
    };
    CHECK(dump(5) == dump(5));
    CHECK(dump(5) != dump(6));
}

TEST_CASE("re-ingesting the CSV reproduces the intended BIC layers exactly") {
    auto p = small_profile();
    p.injections = random_injections(p, 4, 3);
    const auto d = synth_transactions(p, 12);
    std::stringstream csv;
    write_transactions(csv, d.transactions);
    const auto parsed = parse_transactions(csv);
    CHECK(parsed.rejections.empty());
    CHECK(parsed.transactions.size() == d.transactions.size());
    const auto layers = aggregate(parsed.transactions, AggregationLevel::BIC);
    REQUIRE(layers.size() == d.intended.size());
    for (const auto& layer : layers) {
        const auto& want = d.intended.at(layer.label());
        CHECK(layer.edge_count() == want.size());
        const auto& nodes = *layer.nodes();
        for (const auto& e : layer.edges()) {
            const auto it = want.find({nodes.id(e.src), nodes.id(e.dst)});
            REQUIRE(it != want.end());
            CHECK(std::llround(e.weight * 100.0) == it->second);
        }
    }
    std::stringstream risk;
    write_risk_table(risk, d.risk);
    const auto back = load_risk_table(risk);
    CHECK(back.entries() == d.risk.entries());
    CHECK(back.default_level() == d.risk.default_level());
}
