#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rankshift/ranking.hpp"

using namespace rankshift;

namespace {

std::vector<double> as_double(const std::vector<std::uint32_t>& v) { return {v.begin(), v.end()}; }

Ranking from(std::vector<std::uint32_t> positions) { return ranking_from_positions(positions); }

}  // namespace

TEST_CASE("rank positions on the toy scores") {
    const auto r = rank_scores(std::vector<double>{.2, .0, .6, .4, .8});
    CHECK(r.position == std::vector<std::uint32_t>{4, 5, 2, 3, 1});
    CHECK(r.order == std::vector<NodeIndex>{4, 2, 3, 0, 1});
    CHECK(r.ties.empty());
}

TEST_CASE("ties break by node id for positions and average for fractional ranks") {
    const auto all = rank_scores(std::vector<double>{7, 7, 7});
    CHECK(all.position == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(all.fractional == std::vector<double>{2, 2, 2});
    REQUIRE(all.ties.size() == 1);
    CHECK(all.ties[0].first_position == 1);
    CHECK(all.ties[0].size == 3);

    const auto two = rank_scores(std::vector<double>{5, 5, 1});
    CHECK(two.position == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(two.fractional == std::vector<double>{1.5, 1.5, 3});
}

TEST_CASE("rankings are invariant under strictly monotone transforms") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(0, 6);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> s(15), u(15);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = d(rng);
            u[i] = std::exp(0.3 * s[i]) - 4.0;
        }
        const auto a = rank_scores(s);
        const auto b = rank_scores(u);
        CHECK(a.position == b.position);
        CHECK(a.fractional == b.fractional);
        const double total = std::accumulate(a.fractional.begin(), a.fractional.end(), 0.0);
        CHECK(total == 15.0 * 16.0 / 2.0);
        auto p = a.position;
        std::sort(p.begin(), p.end());
        for (std::uint32_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] == i + 1);
        }
    }
}

TEST_CASE("worked correlation examples") {
    const auto x = from({3, 2, 4, 1, 5});
    const auto y = from({2, 3, 4, 1, 5});
    CHECK(*spearman(x, y) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(*kendall(x, y) == doctest::Approx(0.8).epsilon(1e-12));

    // Second pair: both definitions agree on -0.7 and -0.6.
    const auto z = from({2, 3, 4, 5, 1});
    CHECK(*spearman(x, z) == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(*kendall(x, z) == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(oracle::spearman_d2(as_double(x.position), as_double(z.position)) == doctest::Approx(-0.7));

    const auto t0 = from({4, 5, 2, 3, 1});
    const auto t1 = from({4, 3, 2, 5, 1});
    CHECK(*spearman(t0, t1) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(*kendall(t0, t1) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("identity and reversal") {
    std::mt19937_64 rng(2);
    for (std::uint32_t n = 2; n < 30; ++n) {
        std::vector<std::uint32_t> p(n);
        std::iota(p.begin(), p.end(), 1U);
        std::shuffle(p.begin(), p.end(), rng);
        std::vector<std::uint32_t> rev(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            rev[i] = n + 1 - p[i];
        }
        CHECK(*spearman(from(p), from(p)) == doctest::Approx(1.0));
        CHECK(*kendall(from(p), from(p)) == doctest::Approx(1.0));
        CHECK(*kendall(from(p), from(rev)) == doctest::Approx(-1.0));
        CHECK(*spearman(from(p), from(rev)) == doctest::Approx(-1.0));
    }
}

TEST_CASE("constant input is undefined, never zero") {
    const std::vector<double> flat{1, 1, 1, 1};
    const std::vector<double> other{1, 2, 3, 4};
    CHECK_FALSE(spearman(flat, other).has_value());
    CHECK_FALSE(kendall(other, flat).has_value());
    CHECK_FALSE(spearman(rank_scores(flat), rank_scores(other)).has_value());
}

TEST_CASE("correlations match the definitions on random tied data, and are symmetric") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + rng() % 12;
        std::uniform_int_distribution<int> d(0, static_cast<int>(1 + rng() % 6));
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = d(rng);
            y[i] = d(rng);
        }
        const auto s = spearman(x, y);
        const auto k = kendall(x, y);
        const auto os = oracle::spearman(x, y);
        const auto ok = oracle::kendall(x, y);
        REQUIRE(s.has_value() == os.has_value());
        REQUIRE(k.has_value() == ok.has_value());
        if (s) {
            CHECK(std::abs(*s - *os) <= 1e-12);
            CHECK(std::abs(*s - *spearman(y, x)) <= 1e-15);
        }
        if (k) {
            CHECK(std::abs(*k - *ok) <= 1e-12);
            CHECK(std::abs(*k - *kendall(y, x)) <= 1e-15);
        }
    }
}

TEST_CASE("Ranking overloads use fractional ranks") {
    const auto a = rank_scores(std::vector<double>{3, 3, 1, 0});
    const auto b = rank_scores(std::vector<double>{2, 1, 1, 0});
    const auto os = oracle::spearman({3, 3, 1, 0}, {2, 1, 1, 0});
    const auto ok = oracle::kendall({3, 3, 1, 0}, {2, 1, 1, 0});
    CHECK(*spearman(a, b) == doctest::Approx(*os).epsilon(1e-12));
    CHECK(*kendall(a, b) == doctest::Approx(*ok).epsilon(1e-12));
}

TEST_CASE("ranking dump") {
    const auto nodes = make_node_set({"a", "b", "c"});
    auto r = rank_scores(std::vector<double>{1, 3, 3}, Metric::PageRank, "2022-03");
    std::ostringstream out;
    write_ranking(out, r, *nodes);
    CHECK(out.str() ==
          "node_id,metric,interval,position,fractional_rank\n"
          "b,pagerank,2022-03,1,1.5\n"
          "c,pagerank,2022-03,2,1.5\n"
          "a,pagerank,2022-03,3,3\n");
}
