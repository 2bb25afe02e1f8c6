// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rankshift/detection.hpp"
#include "rankshift/eval.hpp"
#include "rankshift/pipeline.hpp"
#include "rankshift/synth.hpp"

using namespace rankshift;
namespace fs = std::filesystem;

namespace {

/// Collects failure messages; a criterion passes when none were recorded.
struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) {
            failures.push_back(what);
        }
    }
    void near(double got, double want, double tol, const std::string& what) {
        expect(std::abs(got - want) <= tol, fmt::format("{}: got {:.17g}, want {:.17g} (tol {:g})", what, got, want, tol));
    }
};

using Criterion = std::function<std::string(Check&)>;

bool report(int id, const std::string& title, double limit_seconds, const Criterion& body) {
    Check check;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
        detail = body(check);
    } catch (const std::exception& e) {
        check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_seconds > 0 && seconds >= limit_seconds) {
        check.failures.push_back(fmt::format("runtime {:.2f} s exceeds {:.0f} s", seconds, limit_seconds));
    }
    const bool pass = check.failures.empty();
    fmt::print("criterion {}: {} - {} [{:.2f} s]{}{}\n", id, pass ? "PASS" : "FAIL", title, seconds,
               detail.empty() ? "" : " ", detail);
    for (const auto& f : check.failures) {
        fmt::print("    {}\n", f);
    }
    std::fflush(stdout);
    return pass;
}

std::vector<double> to_double(const std::vector<std::uint32_t>& v) { return {v.begin(), v.end()}; }

// 1 --------------------------------------------------------------------------
std::string toy_golden(Check& c) {
    const auto layers = fixture::toy_layers();
    const auto sx = compute_metric(layers[0], Metric::InDegree);
    const auto sy = compute_metric(layers[1], Metric::InDegree);
    const std::vector<double> want_x = {.2, .0, .6, .4, .8};
    const std::vector<double> want_y = {.2, .4, .6, .0, .8};
    for (std::size_t i = 0; i < 5; ++i) {
        c.near(sx.scores[i], want_x[i], 1e-12, "indegree T0");
        c.near(sy.scores[i], want_y[i], 1e-12, "indegree T1");
    }
    const auto x = rank_nodes(sx);
    const auto y = rank_nodes(sy);
    c.expect(x.position == std::vector<std::uint32_t>{4, 5, 2, 3, 1}, "ranks T0");
    c.expect(y.position == std::vector<std::uint32_t>{4, 3, 2, 5, 1}, "ranks T1");
    const auto r = residuals(x, y);
    std::vector<std::int64_t> d;
    for (const auto& e : r) {
        d.push_back(e.delta);
    }
    c.expect(d == std::vector<std::int64_t>{0, 2, 0, -2, 0}, "residuals");
    const auto rho = spearman(x, y);
    const auto tau = kendall(x, y);
    c.expect(rho && tau, "correlations defined");
    c.near(rho.value_or(0), 0.6, 1e-9, "rho");
    c.near(tau.value_or(0), 0.4, 1e-9, "tau");
    auto ids = [&](const std::vector<Residual>& sel) {
        std::set<std::string> out;
        for (const auto& e : sel) {
            out.insert(layers[0].nodes()->id(e.node));
        }
        return out;
    };
    const std::set<std::string> want = {"2", "4"};
    c.expect(ids(select_topk_abs(r, 2)) == want, "abs selection");
    c.expect(ids(select_topk_split(r, 1, 1)) == want, "split selection");
    return fmt::format("rho={:.3f} tau={:.3f}", rho.value_or(NAN), tau.value_or(NAN));
}

// 2 --------------------------------------------------------------------------
std::string worked_correlations(Check& c) {
    const std::vector<std::uint32_t> a = {3, 2, 4, 1, 5}, b = {2, 3, 4, 1, 5}, z = {2, 3, 4, 5, 1};
    const auto ra = ranking_from_positions(a);
    c.near(*spearman(ra, ranking_from_positions(b)), 0.9, 1e-12, "rho example 1");
    c.near(*kendall(ra, ranking_from_positions(b)), 0.8, 1e-12, "tau example 1");
    const auto orho = *oracle::spearman(to_double(a), to_double(z));
    const auto otau = *oracle::kendall(to_double(a), to_double(z));
    c.near(orho, -0.7, 1e-12, "oracle rho example 2");
    c.near(otau, -0.6, 1e-12, "oracle tau example 2");
    c.near(*spearman(ra, ranking_from_positions(z)), orho, 1e-12, "rho example 2");
    c.near(*kendall(ra, ranking_from_positions(z)), otau, 1e-12, "tau example 2");
    return "second example: rho=-0.7 tau=-0.6 by brute force";
}

// 3 --------------------------------------------------------------------------
std::string synthetic_reshuffle(Check& c) {
    double min_rho = 1, min_tau = 1, min_overlap = 1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t0 = barabasi_albert(5000, 5, seed, "T0");
        const auto t1 = reshuffle_edges(t0, 0.1, seed + 1000, "T1");
        const auto x = rank_nodes(pagerank(t0));
        const auto y = rank_nodes(pagerank(t1));
        const double rho = spearman(x, y).value_or(-1);
        const double tau = kendall(x, y).value_or(-1);
        min_rho = std::min(min_rho, rho);
        min_tau = std::min(min_tau, tau);
        c.expect(rho > 0.5, fmt::format("seed {}: rho {:.3f} <= 0.5", seed, rho));
        c.expect(tau > 0.4, fmt::format("seed {}: tau {:.3f} <= 0.4", seed, tau));
        const auto r = residuals(x, y);
        const auto abs = select_topk_abs(r, 30);
        const auto split = select_topk_split(r, 15, 15);
        c.expect(abs.size() == 30, fmt::format("seed {}: abs returned {}", seed, abs.size()));
        c.expect(split.size() == 30, fmt::format("seed {}: split returned {}", seed, split.size()));
        std::set<NodeIndex> sa, ss;
        for (const auto& e : abs) {
            sa.insert(e.node);
        }
        for (const auto& e : split) {
            ss.insert(e.node);
        }
        std::size_t common = 0;
        for (auto n : sa) {
            common += ss.count(n);
        }
        const double overlap = static_cast<double>(common) / 30.0;
        min_overlap = std::min(min_overlap, overlap);
        c.expect(overlap >= 0.5, fmt::format("seed {}: overlap {:.2f} < 0.5", seed, overlap));
    }
    return fmt::format("min rho={:.3f} min tau={:.3f} min overlap={:.2f}", min_rho, min_tau, min_overlap);
}

// 4 --------------------------------------------------------------------------
std::string centrality_oracles(Check& c) {
    std::vector<oracle::Adj> graphs;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto family = oracle::nonisomorphic_digraphs(n);
        graphs.insert(graphs.end(), family.begin(), family.end());
    }
    const std::size_t exhaustive = graphs.size();
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) {
        graphs.push_back(oracle::random_digraph(8, 0.3, rng, true));
    }
    double pr_err = 0, hits_err = 0;
    for (std::size_t g = 0; g < graphs.size(); ++g) {
        const auto& a = graphs[g];
        const auto l = oracle::layer_from(a);
        const auto n = a.size();
        c.expect(betweenness(l).scores == oracle::betweenness(a), fmt::format("betweenness graph {}", g));
        c.expect(closeness(l, true).scores == oracle::harmonic(a), fmt::format("harmonic graph {}", g));
        c.expect(closeness(l, false).scores == oracle::closeness(a), fmt::format("closeness graph {}", g));
        const auto pr = pagerank(l).scores;
        const auto opr = oracle::pagerank(a, 0.85, true);
        for (std::size_t i = 0; i < n; ++i) {
            pr_err = std::max(pr_err, std::abs(pr[i] - opr[i]));
        }
        if (l.edge_count() > 0) {
            const auto h = hits(l);
            hits_err = std::max(hits_err, oracle::distance_to_dominant(a, h.authority.scores, false));
        }
    }
    c.expect(pr_err <= 1e-8, fmt::format("pagerank max error {:.3g}", pr_err));
    c.expect(hits_err <= 1e-6, fmt::format("authority distance {:.3g}", hits_err));
    return fmt::format("{} exhaustive + 100 random graphs, pagerank err {:.2g}, authority err {:.2g}", exhaustive,
                       pr_err, hits_err);
}

// 5 --------------------------------------------------------------------------
std::string correlation_oracles(Check& c) {
    std::size_t pairs = 0;
    double worst = 0;
    auto compare = [&](const std::vector<double>& x, const std::vector<double>& y) {
        ++pairs;
        const auto s = spearman(x, y), os = oracle::spearman(x, y);
        const auto k = kendall(x, y), ok = oracle::kendall(x, y);
        c.expect(s.has_value() == os.has_value() && k.has_value() == ok.has_value(), "definedness");
        if (s && os) {
            worst = std::max(worst, std::abs(*s - *os));
        }
        if (k && ok) {
            worst = std::max(worst, std::abs(*k - *ok));
        }
    };
    for (std::size_t n = 2; n <= 6; ++n) {
        std::vector<double> p(n);
        std::iota(p.begin(), p.end(), 1.0);
        std::vector<std::vector<double>> perms;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        for (const auto& x : perms) {
            for (const auto& y : perms) {
                compare(x, y);
            }
        }
    }
    std::mt19937_64 rng(7);
    for (std::size_t n : {7, 8}) {
        std::vector<double> x(n), y(n);
        std::iota(x.begin(), x.end(), 1.0);
        std::iota(y.begin(), y.end(), 1.0);
        for (int i = 0; i < 5000; ++i) {
            std::shuffle(x.begin(), x.end(), rng);
            std::shuffle(y.begin(), y.end(), rng);
            compare(x, y);
        }
    }
    // Ties: small value ranges force tie groups on both sides.
    for (int i = 0; i < 5000; ++i) {
        const std::size_t n = 2 + rng() % 7;
        std::vector<double> x(n), y(n);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = static_cast<double>(rng() % 3);
            y[j] = static_cast<double>(rng() % 4);
        }
        compare(x, y);
    }
    c.expect(worst <= 1e-12, fmt::format("max deviation {:.3g}", worst));
    return fmt::format("{} pairs, max deviation {:.2g}", pairs, worst);
}

// 6 --------------------------------------------------------------------------
std::string evaluation_metrics(Check& c) {
    auto as_judgement = [](const std::vector<int>& bits) {
        std::vector<Judgement> out;
        for (int b : bits) {
            out.push_back(b ? Judgement::Relevant : Judgement::NotRelevant);
        }
        return out;
    };
    c.expect(precision_at_k(as_judgement({1, 0, 1, 0, 1, 0, 0}), 5) == 0.6, "P@5 = 0.6");
    std::mt19937_64 rng(99);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 5 + rng() % 20;
        std::vector<int> bits(n);
        for (auto& b : bits) {
            b = static_cast<int>(rng() % 2);
        }
        const auto list = as_judgement(bits);
        const std::size_t k = 1 + rng() % n;
        // Enumerate by hand: precision at every relevant position up to K.
        double sum = 0;
        int hits = 0, found = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (bits[i]) {
                ++hits;
                sum += static_cast<double>(hits) / static_cast<double>(i + 1);
                ++found;
            }
        }
        const double want_ap = found ? sum / found : 0.0;
        c.near(avg_precision_at_k(list, k), want_ap, 1e-15, fmt::format("avg P@{} pattern {}", k, t));
        const std::size_t tp_star = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)) + t % 3;
        if (tp_star > 0) {
            c.near(r_star(list, k, tp_star).value_or(-1), static_cast<double>(hits) / static_cast<double>(tp_star),
                   1e-15, fmt::format("R* pattern {}", t));
        }
    }
    return "20 random patterns";
}

// 7 --------------------------------------------------------------------------
std::string end_to_end(Check& c) {
    const auto dir = fixture::scratch_dir("acceptance-e2e");
    SynthProfile profile;
    profile.nodes = 200;
    profile.months = 4;
    profile.injections = random_injections(profile, 5, 8);
    const auto data = synth_transactions(profile, 7);
    {
        std::ofstream tx(dir / "transactions.csv");
        write_transactions(tx, data.transactions);
        std::ofstream risk(dir / "risk.csv");
        write_risk_table(risk, data.risk);
        std::set<std::string> injected;
        for (const auto& g : data.truth) {
            injected.insert(g.node_id);
        }
        std::ofstream labels(dir / "labels.csv");
        labels << "node_id,relevant\n";
        for (const auto& id : data.node_ids) {
            labels << id << ',' << (injected.count(id) ? 1 : 0) << '\n';
        }
    }
    auto run = [&](const std::string& name) {
        PipelineConfig cfg;
        cfg.transactions = (dir / "transactions.csv").string();
        cfg.risk_table = (dir / "risk.csv").string();
        cfg.labels = (dir / "labels.csv").string();
        cfg.dir = (dir / name).string();
        return run_pipeline(cfg);
    };
    const auto a = run("a");
    const auto b = run("b");
    c.expect(a.exit_code == exit_ok, fmt::format("exit code {}", a.exit_code));
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
        const auto rel = fs::relative(entry.path(), dir / "a");
        const auto name = rel.generic_string();
        if (!entry.is_regular_file() ||
            !(name.starts_with("outliers/") || name.starts_with("filtered/") || name.starts_with("final_"))) {
            continue;
        }
        ++compared;
        c.expect(fixture::slurp(entry.path()) == fixture::slurp(dir / "b" / rel), "differs: " + name);
    }
    c.expect(compared > 0, "no outlier files written");

    LabelSet labels;
    for (const auto& id : data.node_ids) {
        labels.set(id, false);
    }
    for (const auto& g : data.truth) {
        labels.set(g.node_id, true);
    }
    std::vector<std::string> list;
    {
        std::ifstream in(dir / "a" / "final_stratified.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            list.push_back(line.substr(0, line.find(',')));
        }
    }
    const double ours = avg_precision_at_k(judge(list, labels), 10);
    std::mt19937_64 rng(123);
    double baseline = 0;
    for (int i = 0; i < 20; ++i) {
        auto shuffled = list;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        baseline += avg_precision_at_k(judge(shuffled, labels), 10);
    }
    baseline /= 20.0;
    c.expect(ours >= baseline, fmt::format("avg P@10 {:.3f} below random baseline {:.3f}", ours, baseline));
    return fmt::format("{} files identical, avg P@10 {:.3f} vs random {:.3f}", compared, ours, baseline);
}

// 8 --------------------------------------------------------------------------
std::string stability_negative_control(Check& c) {
    constexpr std::size_t n = 500, layers = 4, metrics = 5;
    int rejected = 0;
    std::mt19937_64 rng(31);
    for (int run = 0; run < 100; ++run) {
        std::vector<std::vector<Ranking>> rankings(metrics);
        for (auto& seq : rankings) {
            for (std::size_t l = 0; l < layers; ++l) {
                std::vector<double> s(n);
                for (auto& v : s) {
                    v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                }
                seq.push_back(rank_scores(s));
            }
        }
        const auto rep = stability_check(rankings, 0.5, 20, static_cast<std::uint64_t>(run));
        rejected += rep.any_valid() ? 0 : 1;
    }
    c.expect(rejected >= 99, fmt::format("only {} of 100 runs rejected", rejected));

    std::vector<double> s(n);
    for (auto& v : s) {
        v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    const std::vector<std::vector<Ranking>> same = {std::vector<Ranking>(layers, rank_scores(s))};
    const auto ctrl = stability_check(same, 0.5, 20, 1);
    bool all_one = ctrl.metrics[0].valid;
    for (const auto& p : ctrl.metrics[0].pairs) {
        all_one = all_one && p.rho && p.tau && std::abs(*p.rho - 1) < 1e-12 && std::abs(*p.tau - 1) < 1e-12;
    }
    c.expect(all_one, "all-equals control");
    return fmt::format("{}/100 random runs rejected, all-equals control {}", rejected, all_one ? "passes" : "fails");
}

// 9 --------------------------------------------------------------------------
std::string zipf(Check& c) {
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) {
        v.push_back(std::pow(static_cast<double>(i), -1.5));
    }
    const double a = zipf_slope(v);
    c.near(a, 1.5, 1e-9, "alpha");
    return fmt::format("alpha={:.12f}", a);
}

}  // namespace

int main() {
    set_warning_handler([](std::string_view) {});
    bool ok = true;
    ok &= report(1, "toy example golden test", 1.0, toy_golden);
    ok &= report(2, "worked correlation examples", 0, worked_correlations);
    ok &= report(3, "preferential attachment reshuffle, n=5000 m=5, 10 seeds", 10.0, synthetic_reshuffle);
    ok &= report(4, "centrality oracle suite", 30.0, centrality_oracles);
    ok &= report(5, "correlation oracle suite", 0, correlation_oracles);
    ok &= report(6, "evaluation metrics", 0, evaluation_metrics);
    ok &= report(7, "end-to-end determinism and random baseline", 0, end_to_end);
    ok &= report(8, "stability gate negative control", 0, stability_negative_control);
    ok &= report(9, "Zipf fit", 0, zipf);
    fmt::print("{}\n", ok ? "all criteria passed" : "some criteria failed");
    return ok ? 0 : 1;
}
